#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lobeseg {

/// Base of every error the library raises. `kind()` is a stable short tag
/// (e.g. "MetaMismatch") used in CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(detail), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define LOBESEG_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& detail) : Error(#Name, detail) {}    \
  };

LOBESEG_DEFINE_ERROR(InvalidArgument)
LOBESEG_DEFINE_ERROR(MetaMismatch)
LOBESEG_DEFINE_ERROR(EmptyMask)
LOBESEG_DEFINE_ERROR(UnknownLabel)
LOBESEG_DEFINE_ERROR(LungPartitionError)
LOBESEG_DEFINE_ERROR(EmptyLung)
LOBESEG_DEFINE_ERROR(TooLarge)
LOBESEG_DEFINE_ERROR(EmptyScores)
LOBESEG_DEFINE_ERROR(DimsTooSmall)
LOBESEG_DEFINE_ERROR(TypeMismatch)
LOBESEG_DEFINE_ERROR(TruncatedData)
LOBESEG_DEFINE_ERROR(IoError)
LOBESEG_DEFINE_ERROR(EmptyInput)
LOBESEG_DEFINE_ERROR(InvalidLabel)

#undef LOBESEG_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail)
      : Error("ParseError", "line " + std::to_string(line) + ": " + detail), line_(line) {}

  /// 1-based header line; 0 when the problem is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SeedCountNeverFive : public Error {
 public:
  SeedCountNeverFive(int iterations, int best_count)
      : Error("SeedCountNeverFive",
              "no erosion level produced exactly the requested seed regions (iterations=" +
                  std::to_string(iterations) + ", best_count=" + std::to_string(best_count) + ")"),
        iterations_(iterations),
        best_count_(best_count) {}

  int iterations() const noexcept { return iterations_; }
  int best_count() const noexcept { return best_count_; }

 private:
  int iterations_;
  int best_count_;
};

class SolverDiverged : public Error {
 public:
  SolverDiverged(double residual, int iterations)
      : Error("SolverDiverged", "conjugate gradients stopped at relative residual " +
                                    std::to_string(residual) + " after " +
                                    std::to_string(iterations) + " iterations"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace lobeseg
