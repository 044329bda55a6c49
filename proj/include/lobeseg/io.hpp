#pragma once

// Volume files use a MetaImage-compatible subset:
//
//   NDims = 3
//   DimSize = nx ny nz
//   ElementSpacing = sx sy sz
//   ElementType = MET_UCHAR | MET_SHORT | MET_FLOAT | MET_DOUBLE
//   ElementByteOrderMSB = False
//   ElementDataFile = <relative path> | LOCAL
//
// The payload is raw little-endian, x-fastest (index = x + nx*(y + ny*z)).
// Axis convention expected by seeding: x increases toward the patient's
// left, z toward the head.
//
// Writing "foo.mha" embeds the payload after the header (LOCAL); any other
// name writes the header there and the payload to the same stem with a
// ".raw" extension.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "lobeseg/metrics.hpp"
#include "lobeseg/volume.hpp"

namespace lobeseg::io {

enum class ElementType { UInt8, Int16, Float32, Float64 };

std::size_t element_size(ElementType t) noexcept;
const char* element_tag(ElementType t) noexcept;  ///< "MET_UCHAR", ...

struct VolumeHeader {
  Index3 dims{};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  ElementType type = ElementType::UInt8;
  std::string data_file;  ///< "LOCAL" or a path relative to the header
  std::size_t payload_offset = 0;  ///< byte offset of LOCAL data in the header file
};

/// Throws ParseError (with line number) or IoError.
VolumeHeader read_header(const std::filesystem::path& path);

void write_volume(const MaskVolume& v, const std::filesystem::path& path);
void write_volume(const LabelVolume& v, const std::filesystem::path& path);
void write_volume(const ByteVolume& v, const std::filesystem::path& path);
void write_volume(const HuVolume& v, const std::filesystem::path& path);
/// `type` must be Float32 or Float64; Float32 rounds to nearest.
void write_volume(const ScalarVolume& v, const std::filesystem::path& path,
                  ElementType type = ElementType::Float64);

/// Typed readers throw TypeMismatch when the stored element type does not
/// suit the volume kind, and TruncatedData when the payload size is wrong.
MaskVolume read_mask(const std::filesystem::path& path);  ///< uint8, nonzero = true
LabelVolume read_labels(const std::filesystem::path& path);  ///< uint8, values 0..5
ByteVolume read_bytes(const std::filesystem::path& path);
HuVolume read_hu(const std::filesystem::path& path);  ///< int16
ScalarVolume read_scalar(const std::filesystem::path& path);  ///< float32 or float64

struct WindowSpec {
  double lo;
  double hi;
};

inline constexpr std::array<WindowSpec, 3> kDefaultWindows{
    {{-1000.0, 200.0}, {-160.0, 240.0}, {-1000.0, -775.0}}};

/// out = floor(255 * clamp((hu - lo) / (hi - lo), 0, 1) + 0.5) per window.
/// Throws InvalidArgument unless lo < hi for every window.
std::array<ByteVolume, 3> hu_window(const HuVolume& hu,
                                    const std::array<WindowSpec, 3>& windows = kDefaultWindows);

/// Shortest decimal that round-trips, always with a '.' or exponent
/// ("1.0", "0.625", "inf").
std::string format_real(double v);

struct CaseScores {
  std::string case_id;
  LobeScores scores;
};

/// `case,lobe,jaccard,asd_mm,gt_voxels`, five lobe rows and an `overall`
/// row per case. Throws EmptyInput for an empty list, IoError on write
/// failure.
void write_metrics_csv(const std::vector<CaseScores>& reports, const std::filesystem::path& path);

/// One score per row. Headerless files use the first field; with a header
/// row the `score` column is used, else `jaccard`, else the first column.
std::vector<double> read_scores_csv(const std::filesystem::path& path);

void write_histogram_csv(const CumulativeHistogram& hist, const std::filesystem::path& path);

}  // namespace lobeseg::io
