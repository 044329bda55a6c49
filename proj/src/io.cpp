#include "lobeseg/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lobeseg/seeding.hpp"

namespace lobeseg::io {

namespace fs = std::filesystem;

std::size_t element_size(ElementType t) noexcept {
  switch (t) {
    case ElementType::UInt8: return 1;
    case ElementType::Int16: return 2;
    case ElementType::Float32: return 4;
    case ElementType::Float64: return 8;
  }
  return 0;
}

const char* element_tag(ElementType t) noexcept {
  switch (t) {
    case ElementType::UInt8: return "MET_UCHAR";
    case ElementType::Int16: return "MET_SHORT";
    case ElementType::Float32: return "MET_FLOAT";
    case ElementType::Float64: return "MET_DOUBLE";
  }
  return "?";
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_bool(const std::string& s, bool& out) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "false" || lower == "0") {
    out = false;
    return true;
  }
  if (lower == "true" || lower == "1") {
    out = true;
    return true;
  }
  return false;
}

template <typename T>
void to_little_endian_bytes(const T* src, std::size_t n, char* dst) {
  std::memcpy(dst, src, n * sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    for (std::size_t i = 0; i < n; ++i) std::reverse(dst + i * sizeof(T), dst + (i + 1) * sizeof(T));
  }
}

template <typename T>
void from_little_endian_bytes(const char* src, std::size_t n, T* dst) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    std::vector<char> tmp(src, src + n * sizeof(T));
    for (std::size_t i = 0; i < n; ++i) std::reverse(tmp.begin() + i * sizeof(T), tmp.begin() + (i + 1) * sizeof(T));
    std::memcpy(dst, tmp.data(), n * sizeof(T));
  } else {
    std::memcpy(dst, src, n * sizeof(T));
  }
}

void write_raw(const GridMeta& meta, ElementType type, const std::vector<char>& payload,
               const fs::path& path) {
  const bool local = path.extension() == ".mha";
  const fs::path raw_path = fs::path(path).replace_extension(".raw");

  std::ostringstream header;
  header << "NDims = 3\n"
         << "DimSize = " << meta.nx() << ' ' << meta.ny() << ' ' << meta.nz() << '\n'
         << "ElementSpacing = " << format_real(meta.spacing()[0]) << ' '
         << format_real(meta.spacing()[1]) << ' ' << format_real(meta.spacing()[2]) << '\n'
         << "ElementType = " << element_tag(type) << '\n'
         << "ElementByteOrderMSB = False\n"
         << "ElementDataFile = " << (local ? std::string("LOCAL") : raw_path.filename().string())
         << '\n';

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::string text = header.str();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (local) {
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  } else {
    std::ofstream raw(raw_path, std::ios::binary | std::ios::trunc);
    if (!raw) throw IoError("cannot open " + raw_path.string() + " for writing");
    raw.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!raw) throw IoError("write failed: " + raw_path.string());
  }
  if (!out) throw IoError("write failed: " + path.string());
}

template <typename V, typename Stored>
void write_typed(const V& v, ElementType type, const fs::path& path) {
  std::vector<char> payload(v.size() * sizeof(Stored));
  if constexpr (std::is_same_v<typename V::value_type, Stored>) {
    to_little_endian_bytes(v.data().data(), v.size(), payload.data());
  } else {
    std::vector<Stored> tmp(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = static_cast<Stored>(v[i]);
    to_little_endian_bytes(tmp.data(), tmp.size(), payload.data());
  }
  write_raw(v.meta(), type, payload, path);
}

struct RawVolume {
  VolumeHeader header;
  std::vector<char> payload;
};

RawVolume read_raw(const fs::path& path) {
  RawVolume out{read_header(path), {}};
  const auto& h = out.header;
  const GridMeta meta(h.dims, h.spacing);
  const std::size_t expected = meta.voxel_count() * element_size(h.type);

  fs::path data_path = h.data_file == "LOCAL" ? path : path.parent_path() / h.data_file;
  std::ifstream in(data_path, std::ios::binary);
  if (!in) throw IoError("cannot open data file " + data_path.string());
  in.seekg(0, std::ios::end);
  const auto total = static_cast<std::size_t>(in.tellg());
  const std::size_t offset = h.data_file == "LOCAL" ? h.payload_offset : 0;
  const std::size_t available = total >= offset ? total - offset : 0;
  if (available != expected) {
    throw TruncatedData(data_path.string() + ": payload has " + std::to_string(available) +
                        " bytes, expected " + std::to_string(expected));
  }
  out.payload.resize(expected);
  in.seekg(static_cast<std::streamoff>(offset));
  in.read(out.payload.data(), static_cast<std::streamsize>(expected));
  if (!in) throw IoError("read failed: " + data_path.string());
  return out;
}

template <typename V, typename Stored>
V decode(const RawVolume& raw) {
  const GridMeta meta(raw.header.dims, raw.header.spacing);
  std::vector<Stored> stored(meta.voxel_count());
  from_little_endian_bytes(raw.payload.data(), stored.size(), stored.data());
  std::vector<typename V::value_type> data(stored.begin(), stored.end());
  return V(meta, std::move(data));
}

void require_type(const RawVolume& raw, std::initializer_list<ElementType> allowed,
                  const fs::path& path, const char* kind) {
  if (std::find(allowed.begin(), allowed.end(), raw.header.type) == allowed.end()) {
    throw TypeMismatch(path.string() + ": element type " + element_tag(raw.header.type) +
                       " cannot hold a " + kind);
  }
}

}  // namespace

VolumeHeader read_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  VolumeHeader h;
  bool have_ndims = false, have_dims = false, have_type = false, have_data = false;
  std::size_t line_no = 0;
  std::string line;
  while (!have_data && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'Key = Value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto fields = split_ws(value);

    if (key == "NDims") {
      int nd = 0;
      if (fields.size() != 1 || !parse_number(fields[0], nd)) throw ParseError(line_no, "bad NDims");
      if (nd != 3) throw ParseError(line_no, "only 3D volumes are supported (NDims = " + value + ")");
      have_ndims = true;
    } else if (key == "DimSize") {
      if (fields.size() != 3) throw ParseError(line_no, "DimSize needs three values");
      for (int a = 0; a < 3; ++a) {
        if (!parse_number(fields[a], h.dims[a]) || h.dims[a] == 0) {
          throw ParseError(line_no, "bad DimSize value '" + fields[a] + "'");
        }
      }
      have_dims = true;
    } else if (key == "ElementSpacing" || key == "ElementSize") {
      if (fields.size() != 3) throw ParseError(line_no, key + " needs three values");
      for (int a = 0; a < 3; ++a) {
        if (!parse_number(fields[a], h.spacing[a]) || !(h.spacing[a] > 0.0) ||
            !std::isfinite(h.spacing[a])) {
          throw ParseError(line_no, "bad spacing value '" + fields[a] + "'");
        }
      }
    } else if (key == "ElementType") {
      if (value == "MET_UCHAR") h.type = ElementType::UInt8;
      else if (value == "MET_SHORT") h.type = ElementType::Int16;
      else if (value == "MET_FLOAT") h.type = ElementType::Float32;
      else if (value == "MET_DOUBLE") h.type = ElementType::Float64;
      else throw ParseError(line_no, "unsupported ElementType '" + value + "'");
      have_type = true;
    } else if (key == "ElementByteOrderMSB" || key == "BinaryDataByteOrderMSB") {
      bool msb = false;
      if (!parse_bool(value, msb)) throw ParseError(line_no, "bad boolean '" + value + "'");
      if (msb) throw ParseError(line_no, "big-endian payloads are not supported");
    } else if (key == "CompressedData") {
      bool compressed = false;
      if (!parse_bool(value, compressed)) throw ParseError(line_no, "bad boolean '" + value + "'");
      if (compressed) throw ParseError(line_no, "compressed payloads are not supported");
    } else if (key == "ElementNumberOfChannels") {
      if (value != "1") throw ParseError(line_no, "only single-channel volumes are supported");
    } else if (key == "ElementDataFile") {
      if (value.empty()) throw ParseError(line_no, "empty ElementDataFile");
      h.data_file = value;
      have_data = true;
    }
    // Other MetaImage keys (ObjectType, BinaryData, Offset, ...) are ignored.
  }
  if (!have_data) throw ParseError(line_no, "missing ElementDataFile");
  if (!have_ndims) throw ParseError(line_no, "missing NDims");
  if (!have_dims) throw ParseError(line_no, "missing DimSize");
  if (!have_type) throw ParseError(line_no, "missing ElementType");
  try {
    GridMeta(h.dims, h.spacing);
  } catch (const InvalidArgument& e) {
    throw ParseError(line_no, e.what());
  }
  if (h.data_file == "LOCAL") h.payload_offset = static_cast<std::size_t>(in.tellg());
  return h;
}

void write_volume(const MaskVolume& v, const fs::path& path) {
  write_typed<MaskVolume, std::uint8_t>(v, ElementType::UInt8, path);
}
void write_volume(const LabelVolume& v, const fs::path& path) {
  write_typed<LabelVolume, std::uint8_t>(v, ElementType::UInt8, path);
}
void write_volume(const ByteVolume& v, const fs::path& path) {
  write_typed<ByteVolume, std::uint8_t>(v, ElementType::UInt8, path);
}
void write_volume(const HuVolume& v, const fs::path& path) {
  write_typed<HuVolume, std::int16_t>(v, ElementType::Int16, path);
}
void write_volume(const ScalarVolume& v, const fs::path& path, ElementType type) {
  if (type == ElementType::Float32) {
    write_typed<ScalarVolume, float>(v, type, path);
  } else if (type == ElementType::Float64) {
    write_typed<ScalarVolume, double>(v, type, path);
  } else {
    throw InvalidArgument("scalar volumes are stored as MET_FLOAT or MET_DOUBLE");
  }
}

MaskVolume read_mask(const fs::path& path) {
  const RawVolume raw = read_raw(path);
  require_type(raw, {ElementType::UInt8}, path, "mask");
  MaskVolume m = decode<MaskVolume, std::uint8_t>(raw);
  for (auto& b : m.data()) b = b != 0;
  return m;
}

LabelVolume read_labels(const fs::path& path) {
  const RawVolume raw = read_raw(path);
  require_type(raw, {ElementType::UInt8}, path, "label volume");
  LabelVolume labels = decode<LabelVolume, std::uint8_t>(raw);
  validate_labels(labels);
  return labels;
}

ByteVolume read_bytes(const fs::path& path) {
  const RawVolume raw = read_raw(path);
  require_type(raw, {ElementType::UInt8}, path, "byte image");
  return decode<ByteVolume, std::uint8_t>(raw);
}

HuVolume read_hu(const fs::path& path) {
  const RawVolume raw = read_raw(path);
  require_type(raw, {ElementType::Int16}, path, "Hounsfield volume");
  return decode<HuVolume, std::int16_t>(raw);
}

ScalarVolume read_scalar(const fs::path& path) {
  const RawVolume raw = read_raw(path);
  require_type(raw, {ElementType::Float32, ElementType::Float64}, path, "scalar volume");
  if (raw.header.type == ElementType::Float32) return decode<ScalarVolume, float>(raw);
  return decode<ScalarVolume, double>(raw);
}

std::array<ByteVolume, 3> hu_window(const HuVolume& hu, const std::array<WindowSpec, 3>& windows) {
  for (const auto& w : windows) {
    if (!(w.lo < w.hi)) throw InvalidArgument("window bounds must satisfy lo < hi");
  }
  std::array<ByteVolume, 3> out{ByteVolume(hu.meta()), ByteVolume(hu.meta()), ByteVolume(hu.meta())};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto [lo, hi] = windows[c];
    for (std::size_t i = 0; i < hu.size(); ++i) {
      const double t = std::clamp((static_cast<double>(hu[i]) - lo) / (hi - lo), 0.0, 1.0);
      out[c][i] = static_cast<std::uint8_t>(std::floor(255.0 * t + 0.5));
    }
  }
  return out;
}

void write_metrics_csv(const std::vector<CaseScores>& reports, const fs::path& path) {
  if (reports.empty()) throw EmptyInput("no metric reports to write");
  std::ostringstream csv;
  csv << "case,lobe,jaccard,asd_mm,gt_voxels\n";
  for (const auto& r : reports) {
    std::size_t total = 0;
    for (LobeId id : kAllLobes) {
      const std::size_t k = lobe_index(id);
      csv << r.case_id << ',' << lobe_name(id) << ',' << format_real(r.scores.jaccard[k]) << ','
          << format_real(r.scores.asd_mm[k]) << ',' << r.scores.gt_lobe_voxels[k] << '\n';
      total += r.scores.gt_lobe_voxels[k];
    }
    csv << r.case_id << ",overall," << format_real(r.scores.overall_jaccard) << ','
        << format_real(r.scores.overall_asd_mm) << ',' << total << '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::string text = csv.str();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<double> read_scores_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream s(line);
    while (std::getline(s, field, ',')) fields.push_back(trim(field));
    return fields;
  };

  std::vector<double> scores;
  std::size_t column = 0;
  bool first = true;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    double v = 0.0;
    if (first) {
      first = false;
      if (fields.empty() || !parse_number(fields[0], v)) {
        for (const char* name : {"score", "jaccard"}) {
          const auto it = std::find(fields.begin(), fields.end(), name);
          if (it != fields.end()) {
            column = static_cast<std::size_t>(it - fields.begin());
            break;
          }
        }
        continue;
      }
    }
    if (column >= fields.size() || !parse_number(fields[column], v)) {
      throw ParseError(line_no, "expected a numeric score");
    }
    scores.push_back(v);
  }
  if (scores.empty()) throw EmptyScores(path.string() + " holds no scores");
  return scores;
}

void write_histogram_csv(const CumulativeHistogram& hist, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "threshold,fraction\n";
  for (std::size_t i = 0; i < hist.thresholds.size(); ++i) {
    out << format_real(hist.thresholds[i]) << ',' << format_real(hist.fractions[i]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lobeseg::io
