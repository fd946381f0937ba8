#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "tdacloud/errors.hpp"
#include "tdacloud/point_cloud.hpp"
#include "tdacloud/text_format.hpp"

namespace tdacloud {

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string format_double17(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), end);
}

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_uint(std::string_view token, unsigned long long& out) {
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Point3 parse_point(const std::vector<std::string_view>& tokens, std::size_t ix, std::size_t iy, std::size_t iz,
                   const std::string& source, std::size_t line_no) {
  Point3 p;
  const std::size_t idx[3] = {ix, iy, iz};
  double* dst[3] = {&p.x, &p.y, &p.z};
  for (int k = 0; k < 3; ++k) {
    const auto tok = tokens[idx[k]];
    if (!parse_double(tok, *dst[k])) {
      throw ParseError(source, line_no, "malformed number '" + std::string(tok) + "'");
    }
    if (!std::isfinite(*dst[k])) {
      throw ParseError(source, line_no, "non-finite coordinate '" + std::string(tok) + "'");
    }
  }
  return p;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<Point3> parse_xyz(std::string_view text, const std::string& source) {
  std::vector<Point3> points;
  LineReader reader(text);
  std::string_view line;
  while (reader.next(line)) {
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tokens = split_ws(body);
    if (tokens.size() != 3) {
      throw ParseError(source, reader.line_no(),
                       "expected 3 coordinates, found " + std::to_string(tokens.size()) + " fields");
    }
    points.push_back(parse_point(tokens, 0, 1, 2, source, reader.line_no()));
  }
  return points;
}

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> properties;
  bool has_list = false;
};

std::vector<Point3> parse_ply_ascii(std::string_view text, const std::string& source) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line) || trim(line) != "ply") {
    throw ParseError(source, 1, "missing 'ply' magic");
  }
  std::vector<PlyElement> elements;
  bool saw_format = false;
  bool header_done = false;
  while (reader.next(line)) {
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const auto key = tokens[0];
    if (key == "format") {
      if (tokens.size() < 2 || tokens[1] != "ascii") {
        throw ParseError(source, reader.line_no(), "only 'format ascii 1.0' PLY files are supported");
      }
      saw_format = true;
    } else if (key == "comment" || key == "obj_info") {
      continue;
    } else if (key == "element") {
      unsigned long long count = 0;
      if (tokens.size() != 3 || !parse_uint(tokens[2], count)) {
        throw ParseError(source, reader.line_no(), "malformed element declaration");
      }
      elements.push_back({std::string(tokens[1]), static_cast<std::size_t>(count), {}, false});
    } else if (key == "property") {
      if (elements.empty()) {
        throw ParseError(source, reader.line_no(), "property declared before any element");
      }
      if (tokens.size() >= 2 && tokens[1] == "list") {
        if (tokens.size() != 5) throw ParseError(source, reader.line_no(), "malformed list property");
        elements.back().has_list = true;
        elements.back().properties.emplace_back(tokens[4]);
      } else {
        if (tokens.size() != 3) throw ParseError(source, reader.line_no(), "malformed property");
        elements.back().properties.emplace_back(tokens[2]);
      }
    } else if (key == "end_header") {
      header_done = true;
      break;
    } else {
      throw ParseError(source, reader.line_no(), "unexpected header line '" + std::string(trim(line)) + "'");
    }
  }
  if (!saw_format) throw ParseError(source, reader.line_no(), "missing format line");
  if (!header_done) throw ParseError(source, reader.line_no(), "missing end_header");

  std::vector<Point3> points;
  bool found_vertex = false;
  for (const auto& element : elements) {
    const bool is_vertex = element.name == "vertex";
    std::size_t ix = 0, iy = 0, iz = 0;
    if (is_vertex) {
      found_vertex = true;
      auto find = [&](const char* name) {
        auto it = std::find(element.properties.begin(), element.properties.end(), name);
        if (it == element.properties.end()) {
          throw ParseError(source, 0, std::string("vertex element lacks property '") + name + "'");
        }
        return static_cast<std::size_t>(it - element.properties.begin());
      };
      ix = find("x");
      iy = find("y");
      iz = find("z");
      if (element.has_list) {
        throw ParseError(source, 0, "list properties on vertices are not supported");
      }
      points.reserve(element.count);
    }
    for (std::size_t i = 0; i < element.count; ++i) {
      if (!reader.next(line)) {
        throw ParseError(source, reader.line_no(), "unexpected end of file in element '" + element.name + "'");
      }
      if (!is_vertex) continue;
      const auto tokens = split_ws(line);
      if (tokens.size() != element.properties.size()) {
        throw ParseError(source, reader.line_no(),
                         "expected " + std::to_string(element.properties.size()) + " vertex fields");
      }
      points.push_back(parse_point(tokens, ix, iy, iz, source, reader.line_no()));
    }
    if (is_vertex) break;  // trailing elements (faces, ...) are ignored
  }
  if (!found_vertex) throw ParseError(source, 0, "no vertex element");
  return points;
}

float load_le_float(const char* bytes) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, bytes, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap32(bits);
  }
  return std::bit_cast<float>(bits);
}

std::vector<Point3> parse_kitti_bin(std::string_view bytes, const std::string& source) {
  constexpr std::size_t record = 4 * sizeof(float);
  if (bytes.size() % record != 0) {
    throw ParseError(source, 0, "file length " + std::to_string(bytes.size()) + " is not a multiple of 16 bytes");
  }
  std::vector<Point3> points;
  points.reserve(bytes.size() / record);
  for (std::size_t off = 0; off < bytes.size(); off += record) {
    const Point3 p{load_le_float(bytes.data() + off), load_le_float(bytes.data() + off + 4),
                   load_le_float(bytes.data() + off + 8)};
    if (!p.finite()) {
      throw ParseError(source, 0, "non-finite coordinate in record " + std::to_string(off / record));
    }
    points.push_back(p);
  }
  return points;
}

void append_le_float(std::string& out, float value) {
  auto bits = std::bit_cast<std::uint32_t>(value);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap32(bits);
  }
  char bytes[4];
  std::memcpy(bytes, &bits, 4);
  out.append(bytes, 4);
}

}  // namespace

std::string_view to_string(CloudFormat format) {
  switch (format) {
    case CloudFormat::xyz: return "xyz";
    case CloudFormat::ply_ascii: return "ply_ascii";
    case CloudFormat::kitti_bin: return "kitti_bin";
  }
  return "unknown";
}

CloudFormat parse_cloud_format(std::string_view name) {
  if (name == "xyz") return CloudFormat::xyz;
  if (name == "ply_ascii" || name == "ply") return CloudFormat::ply_ascii;
  if (name == "kitti_bin" || name == "bin") return CloudFormat::kitti_bin;
  throw ArgumentError("unknown cloud format '" + std::string(name) + "'");
}

std::optional<CloudFormat> format_from_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".xyz" || ext == ".txt") return CloudFormat::xyz;
  if (ext == ".ply") return CloudFormat::ply_ascii;
  if (ext == ".bin") return CloudFormat::kitti_bin;
  return std::nullopt;
}

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format, std::optional<std::string> id) {
  const std::string source = path.string();
  const std::string bytes = read_file(path);
  PointCloud cloud;
  cloud.id = id ? *id : path.stem().string();
  cloud.source = source;
  switch (format) {
    case CloudFormat::xyz: cloud.points = parse_xyz(bytes, source); break;
    case CloudFormat::ply_ascii: cloud.points = parse_ply_ascii(bytes, source); break;
    case CloudFormat::kitti_bin: cloud.points = parse_kitti_bin(bytes, source); break;
  }
  if (cloud.points.empty()) {
    throw DataError(source + ": point cloud is empty");
  }
  if (cloud.id.empty()) {
    throw DataError(source + ": cannot derive a cloud id from the file name");
  }
  return cloud;
}

PointCloud load_cloud(const std::filesystem::path& path) {
  const auto format = format_from_extension(path);
  if (!format) {
    throw ArgumentError("cannot infer point cloud format from '" + path.string() + "'");
  }
  return load_cloud(path, *format);
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format) {
  std::string out;
  switch (format) {
    case CloudFormat::xyz:
      for (const auto& p : cloud.points) {
        out += format_double17(p.x) + ' ' + format_double17(p.y) + ' ' + format_double17(p.z) + '\n';
      }
      break;
    case CloudFormat::ply_ascii:
      out += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.points.size()) +
             "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
      for (const auto& p : cloud.points) {
        out += format_double17(p.x) + ' ' + format_double17(p.y) + ' ' + format_double17(p.z) + '\n';
      }
      break;
    case CloudFormat::kitti_bin:
      out.reserve(cloud.points.size() * 16);
      for (const auto& p : cloud.points) {
        append_le_float(out, static_cast<float>(p.x));
        append_le_float(out, static_cast<float>(p.y));
        append_le_float(out, static_cast<float>(p.z));
        append_le_float(out, 0.0f);
      }
      break;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw DataError("cannot write '" + path.string() + "'");
  }
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw DataError("failed writing '" + path.string() + "'");
  }
}

}  // namespace tdacloud
