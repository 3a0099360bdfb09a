#include "faceval/ply.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "faceval/error.hpp"

namespace faceval {
namespace {

enum class ScalarType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::i8:
    case ScalarType::u8: return 1;
    case ScalarType::i16:
    case ScalarType::u16: return 2;
    case ScalarType::i32:
    case ScalarType::u32:
    case ScalarType::f32: return 4;
    case ScalarType::f64: return 8;
  }
  return 0;
}

bool is_integer(ScalarType t) { return t != ScalarType::f32 && t != ScalarType::f64; }

std::optional<ScalarType> parse_type(const std::string& word) {
  if (word == "char" || word == "int8") return ScalarType::i8;
  if (word == "uchar" || word == "uint8") return ScalarType::u8;
  if (word == "short" || word == "int16") return ScalarType::i16;
  if (word == "ushort" || word == "uint16") return ScalarType::u16;
  if (word == "int" || word == "int32") return ScalarType::i32;
  if (word == "uint" || word == "uint32") return ScalarType::u32;
  if (word == "float" || word == "float32") return ScalarType::f32;
  if (word == "double" || word == "float64") return ScalarType::f64;
  return std::nullopt;
}

struct Property {
  std::string name;
  bool is_list = false;
  ScalarType count_type = ScalarType::u8;  // list only
  ScalarType value_type = ScalarType::f32;
};

struct Element {
  std::string name;
  std::uint64_t count = 0;
  std::vector<Property> properties;

  const Property* find(const std::string& prop) const {
    for (const auto& p : properties)
      if (p.name == prop) return &p;
    return nullptr;
  }
};

struct Header {
  PlyFormat format = PlyFormat::ascii;
  std::vector<Element> elements;
  std::size_t payload_offset = 0;
};

// Reads the whole file; parsing happens on the in-memory buffer.
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_failure, "read failed on '" + path + "'");
  return std::move(buf).str();
}

std::vector<std::string> split_words(const std::string& line) {
  std::vector<std::string> words;
  std::istringstream stream(line);
  std::string word;
  while (stream >> word) words.push_back(word);
  return words;
}

Header parse_header(const std::string& data) {
  Header header;
  std::size_t pos = 0;
  bool saw_magic = false;
  bool saw_format = false;
  bool done = false;

  while (pos < data.size() && !done) {
    std::size_t eol = data.find('\n', pos);
    if (eol == std::string::npos) throw Error(Errc::malformed_header, "missing end_header");
    std::string line = data.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;

    if (!saw_magic) {
      if (line != "ply") throw Error(Errc::malformed_header, "file does not start with 'ply'");
      saw_magic = true;
      continue;
    }

    const auto words = split_words(line);
    if (words.empty()) continue;

    if (words[0] == "comment" || words[0] == "obj_info") continue;

    if (words[0] == "format") {
      if (words.size() != 3 || words[2] != "1.0")
        throw Error(Errc::malformed_header, "bad format line '" + line + "'");
      if (words[1] == "ascii") {
        header.format = PlyFormat::ascii;
      } else if (words[1] == "binary_little_endian") {
        header.format = PlyFormat::binary_little_endian;
      } else if (words[1] == "binary_big_endian") {
        throw Error(Errc::unsupported_format, "binary_big_endian is not supported");
      } else {
        throw Error(Errc::malformed_header, "unknown format '" + words[1] + "'");
      }
      saw_format = true;
      continue;
    }

    if (words[0] == "element") {
      if (words.size() != 3) throw Error(Errc::malformed_header, "bad element line '" + line + "'");
      Element element;
      element.name = words[1];
      try {
        element.count = std::stoull(words[2]);
      } catch (const std::exception&) {
        throw Error(Errc::malformed_header, "bad element count '" + words[2] + "'");
      }
      header.elements.push_back(std::move(element));
      continue;
    }

    if (words[0] == "property") {
      if (header.elements.empty()) throw Error(Errc::malformed_header, "property before any element");
      Property prop;
      if (words.size() == 5 && words[1] == "list") {
        prop.is_list = true;
        const auto count_t = parse_type(words[2]);
        const auto value_t = parse_type(words[3]);
        if (!count_t || !value_t || !is_integer(*count_t))
          throw Error(Errc::malformed_header, "bad list property '" + line + "'");
        prop.count_type = *count_t;
        prop.value_type = *value_t;
        prop.name = words[4];
      } else if (words.size() == 3) {
        const auto value_t = parse_type(words[1]);
        if (!value_t) throw Error(Errc::malformed_header, "unknown property type '" + words[1] + "'");
        prop.value_type = *value_t;
        prop.name = words[2];
      } else {
        throw Error(Errc::malformed_header, "bad property line '" + line + "'");
      }
      header.elements.back().properties.push_back(std::move(prop));
      continue;
    }

    if (words[0] == "end_header") {
      done = true;
      continue;
    }

    throw Error(Errc::malformed_header, "unexpected header line '" + line + "'");
  }

  if (!done) throw Error(Errc::malformed_header, "missing end_header");
  if (!saw_format) throw Error(Errc::malformed_header, "missing format line");
  header.payload_offset = pos;
  return header;
}

// ---- binary payload ----

class BinaryCursor {
 public:
  BinaryCursor(const std::string& data, std::size_t offset) : data_(data), pos_(offset) {}

  double read(ScalarType type) {
    const std::size_t n = scalar_size(type);
    if (pos_ + n > data_.size()) throw Error(Errc::truncated_payload, "binary payload ends early");
    const auto* bytes = reinterpret_cast<const unsigned char*>(data_.data()) + pos_;
    pos_ += n;
    std::uint64_t raw = 0;
    for (std::size_t i = 0; i < n; ++i) raw |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    switch (type) {
      case ScalarType::i8: return static_cast<double>(static_cast<std::int8_t>(raw));
      case ScalarType::u8: return static_cast<double>(static_cast<std::uint8_t>(raw));
      case ScalarType::i16: return static_cast<double>(static_cast<std::int16_t>(raw));
      case ScalarType::u16: return static_cast<double>(static_cast<std::uint16_t>(raw));
      case ScalarType::i32: return static_cast<double>(static_cast<std::int32_t>(raw));
      case ScalarType::u32: return static_cast<double>(static_cast<std::uint32_t>(raw));
      case ScalarType::f32: {
        float value;
        std::uint32_t raw32 = static_cast<std::uint32_t>(raw);
        std::memcpy(&value, &raw32, sizeof value);
        return static_cast<double>(value);
      }
      case ScalarType::f64: {
        double value;
        std::memcpy(&value, &raw, sizeof value);
        return value;
      }
    }
    return 0.0;
  }

 private:
  const std::string& data_;
  std::size_t pos_;
};

// ---- ascii payload ----

class AsciiCursor {
 public:
  AsciiCursor(const std::string& data, std::size_t offset) : data_(data), pos_(offset) {}

  double read(ScalarType) {
    skip_space();
    if (pos_ >= data_.size()) throw Error(Errc::truncated_payload, "ascii payload ends early");
    const char* begin = data_.data() + pos_;
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end == begin) throw Error(Errc::truncated_payload, "expected a number in ascii payload");
    pos_ += static_cast<std::size_t>(end - begin);
    return value;
  }

 private:
  void skip_space() {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
  }

  const std::string& data_;
  std::size_t pos_;
};

template <typename Cursor>
TriangleMesh read_payload(const Header& header, Cursor cursor) {
  TriangleMesh mesh;
  std::uint64_t declared_vertices = 0;

  for (const auto& element : header.elements) {
    const bool is_vertex = element.name == "vertex";
    const bool is_face = element.name == "face";

    const Property* face_list = nullptr;
    if (is_vertex) {
      for (const char* required : {"x", "y", "z"}) {
        const Property* p = element.find(required);
        if (p == nullptr || p->is_list)
          throw Error(Errc::malformed_header, std::string("vertex element lacks scalar property '") + required + "'");
      }
      declared_vertices = element.count;
      mesh.vertices.reserve(std::min<std::uint64_t>(element.count, 1u << 20));
      const bool has_colors =
          element.find("red") != nullptr && element.find("green") != nullptr && element.find("blue") != nullptr;
      const bool has_normals =
          element.find("nx") != nullptr && element.find("ny") != nullptr && element.find("nz") != nullptr;
      if (has_colors) mesh.vertex_colors.reserve(mesh.vertices.capacity());
      if (has_normals) mesh.vertex_normals.reserve(mesh.vertices.capacity());
    } else if (is_face) {
      face_list = element.find("vertex_indices");
      if (face_list == nullptr) face_list = element.find("vertex_index");
      if (face_list == nullptr || !face_list->is_list)
        throw Error(Errc::malformed_header, "face element lacks a vertex index list");
    }

    for (std::uint64_t row = 0; row < element.count; ++row) {
      Vec3 position = Vec3::Zero();
      Vec3 normal = Vec3::Zero();
      bool saw_normal = false;
      bool saw_color = false;
      double color[3] = {0, 0, 0};
      std::array<std::uint32_t, 3> face{};

      for (const auto& prop : element.properties) {
        if (prop.is_list) {
          const double count_value = cursor.read(prop.count_type);
          const auto count = static_cast<std::int64_t>(count_value);
          if (count < 0) throw Error(Errc::truncated_payload, "negative list count");
          const bool is_face_indices = is_face && &prop == face_list;
          if (is_face_indices && count != 3)
            throw Error(Errc::unsupported_format,
                        "face with " + std::to_string(count) + " vertices; only triangles are supported");
          for (std::int64_t k = 0; k < count; ++k) {
            const double value = cursor.read(prop.value_type);
            if (is_face_indices) {
              if (value < 0 || value >= static_cast<double>(declared_vertices))
                throw Error(Errc::index_out_of_range,
                            "face index " + std::to_string(static_cast<std::int64_t>(value)) + " out of range for " +
                                std::to_string(declared_vertices) + " vertices");
              face[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(value);
            }
          }
          continue;
        }

        const double value = cursor.read(prop.value_type);
        if (!is_vertex) continue;
        if (prop.name == "x") position.x() = value;
        else if (prop.name == "y") position.y() = value;
        else if (prop.name == "z") position.z() = value;
        else if (prop.name == "nx") { normal.x() = value; saw_normal = true; }
        else if (prop.name == "ny") { normal.y() = value; saw_normal = true; }
        else if (prop.name == "nz") { normal.z() = value; saw_normal = true; }
        else if (is_integer(prop.value_type) && prop.name == "red") { color[0] = value; saw_color = true; }
        else if (is_integer(prop.value_type) && prop.name == "green") { color[1] = value; saw_color = true; }
        else if (is_integer(prop.value_type) && prop.name == "blue") { color[2] = value; saw_color = true; }
      }

      if (is_vertex) {
        mesh.vertices.push_back(position);
        if (saw_normal) mesh.vertex_normals.push_back(normal);
        if (saw_color) {
          auto channel = [](double v) {
            return static_cast<std::uint8_t>(std::min(255.0, std::max(0.0, v)));
          };
          mesh.vertex_colors.push_back({channel(color[0]), channel(color[1]), channel(color[2])});
        }
      } else if (is_face) {
        mesh.faces.push_back(face);
      }
    }
  }

  return mesh;
}

Errc map_validation_code(const std::string& code) {
  if (code == "non_finite_vertex") return Errc::non_numeric_coordinate;
  if (code == "face_index_out_of_range") return Errc::index_out_of_range;
  return Errc::length_mismatch;
}

void append_double_le(std::string& out, double value) {
  std::uint64_t raw;
  std::memcpy(&raw, &value, sizeof raw);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((raw >> (8 * i)) & 0xFF));
}

void append_u32_le(std::string& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

TriangleMesh read_ply(const std::string& path) {
  const std::string data = slurp(path);
  const Header header = parse_header(data);

  TriangleMesh mesh = header.format == PlyFormat::binary_little_endian
                          ? read_payload(header, BinaryCursor(data, header.payload_offset))
                          : read_payload(header, AsciiCursor(data, header.payload_offset));
  return mesh;
}

void write_ply(const TriangleMesh& mesh, const std::string& path, PlyFormat format) {
  const ValidationReport report = validate_mesh(mesh);
  if (!report.ok())
    throw Error(map_validation_code(report.errors.front().code),
                "refusing to write invalid mesh: " + report.errors.front().message);

  std::string out;
  out += "ply\n";
  out += format == PlyFormat::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(mesh.vertex_count()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (mesh.has_normals()) out += "property double nx\nproperty double ny\nproperty double nz\n";
  if (mesh.has_colors()) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "element face " + std::to_string(mesh.face_count()) + "\n";
  out += "property list uchar uint vertex_indices\n";
  out += "end_header\n";

  if (format == PlyFormat::ascii) {
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const Vec3& v = mesh.vertices[i];
      out += format_g17(v.x()) + " " + format_g17(v.y()) + " " + format_g17(v.z());
      if (mesh.has_normals()) {
        const Vec3& n = mesh.vertex_normals[i];
        out += " " + format_g17(n.x()) + " " + format_g17(n.y()) + " " + format_g17(n.z());
      }
      if (mesh.has_colors()) {
        const Rgb& c = mesh.vertex_colors[i];
        out += " " + std::to_string(+c.r) + " " + std::to_string(+c.g) + " " + std::to_string(+c.b);
      }
      out += "\n";
    }
    for (const auto& face : mesh.faces) {
      out += "3 " + std::to_string(face[0]) + " " + std::to_string(face[1]) + " " + std::to_string(face[2]) + "\n";
    }
  } else {
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const Vec3& v = mesh.vertices[i];
      append_double_le(out, v.x());
      append_double_le(out, v.y());
      append_double_le(out, v.z());
      if (mesh.has_normals()) {
        const Vec3& n = mesh.vertex_normals[i];
        append_double_le(out, n.x());
        append_double_le(out, n.y());
        append_double_le(out, n.z());
      }
      if (mesh.has_colors()) {
        const Rgb& c = mesh.vertex_colors[i];
        out.push_back(static_cast<char>(c.r));
        out.push_back(static_cast<char>(c.g));
        out.push_back(static_cast<char>(c.b));
      }
    }
    for (const auto& face : mesh.faces) {
      out.push_back(3);
      append_u32_le(out, face[0]);
      append_u32_le(out, face[1]);
      append_u32_le(out, face[2]);
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::io_failure, "cannot open '" + path + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(Errc::io_failure, "write failed on '" + path + "'");
}

}  // namespace faceval
