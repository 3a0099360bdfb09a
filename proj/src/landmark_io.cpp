#include "faceval/landmark_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "faceval/error.hpp"

namespace faceval {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_failure, "read failed on '" + path + "'");
  return std::move(buf).str();
}

double parse_coordinate(const std::string& token, const std::string& context) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value))
    throw Error(Errc::non_numeric_coordinate, "bad coordinate '" + token + "' " + context);
  return value;
}

LandmarkSet parse_csv(const std::string& data) {
  LandmarkSet set;
  std::istringstream stream(data);
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;

  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);

    if (!have_header) {
      if (cells.size() != 4 || cells[0] != "name" || cells[1] != "x" || cells[2] != "y" || cells[3] != "z")
        throw Error(Errc::malformed_header, "landmark CSV must start with 'name,x,y,z'");
      have_header = true;
      continue;
    }

    if (cells.size() != 4)
      throw Error(Errc::non_numeric_coordinate, "line " + std::to_string(line_no) + " has " +
                                                    std::to_string(cells.size()) + " fields, expected 4");
    const std::string context = "on line " + std::to_string(line_no);
    set.names.push_back(cells[0]);
    set.points.emplace_back(parse_coordinate(cells[1], context), parse_coordinate(cells[2], context),
                            parse_coordinate(cells[3], context));
  }

  if (!have_header) throw Error(Errc::malformed_header, "empty landmark CSV");
  return set;
}

LandmarkSet parse_json(const std::string& data) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(data);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_header, std::string("bad landmark JSON: ") + e.what());
  }

  LandmarkSet set;
  try {
    set.subject_id = doc.value("subject_id", "");
    set.method_tag = doc.value("method_tag", "");
    if (!doc.contains("landmarks") || !doc["landmarks"].is_array())
      throw Error(Errc::malformed_header, "landmark JSON lacks a 'landmarks' array");
    for (const auto& entry : doc["landmarks"]) {
      set.names.push_back(entry.at("name").get<std::string>());
      const double x = entry.at("x").get<double>();
      const double y = entry.at("y").get<double>();
      const double z = entry.at("z").get<double>();
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
        throw Error(Errc::non_numeric_coordinate, "landmark '" + set.names.back() + "' is not finite");
      set.points.emplace_back(x, y, z);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_header, std::string("bad landmark JSON: ") + e.what());
  }
  return set;
}

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

LandmarkSet read_landmarks(const std::string& path) {
  const std::string data = slurp(path);

  std::size_t first = data.find_first_not_of(" \t\r\n");
  LandmarkSet set = (first != std::string::npos && data[first] == '{') ? parse_json(data) : parse_csv(data);
  check_landmark_set(set);
  return set;
}

std::vector<std::string> write_landmarks(const LandmarkSet& set, const std::string& path, LandmarkFormat format) {
  check_landmark_set(set);
  std::vector<std::string> warnings;

  std::string out;
  if (format == LandmarkFormat::csv) {
    if (!set.subject_id.empty() || !set.method_tag.empty())
      warnings.push_back("CSV format drops subject_id/method_tag; use JSON to keep them");
    out += "name,x,y,z\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
      const Vec3& p = set.points[i];
      out += set.names[i] + "," + format_g17(p.x()) + "," + format_g17(p.y()) + "," + format_g17(p.z()) + "\n";
    }
  } else {
    nlohmann::json doc;
    doc["subject_id"] = set.subject_id;
    doc["method_tag"] = set.method_tag;
    auto& landmarks = doc["landmarks"] = nlohmann::json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
      const Vec3& p = set.points[i];
      landmarks.push_back({{"name", set.names[i]}, {"x", p.x()}, {"y", p.y()}, {"z", p.z()}});
    }
    out = doc.dump(2);
    out += "\n";
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::io_failure, "cannot open '" + path + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(Errc::io_failure, "write failed on '" + path + "'");
  return warnings;
}

}  // namespace faceval
