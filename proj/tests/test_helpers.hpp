#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "faceval/landmarks.hpp"
#include "faceval/mesh.hpp"
#include "faceval/morpho.hpp"
#include "faceval/rng.hpp"

namespace testutil {

using faceval::CounterRng;
using faceval::Vec3;

// Fresh directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label) {
    base_ = std::filesystem::temp_directory_path() / ("faceval_" + label + "_" + std::to_string(counter_++));
    std::filesystem::remove_all(base_);
    std::filesystem::create_directories(base_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(base_, ec);
  }
  std::filesystem::path path(const std::string& name) const { return base_ / name; }
  const std::filesystem::path& root() const { return base_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path base_;
};

inline double uniform_in(const CounterRng& rng, std::uint64_t counter, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform(counter);
}

inline Vec3 random_point(const CounterRng& rng, std::uint64_t base, double lo = -50.0, double hi = 50.0) {
  return {uniform_in(rng, base, lo, hi), uniform_in(rng, base + 1, lo, hi), uniform_in(rng, base + 2, lo, hi)};
}

inline std::vector<Vec3> random_cloud(std::uint64_t seed, std::size_t n, double lo = -50.0, double hi = 50.0) {
  const CounterRng rng(seed);
  std::vector<Vec3> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) points.push_back(random_point(rng, 3 * i, lo, hi));
  return points;
}

inline faceval::TriangleMesh random_mesh(std::uint64_t seed, std::size_t vertices, std::size_t faces,
                                         bool colors = false, bool normals = false) {
  const CounterRng rng(seed);
  faceval::TriangleMesh mesh;
  mesh.vertices = random_cloud(seed, vertices);
  std::uint64_t counter = 1000000;
  for (std::size_t f = 0; f < faces; ++f) {
    const auto a = static_cast<std::uint32_t>(rng.index(counter++, vertices));
    const auto b = static_cast<std::uint32_t>(rng.index(counter++, vertices));
    const auto c = static_cast<std::uint32_t>(rng.index(counter++, vertices));
    mesh.faces.push_back({a, b, c});
  }
  if (colors) {
    for (std::size_t i = 0; i < vertices; ++i) {
      mesh.vertex_colors.push_back({static_cast<std::uint8_t>(rng.index(counter++, 256)),
                                    static_cast<std::uint8_t>(rng.index(counter++, 256)),
                                    static_cast<std::uint8_t>(rng.index(counter++, 256))});
    }
  }
  if (normals) {
    for (std::size_t i = 0; i < vertices; ++i) {
      Vec3 n = random_point(rng, counter, -1.0, 1.0);
      counter += 3;
      if (n.norm() == 0.0) n = {1.0, 0.0, 0.0};
      mesh.vertex_normals.push_back(n.normalized());
    }
  }
  return mesh;
}

// Rotation from three Euler-style angles; always proper (det +1).
inline Eigen::Matrix3d random_rotation(const CounterRng& rng, std::uint64_t base) {
  const double a = uniform_in(rng, base, 0.0, 2.0 * M_PI);
  const double b = uniform_in(rng, base + 1, 0.0, 2.0 * M_PI);
  const double c = uniform_in(rng, base + 2, 0.0, 2.0 * M_PI);
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  ry << std::cos(b), 0, std::sin(b), 0, 1, 0, -std::sin(b), 0, std::cos(b);
  rz << std::cos(c), -std::sin(c), 0, std::sin(c), std::cos(c), 0, 0, 0, 1;
  return rz * ry * rx;
}

// 21 plausible facial landmark names (9 midline + 6 bilateral pairs).
inline std::vector<std::string> face_landmark_names() {
  return {"g",    "n",    "se",   "prn",  "sn",   "sto",  "ls",   "li",   "pg",   "en_r", "en_l",
          "ex_r", "ex_l", "al_r", "al_l", "ch_r", "ch_l", "zy_r", "zy_l", "go_r", "go_l"};
}

// Face-like 21-landmark template (mm): x right, y up, z forward.
inline faceval::Configuration face_template() {
  faceval::Configuration c;
  c.subject_id = "template";
  c.method_tag = "synthetic";
  c.names = face_landmark_names();
  c.points.resize(21, 3);
  c.points << 0.0, 35.0, 105.0,    // g
      0.0, 28.0, 103.0,            // n
      0.0, 24.0, 102.0,            // se
      0.0, 0.0, 125.0,             // prn
      0.0, -10.0, 110.0,           // sn
      0.0, -28.0, 105.0,           // sto
      0.0, -24.0, 108.0,           // ls
      0.0, -33.0, 104.0,           // li
      0.0, -55.0, 100.0,           // pg
      16.0, 22.0, 95.0,            // en_r
      -16.0, 22.0, 95.0,           // en_l
      42.0, 20.0, 80.0,            // ex_r
      -42.0, 20.0, 80.0,           // ex_l
      17.0, -8.0, 103.0,           // al_r
      -17.0, -8.0, 103.0,          // al_l
      26.0, -27.0, 96.0,           // ch_r
      -26.0, -27.0, 96.0,          // ch_l
      55.0, 8.0, 55.0,             // zy_r
      -55.0, 8.0, 55.0,            // zy_l
      45.0, -40.0, 45.0,           // go_r
      -45.0, -40.0, 45.0;          // go_l
  return c;
}

inline faceval::LandmarkSet to_landmark_set(const faceval::Configuration& c) {
  faceval::LandmarkSet set;
  set.subject_id = c.subject_id;
  set.method_tag = c.method_tag;
  set.names = c.names;
  for (Eigen::Index i = 0; i < c.points.rows(); ++i) set.points.emplace_back(c.points.row(i).transpose());
  return set;
}

}  // namespace testutil
