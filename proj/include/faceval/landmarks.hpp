#pragma once

#include <string>
#include <vector>

#include "faceval/mesh.hpp"

namespace faceval {

// Named, ordered anatomical landmark configuration for one subject/method.
// Names are opaque identifiers; analyses require identical name sequences
// across the inputs they compare.
struct LandmarkSet {
  std::string subject_id;
  std::string method_tag;
  std::vector<std::string> names;
  std::vector<Vec3> points;  // same length as names, millimetres

  std::size_t size() const { return points.size(); }

  // Index of a name, or -1 when absent.
  int find(const std::string& name) const;
};

bool operator==(const LandmarkSet& a, const LandmarkSet& b);

// Throws on violated invariants: unique names, |names| == |points| >= 3,
// all coordinates finite.
void check_landmark_set(const LandmarkSet& set);

}  // namespace faceval
