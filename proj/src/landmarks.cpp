#include "faceval/landmarks.hpp"

#include <set>

#include "faceval/error.hpp"

namespace faceval {

int LandmarkSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

bool operator==(const LandmarkSet& a, const LandmarkSet& b) {
  if (a.subject_id != b.subject_id || a.method_tag != b.method_tag) return false;
  if (a.names != b.names) return false;
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (a.points[i] != b.points[i]) return false;
  return true;
}

void check_landmark_set(const LandmarkSet& set) {
  if (set.names.size() != set.points.size())
    throw Error(Errc::length_mismatch, std::to_string(set.names.size()) + " names for " +
                                           std::to_string(set.points.size()) + " points");
  if (set.size() < 3)
    throw Error(Errc::too_few_landmarks, "need at least 3 landmarks, got " + std::to_string(set.size()));
  std::set<std::string> seen;
  for (const auto& name : set.names) {
    if (!seen.insert(name).second) throw Error(Errc::duplicate_name, "landmark name '" + name + "' repeated");
  }
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    if (!set.points[i].allFinite())
      throw Error(Errc::non_numeric_coordinate, "landmark '" + set.names[i] + "' has a NaN or infinite coordinate");
  }
}

}  // namespace faceval
