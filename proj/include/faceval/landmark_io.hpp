#pragma once

#include <string>
#include <vector>

#include "faceval/landmarks.hpp"

namespace faceval {

enum class LandmarkFormat { csv, json };

// CSV requires the exact header `name,x,y,z`; JSON additionally carries
// subject_id and method_tag. The format is detected from the content.
LandmarkSet read_landmarks(const std::string& path);

// Returns warnings (CSV drops subject_id/method_tag, which is reported here).
std::vector<std::string> write_landmarks(const LandmarkSet& set, const std::string& path, LandmarkFormat format);

}  // namespace faceval
