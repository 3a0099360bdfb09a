#pragma once

#include <stdexcept>
#include <string>

namespace faceval {

// Every failure mode surfaced by the library. CLI maps these onto exit codes.
enum class Errc {
  // file I/O and parsing
  malformed_header,
  unsupported_format,
  index_out_of_range,
  truncated_payload,
  io_failure,
  duplicate_name,
  non_numeric_coordinate,
  too_few_landmarks,
  // geometry
  empty_point_set,
  no_faces,
  length_mismatch,
  empty_result,
  name_mismatch,
  degenerate_configuration,
  // statistics
  rank_deficient,
  group_too_small,
  zero_variance,
  degenerate_hull,
  zero_area,
  pair_name_mismatch,
  zero_denominator,
  coincident_landmarks,
  // pipeline
  missing_alignment_landmark,
  subject_mismatch,
  too_few_subjects,
  unknown_landmark_name,
  config_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace faceval
