#include "faceval/error.hpp"

namespace faceval {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::unsupported_format: return "UnsupportedFormat";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::truncated_payload: return "TruncatedPayload";
    case Errc::io_failure: return "IoFailure";
    case Errc::duplicate_name: return "DuplicateName";
    case Errc::non_numeric_coordinate: return "NonNumericCoordinate";
    case Errc::too_few_landmarks: return "TooFewLandmarks";
    case Errc::empty_point_set: return "EmptyPointSet";
    case Errc::no_faces: return "NoFaces";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::empty_result: return "EmptyResult";
    case Errc::name_mismatch: return "NameMismatch";
    case Errc::degenerate_configuration: return "DegenerateConfiguration";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::group_too_small: return "GroupTooSmall";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::degenerate_hull: return "DegenerateHull";
    case Errc::zero_area: return "ZeroArea";
    case Errc::pair_name_mismatch: return "PairNameMismatch";
    case Errc::zero_denominator: return "ZeroDenominator";
    case Errc::coincident_landmarks: return "CoincidentLandmarks";
    case Errc::missing_alignment_landmark: return "MissingAlignmentLandmark";
    case Errc::subject_mismatch: return "SubjectMismatch";
    case Errc::too_few_subjects: return "TooFewSubjects";
    case Errc::unknown_landmark_name: return "UnknownLandmarkName";
    case Errc::config_error: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace faceval
