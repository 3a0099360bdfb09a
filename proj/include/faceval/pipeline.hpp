#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "faceval/geom.hpp"
#include "faceval/landmarks.hpp"
#include "faceval/mesh.hpp"
#include "faceval/morpho.hpp"

namespace faceval {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct SubjectFiles {
  std::string subject_id;
  std::string mesh_path;
  std::string landmarks_path;
};

struct MethodConfig {
  std::string tag;
  std::vector<SubjectFiles> subjects;
};

// Mirrors the JSON config file; CLI flags override individual fields.
struct RunConfig {
  MethodConfig ground_truth;
  std::vector<MethodConfig> methods;

  double crop_radius_mm = 100.0;
  std::string nose_tip_name;
  std::vector<std::string> align_landmark_names;  // exactly 5
  bool align_allow_scale = true;
  std::string geom_direction = "method_to_gt";  // or "gt_to_method"

  GpaOptions gpa;
  int n_perm = 10000;
  int n_boot = 1000;
  double alpha = 0.10;
  std::vector<int> top_n_values = {5, 10};

  std::map<std::string, std::string> grouping;  // subject_id -> group label (2 labels)

  std::uint64_t seed = 0;
  std::string output_dir = "out";
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);
nlohmann::json run_config_to_json(const RunConfig& config);

// FNV-1a 64 over the canonical config serialization, hex encoded.
std::string config_hash(const RunConfig& config);

struct SubjectData {
  std::string subject_id;
  TriangleMesh mesh;
  LandmarkSet landmarks;
};

struct MethodData {
  std::string tag;
  std::vector<SubjectData> subjects;  // ground-truth subject order
};

struct PipelineData {
  MethodData ground_truth;
  std::vector<MethodData> methods;
};

// Reads every mesh/landmark file; verifies each method covers the
// ground-truth subject set.
PipelineData load_inputs(const RunConfig& config);

// Aligns each low-cost subject onto its ground-truth counterpart over the
// five named landmarks, crops both meshes at the ground-truth nose tip, and
// writes the normalized artifacts. Mutates `data` in place.
nlohmann::json cmd_align_crop(const RunConfig& config, PipelineData& data);

// Point-to-point stats and surface deviation per subject and pooled;
// writes colored deviation meshes and per-point CSVs.
nlohmann::json cmd_geom_compare(const RunConfig& config, const PipelineData& data);

// CS/PPD correlations, joint GPA + PCA morphospace with hull IoU, and the
// permutation-tested Procrustes distance, per method; writes PCA score CSVs.
nlohmann::json cmd_gpa_analyze(const RunConfig& config, const PipelineData& data);

// Per-method form-difference bootstrap between the two configured groups,
// significant distances, top-n sets and MD% against the ground truth.
nlohmann::json cmd_edma_compare(const RunConfig& config, const PipelineData& data);

// Full methodology run; writes <output_dir>/report.json and returns it.
nlohmann::json cmd_pipeline(const RunConfig& config);

}  // namespace faceval
