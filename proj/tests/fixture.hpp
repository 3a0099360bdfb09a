#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "faceval/geom.hpp"
#include "faceval/landmark_io.hpp"
#include "faceval/pipeline.hpp"
#include "faceval/ply.hpp"
#include "faceval/synth.hpp"
#include "test_helpers.hpp"

namespace testutil {

// Synthetic cohort on disk: per-subject sphere meshes around the face region
// plus 21-landmark sets derived from the face template. Subjects carry a
// sex-style contrast (prn +x, sn -x for group M) strong enough that both the
// longer and shorter EDMA sets have >= 10 significant members.
struct EvaluationFixture {
  faceval::RunConfig config;
  std::filesystem::path root;
  std::vector<std::string> subject_ids;
};

inline EvaluationFixture make_self_comparison_fixture(const std::filesystem::path& root, int n_subjects,
                                                      std::uint64_t seed, double noise_sd = 0.05) {
  namespace fs = std::filesystem;
  using namespace faceval;

  fs::create_directories(root / "data");

  EvaluationFixture fixture;
  fixture.root = root;

  const Configuration base = face_template();
  const CounterRng rng(seed);

  RunConfig& config = fixture.config;
  config.ground_truth.tag = "SPG";
  MethodConfig copy_method;
  copy_method.tag = "COPY";

  for (int i = 0; i < n_subjects; ++i) {
    const std::string subject = "s" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    fixture.subject_ids.push_back(subject);
    const bool male = i % 2 == 0;

    Configuration specimen = base;
    specimen.subject_id = subject;
    specimen.method_tag = "SPG";
    const CounterRng stream = rng.stream(static_cast<std::uint64_t>(i));
    for (Eigen::Index l = 0; l < specimen.points.rows(); ++l)
      for (Eigen::Index d = 0; d < 3; ++d)
        specimen.points(l, d) += noise_sd * stream.normal(static_cast<std::uint64_t>(3 * l + d));
    if (male) {
      specimen.points.row(3) += Eigen::RowVector3d{3.0, 0.0, 0.0};   // prn
      specimen.points.row(4) += Eigen::RowVector3d{-3.0, 0.0, 0.0};  // sn
    }

    // Mesh: sphere inside the 100 mm crop ball around prn.
    TriangleMesh mesh = generate_test_mesh(TestMeshKind::sphere, 8, 40.0 + (i % 3));
    for (Vec3& v : mesh.vertices) v += Vec3{0.0, 0.0, 80.0};

    const fs::path mesh_path = root / "data" / ("mesh_" + subject + ".ply");
    const fs::path lmk_path = root / "data" / ("lmk_" + subject + ".json");
    write_ply(mesh, mesh_path.string(), PlyFormat::binary_little_endian);
    write_landmarks(to_landmark_set(specimen), lmk_path.string(), LandmarkFormat::json);

    config.ground_truth.subjects.push_back({subject, mesh_path.string(), lmk_path.string()});

    const fs::path mesh_copy = root / "data" / ("copy_mesh_" + subject + ".ply");
    const fs::path lmk_copy = root / "data" / ("copy_lmk_" + subject + ".json");
    fs::copy_file(mesh_path, mesh_copy, fs::copy_options::overwrite_existing);
    fs::copy_file(lmk_path, lmk_copy, fs::copy_options::overwrite_existing);
    copy_method.subjects.push_back({subject, mesh_copy.string(), lmk_copy.string()});

    config.grouping[subject] = male ? "M" : "F";
  }

  config.methods.push_back(copy_method);
  config.crop_radius_mm = 100.0;
  config.nose_tip_name = "prn";
  config.align_landmark_names = {"en_r", "en_l", "sn", "ch_r", "ch_l"};
  config.seed = seed;
  config.output_dir = (root / "out").string();
  return fixture;
}

}  // namespace testutil
