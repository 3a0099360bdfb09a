#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "faceval/mesh.hpp"
#include "faceval/morpho.hpp"

namespace faceval {

// Displacement applied to named landmarks for one group's specimens.
struct EffectSpec {
  std::vector<std::string> target_landmarks;
  Vec3 displacement = Vec3::Zero();  // mm
  std::string applies_to;            // group label: "A" or "B"
};

struct PopulationSpec {
  Configuration template_shape;
  std::size_t group_a_size = 2;
  std::size_t group_b_size = 2;
  double noise_sd = 0.0;  // isotropic per-landmark Gaussian, mm
  std::vector<EffectSpec> effects;
  std::uint64_t seed = 0;
};

// Each specimen = template + N(0, noise_sd) per coordinate, plus the group's
// effect displacements. A pure function of the PopulationSpec (RNG pinned in
// rng.hpp), bit-identical across runs and platforms.
std::pair<std::vector<Configuration>, std::vector<Configuration>> generate_population(const PopulationSpec& spec);

enum class TestMeshKind { plane, sphere };

// Analytic fixtures: `plane` is a z = 0 grid (resolution^2 vertices over
// [-extent/2, extent/2]^2), `sphere` a UV sphere of radius `extent` with
// `resolution` latitude bands.
TriangleMesh generate_test_mesh(TestMeshKind kind, int resolution, double extent);

}  // namespace faceval
