#include "faceval/synth.hpp"

#include <cmath>

#include "faceval/error.hpp"
#include "faceval/rng.hpp"

namespace faceval {
namespace {

std::vector<Configuration> generate_group(const PopulationSpec& spec, const std::string& label,
                                          std::size_t group_size, std::size_t stream_offset) {
  const auto landmarks = spec.template_shape.landmark_count();
  const CounterRng master(spec.seed);

  std::vector<Configuration> group;
  group.reserve(group_size);
  for (std::size_t i = 0; i < group_size; ++i) {
    const CounterRng rng = master.stream(stream_offset + i);

    Configuration specimen = spec.template_shape;
    specimen.subject_id = label + std::to_string(i);
    for (Eigen::Index l = 0; l < landmarks; ++l)
      for (Eigen::Index d = 0; d < 3; ++d)
        specimen.points(l, d) += spec.noise_sd * rng.normal(static_cast<std::uint64_t>(l * 3 + d));

    for (const auto& effect : spec.effects) {
      if (effect.applies_to != label) continue;
      for (const auto& name : effect.target_landmarks) {
        Eigen::Index target = -1;
        for (std::size_t k = 0; k < specimen.names.size(); ++k) {
          if (specimen.names[k] == name) {
            target = static_cast<Eigen::Index>(k);
            break;
          }
        }
        if (target < 0) throw Error(Errc::unknown_landmark_name, "effect targets unknown landmark '" + name + "'");
        specimen.points.row(target) += effect.displacement.transpose();
      }
    }
    group.push_back(std::move(specimen));
  }
  return group;
}

}  // namespace

std::pair<std::vector<Configuration>, std::vector<Configuration>> generate_population(const PopulationSpec& spec) {
  if (spec.group_a_size < 2 || spec.group_b_size < 2)
    throw Error(Errc::group_too_small, "population groups need at least 2 specimens each");
  if (spec.noise_sd < 0.0) throw Error(Errc::config_error, "noise_sd must be non-negative");
  if (spec.template_shape.landmark_count() < 3)
    throw Error(Errc::too_few_landmarks, "template needs at least 3 landmarks");
  if (!spec.template_shape.points.allFinite())
    throw Error(Errc::non_numeric_coordinate, "template has non-finite coordinates");
  for (const auto& effect : spec.effects) {
    if (!effect.displacement.allFinite()) throw Error(Errc::config_error, "effect displacement must be finite");
  }

  return {generate_group(spec, "A", spec.group_a_size, 0),
          generate_group(spec, "B", spec.group_b_size, spec.group_a_size)};
}

TriangleMesh generate_test_mesh(TestMeshKind kind, int resolution, double extent) {
  if (resolution < 2) throw Error(Errc::config_error, "test mesh resolution must be >= 2");
  if (extent <= 0.0) throw Error(Errc::config_error, "test mesh extent must be positive");

  TriangleMesh mesh;
  if (kind == TestMeshKind::plane) {
    const int n = resolution;
    const double step = extent / static_cast<double>(n - 1);
    const double origin = -extent / 2.0;
    mesh.vertices.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        mesh.vertices.emplace_back(origin + i * step, origin + j * step, 0.0);

    const auto at = [n](int i, int j) { return static_cast<std::uint32_t>(j * n + i); };
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        mesh.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
        mesh.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
      }
    }
    return mesh;
  }

  // UV sphere of radius `extent`: `resolution` latitude bands, 2x longitude.
  const int stacks = resolution;
  const int slices = 2 * resolution;
  const double radius = extent;

  mesh.vertices.emplace_back(0.0, 0.0, radius);  // north pole
  for (int s = 1; s < stacks; ++s) {
    const double theta = M_PI * static_cast<double>(s) / static_cast<double>(stacks);
    for (int q = 0; q < slices; ++q) {
      const double phi = 2.0 * M_PI * static_cast<double>(q) / static_cast<double>(slices);
      mesh.vertices.emplace_back(radius * std::sin(theta) * std::cos(phi),
                                 radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta));
    }
  }
  mesh.vertices.emplace_back(0.0, 0.0, -radius);  // south pole
  const auto south = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
  const auto ring = [slices](int s, int q) {
    return static_cast<std::uint32_t>(1 + (s - 1) * slices + (q % slices));
  };

  for (int q = 0; q < slices; ++q) mesh.faces.push_back({0, ring(1, q), ring(1, q + 1)});
  for (int s = 1; s + 1 < stacks; ++s) {
    for (int q = 0; q < slices; ++q) {
      mesh.faces.push_back({ring(s, q), ring(s + 1, q), ring(s + 1, q + 1)});
      mesh.faces.push_back({ring(s, q), ring(s + 1, q + 1), ring(s, q + 1)});
    }
  }
  for (int q = 0; q < slices; ++q) mesh.faces.push_back({ring(stacks - 1, q + 1), ring(stacks - 1, q), south});
  return mesh;
}

}  // namespace faceval
