// Acceptance suite: runs every headline requirement end to end and prints
// one PASS/FAIL line per criterion, with wall-clock budgets enforced.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "faceval/edma.hpp"
#include "faceval/error.hpp"
#include "faceval/geom.hpp"
#include "faceval/kdtree.hpp"
#include "faceval/morpho.hpp"
#include "faceval/pipeline.hpp"
#include "faceval/ply.hpp"
#include "faceval/synth.hpp"
#include "fixture.hpp"
#include "test_helpers.hpp"

using namespace faceval;
using nlohmann::json;

namespace {

int failures = 0;

void criterion(const std::string& name, double budget_ms, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  const auto start = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    ok = false;
  }
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (elapsed > budget_ms) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  std::printf("[%s] %-34s %8.1f ms%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), elapsed,
              detail.empty() ? "" : "  -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// ---- criterion bodies ----

bool landmark_pair_count(std::string& detail) {
  const FormMatrix form = form_matrix(testutil::face_template());
  detail = std::to_string(form.distances.size()) + " pairs";
  return form.distances.size() == 210 && form.pair_names.size() == 210;
}

bool kdtree_oracle(std::string&) {
  const auto cloud = testutil::random_cloud(101, 1000);
  const SpatialIndex index(cloud);
  const auto queries = testutil::random_cloud(102, 500, -60.0, 60.0);
  for (const Vec3& q : queries) {
    std::size_t best_index = 0;
    double best_sq = (cloud[0] - q).squaredNorm();
    for (std::size_t i = 1; i < cloud.size(); ++i) {
      const double d_sq = (cloud[i] - q).squaredNorm();
      if (d_sq < best_sq) {
        best_sq = d_sq;
        best_index = i;
      }
    }
    const NearestHit hit = index.nearest(q);
    if (hit.index != best_index || hit.distance != std::sqrt(best_sq)) return false;
  }
  return true;
}

bool surface_deviation_oracle(std::string& detail) {
  const TriangleMesh source = testutil::random_mesh(111, 200, 80);
  const TriangleMesh target = testutil::random_mesh(112, 150, 500);
  const DeviationField field = surface_deviation(source, target);

  double worst = 0.0;
  for (std::size_t i = 0; i < source.vertices.size(); ++i) {
    double expected = std::numeric_limits<double>::infinity();
    for (const auto& face : target.faces) {
      expected = std::min(expected,
                          point_to_triangle_distance(source.vertices[i], target.vertices[face[0]],
                                                     target.vertices[face[1]], target.vertices[face[2]]));
    }
    worst = std::max(worst, std::abs(field.per_vertex[i] - expected));
  }
  detail = "max |impl - oracle| = " + std::to_string(worst) + " mm";
  return worst <= 1e-9;
}

bool alignment_recovery(std::string& detail) {
  const LandmarkSet source = testutil::to_landmark_set(testutil::face_template());
  const CounterRng rng(121);
  double worst_rot = 0.0, worst_scale = 0.0, worst_rms = 0.0;
  for (std::uint64_t round = 0; round < 20; ++round) {
    SimilarityTransform truth;
    truth.rotation = testutil::random_rotation(rng, 100 * round);
    truth.scale = testutil::uniform_in(rng, 100 * round + 10, 0.4, 2.5);
    truth.translation = testutil::random_point(rng, 100 * round + 20, -80.0, 80.0);
    const LandmarkSet target = apply_transform(source, truth);

    const SimilarityTransform fit = similarity_align(source, target, true);
    worst_rot = std::max(worst_rot, (fit.rotation - truth.rotation).norm());
    worst_scale = std::max(worst_scale, std::abs(fit.scale - truth.scale) / truth.scale);
    double ss = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i)
      ss += (fit.apply(source.points[i]) - target.points[i]).squaredNorm();
    worst_rms = std::max(worst_rms, std::sqrt(ss / static_cast<double>(source.size())));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "rot %.2e, scale %.2e, rms %.2e", worst_rot, worst_scale, worst_rms);
  detail = buf;
  return worst_rot < 1e-9 && worst_scale < 1e-12 && worst_rms < 1e-9;
}

bool gpa_invariance(std::string& detail) {
  PopulationSpec spec;
  spec.template_shape = testutil::face_template();
  spec.group_a_size = 82;
  spec.group_b_size = 2;
  spec.noise_sd = 2.0;
  spec.seed = 131;
  auto sample = generate_population(spec).first;

  const GpaResult base = gpa(sample);
  const double cs_error = std::abs(centroid_size(base.consensus) - 1.0);

  const CounterRng rng(132);
  double worst_rms = 0.0;
  for (std::size_t victim : {std::size_t{0}, std::size_t{40}, std::size_t{81}}) {
    auto moved = sample;
    Configuration& c = moved[victim];
    const Eigen::Matrix3d rotation = testutil::random_rotation(rng, victim * 10);
    const double scale = testutil::uniform_in(rng, victim * 10 + 4, 0.5, 2.0);
    const Vec3 shift = testutil::random_point(rng, victim * 10 + 5, -40.0, 40.0);
    c.points = scale * (c.points * rotation.transpose());
    c.points.rowwise() += shift.transpose();

    const GpaResult redone = gpa(moved);
    double ss = 0.0;
    std::size_t n_entries = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      ss += (base.aligned[i].points - redone.aligned[i].points).squaredNorm();
      n_entries += static_cast<std::size_t>(base.aligned[i].points.size());
    }
    worst_rms = std::max(worst_rms, std::sqrt(ss / static_cast<double>(n_entries)));
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "rms %.2e, |CS-1| %.2e", worst_rms, cs_error);
  detail = buf;
  return worst_rms < 1e-8 && cs_error <= 1e-12;
}

bool self_comparison_suite(std::string& detail) {
  testutil::TempDir dir("accept_self");
  auto fixture = testutil::make_self_comparison_fixture(dir.root(), 10, 141);
  const json report = cmd_pipeline(fixture.config);  // full defaults: n_perm 10000, n_boot 1000

  const json& pooled = report["geometric"]["COPY"]["point_to_point"]["pooled"];
  const json& morpho = report["morphometric"]["COPY"];
  bool ok = pooled["mean_mm"].get<double>() == 0.0 && pooled["max_mm"].get<double>() == 0.0;
  ok = ok && morpho["procrustes_distance"].get<double>() == 0.0;
  ok = ok && morpho["permutation"]["p_value"].get<double>() == 1.0;
  ok = ok && std::abs(morpho["centroid_size"]["r"].get<double>() - 1.0) <= 1e-12;
  ok = ok && std::abs(morpho["ppd"]["r"].get<double>() - 1.0) <= 1e-12;
  for (const char* n : {"5", "10"}) {
    const json& md = report["edma"]["methods"]["COPY"]["matching_vs_reference"][n];
    ok = ok && md["longer_pct"].get<double>() == 100.0 && md["shorter_pct"].get<double>() == 100.0 &&
         md["avg_pct"].get<double>() == 100.0;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "mean %.1e, PD %.1e, p %.3f, r_cs %.12f, MD10 %.0f",
                pooled["mean_mm"].get<double>(), morpho["procrustes_distance"].get<double>(),
                morpho["permutation"]["p_value"].get<double>(), morpho["centroid_size"]["r"].get<double>(),
                report["edma"]["methods"]["COPY"]["matching_vs_reference"]["10"]["avg_pct"].get<double>());
  detail = buf;
  return ok;
}

std::vector<double> calibration_p_values() {
  std::vector<double> p_values;
  for (int rep = 0; rep < 200; ++rep) {
    PopulationSpec spec;
    spec.template_shape = testutil::face_template();
    spec.group_a_size = 20;
    spec.group_b_size = 20;
    spec.noise_sd = 2.0;
    spec.seed = 151000 + static_cast<std::uint64_t>(rep);
    const auto [group_a, group_b] = generate_population(spec);
    p_values.push_back(permutation_test_pd(group_a, group_b, 999, 9000 + static_cast<std::uint64_t>(rep)).p_value);
  }
  return p_values;
}

std::vector<double> g_calibration;  // shared between the two permutation criteria

bool permutation_calibration(std::string& detail) {
  g_calibration = calibration_p_values();
  int rejected = 0;
  for (double p : g_calibration)
    if (p < 0.05) ++rejected;
  const double rate = rejected / 200.0;
  detail = "rejection rate " + std::to_string(rate);
  return rate >= 0.02 && rate <= 0.09;
}

bool permutation_uniformity(std::string& detail) {
  std::vector<double> sorted = g_calibration;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    ks = std::max(ks, std::abs((i + 1) / n - sorted[i]));
    ks = std::max(ks, std::abs(i / n - sorted[i]));
  }
  detail = "sup |ecdf - uniform| = " + std::to_string(ks);
  return ks < 0.1;
}

// Synthetic template for the EDMA recovery criterion: nose tip at the
// origin, ten landmarks per side on golden-angle cap spirals, 9-16 mm out
// with strong x-components. Every nose-tip pair ratio moves > 12% under a
// 3 mm displacement while same-side landmarks stay several mm apart, so
// noise on short null pairs cannot crowd the top-10.
Configuration edma_template() {
  Configuration c;
  c.subject_id = "template";
  c.method_tag = "synthetic";
  c.names.push_back("prn");
  std::vector<Vec3> points{{0.0, 0.0, 0.0}};
  const double golden = 2.39996322972865332;
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    for (int i = 0; i < 10; ++i) {
      const double ux = (0.97 - side * 0.01) - (0.25 - side * 0.01) * i / 9.0;
      const double lateral = std::sqrt(1.0 - ux * ux);
      const double psi = golden * i + side * 1.1;
      const double radius = (9.0 + side * 0.4) + 0.75 * i;
      c.names.push_back((side == 0 ? "r" : "l") + std::to_string(i));
      points.emplace_back(sign * radius * ux, radius * lateral * std::cos(psi),
                          radius * lateral * std::sin(psi));
    }
  }
  c.points.resize(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) c.points.row(static_cast<Eigen::Index>(i)) = points[i];
  return c;
}

bool edma_effect_recovery(std::string& detail) {
  const Configuration base = edma_template();
  const Vec3 displacement{3.0, 0.0, 0.0};

  // Analytic truth: ratios between the displaced and plain templates.
  Configuration displaced = base;
  displaced.points.row(0) += displacement.transpose();
  const FormMatrix form_plain = form_matrix(base);
  const FormMatrix form_moved = form_matrix(displaced);

  FormDifferenceResult truth;
  truth.pair_names = form_plain.pair_names;
  truth.ratios.resize(form_plain.distances.size());
  truth.ci_low.resize(form_plain.distances.size());
  truth.ci_high.resize(form_plain.distances.size());
  std::vector<LandmarkPair> expected_significant;
  for (std::size_t k = 0; k < form_plain.distances.size(); ++k) {
    truth.ratios[k] = form_moved.distances[k] / form_plain.distances[k];
    truth.ci_low[k] = truth.ratios[k];
    truth.ci_high[k] = truth.ratios[k];
    if (std::abs(truth.ratios[k] - 1.0) > 0.05) expected_significant.push_back(truth.pair_names[k]);
  }
  const TopSets analytic_top = top_n(significant_distances(truth), 10);

  // Recovered from a noisy population.
  PopulationSpec spec;
  spec.template_shape = base;
  spec.group_a_size = 40;
  spec.group_b_size = 40;
  spec.noise_sd = 1.0;
  spec.effects.push_back({{"prn"}, displacement, "A"});
  spec.seed = 161;
  const auto [group_a, group_b] = generate_population(spec);

  std::vector<FormMatrix> forms_a, forms_b;
  for (const auto& s : group_a) forms_a.push_back(form_matrix(s));
  for (const auto& s : group_b) forms_b.push_back(form_matrix(s));
  const FormDifferenceResult fdm = bootstrap_fdm(forms_a, forms_b, 1000, 0.10, 162);
  const SignificantDistanceSet significant = significant_distances(fdm);

  std::set<LandmarkPair> found;
  for (const auto& e : significant.longer) found.insert(e.pair);
  for (const auto& e : significant.shorter) found.insert(e.pair);
  std::size_t hits = 0;
  for (const auto& pair : expected_significant) hits += found.count(pair);

  const MatchingDistances md = matching_distances(analytic_top, top_n(significant, 10));

  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu/%zu true pairs significant, avg MD %.0f%%", hits,
                expected_significant.size(), md.avg_pct);
  detail = buf;
  return hits == expected_significant.size() && md.avg_pct >= 80.0;
}

bool iou_closed_form(std::string& detail) {
  using Eigen::Vector2d;
  const std::vector<Vector2d> unit = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Vector2d> shifted = {{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}};
  const std::vector<Vector2d> far = {{9, 9}, {10, 9}, {10, 10}, {9, 10}};

  const double overlap = polygon_iou(unit, shifted);
  detail = "IoU(shifted) = " + std::to_string(overlap);
  return std::abs(overlap - 1.0 / 3.0) <= 1e-12 && polygon_iou(unit, unit) == 1.0 && polygon_iou(unit, far) == 0.0;
}

bool pipeline_determinism(std::string&) {
  testutil::TempDir dir("accept_det");
  auto fixture = testutil::make_self_comparison_fixture(dir.root(), 6, 171);
  fixture.config.n_perm = 2000;
  fixture.config.n_boot = 500;

  json first = cmd_pipeline(fixture.config);
  json second = cmd_pipeline(fixture.config);
  first["provenance"]["generated_at"] = "";
  second["provenance"]["generated_at"] = "";
  return first.dump() == second.dump();
}

bool ply_round_trip(std::string&) {
  testutil::TempDir dir("accept_ply");
  const TriangleMesh mesh = testutil::random_mesh(181, 10000, 5000, true);
  const std::string path = dir.path("m.ply").string();
  write_ply(mesh, path, PlyFormat::binary_little_endian);
  return read_ply(path) == mesh;
}

}  // namespace

int main() {
  std::printf("faceval acceptance suite\n");
  criterion("landmark-pair-count", 1000, landmark_pair_count);
  criterion("kdtree-oracle", 1000, kdtree_oracle);
  criterion("surface-deviation-oracle", 5000, surface_deviation_oracle);
  criterion("alignment-recovery", 1000, alignment_recovery);
  criterion("gpa-invariance", 1000, gpa_invariance);
  criterion("self-comparison-identity", 30000, self_comparison_suite);
  criterion("permutation-calibration", 300000, permutation_calibration);
  criterion("permutation-uniformity", 1000, permutation_uniformity);
  criterion("edma-effect-recovery", 120000, edma_effect_recovery);
  criterion("iou-closed-form", 1000, iou_closed_form);
  criterion("pipeline-determinism", 60000, pipeline_determinism);
  criterion("ply-round-trip", 1000, ply_round_trip);

  if (failures != 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
