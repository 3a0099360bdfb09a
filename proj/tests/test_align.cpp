#include <doctest.h>

#include <Eigen/Dense>

#include "faceval/error.hpp"
#include "faceval/geom.hpp"
#include "test_helpers.hpp"

using namespace faceval;

namespace {

double alignment_residual(const LandmarkSet& source, const LandmarkSet& target, const SimilarityTransform& t) {
  double ss = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) ss += (t.apply(source.points[i]) - target.points[i]).squaredNorm();
  return ss;
}

}  // namespace

TEST_CASE("similarity_align: identity for identical sets") {
  const LandmarkSet set = testutil::to_landmark_set(testutil::face_template());
  const SimilarityTransform t = similarity_align(set, set);
  CHECK((t.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(t.scale == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t.translation.norm() < 1e-10);
}

TEST_CASE("similarity_align: recovers a known similarity transform") {
  const LandmarkSet source = testutil::to_landmark_set(testutil::face_template());
  const CounterRng rng(901);

  for (std::uint64_t round = 0; round < 25; ++round) {
    SimilarityTransform truth;
    truth.rotation = testutil::random_rotation(rng, 100 * round);
    truth.scale = testutil::uniform_in(rng, 100 * round + 10, 0.3, 3.0);
    truth.translation = testutil::random_point(rng, 100 * round + 20, -80.0, 80.0);

    const LandmarkSet target = apply_transform(source, truth);
    const SimilarityTransform fit = similarity_align(source, target, true);

    REQUIRE((fit.rotation - truth.rotation).norm() < 1e-9);             // Frobenius
    REQUIRE(std::abs(fit.scale - truth.scale) / truth.scale < 1e-12);  // relative
    double rms = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i)
      rms += (fit.apply(source.points[i]) - target.points[i]).squaredNorm();
    rms = std::sqrt(rms / static_cast<double>(source.size()));
    REQUIRE(rms < 1e-9);
    REQUIRE((fit.rotation.transpose() * fit.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-9);
    REQUIRE(fit.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("similarity_align: rigid mode pins scale to one") {
  const LandmarkSet source = testutil::to_landmark_set(testutil::face_template());
  SimilarityTransform truth;
  truth.rotation = testutil::random_rotation(CounterRng(17), 0);
  truth.translation = {5.0, -3.0, 11.0};
  const LandmarkSet target = apply_transform(source, truth);

  const SimilarityTransform fit = similarity_align(source, target, false);
  CHECK(fit.scale == 1.0);
  CHECK((fit.rotation - truth.rotation).norm() < 1e-9);
}

TEST_CASE("similarity_align: reflection is never returned") {
  LandmarkSet source = testutil::to_landmark_set(testutil::face_template());
  LandmarkSet target = source;
  for (Vec3& p : target.points) p.x() = -p.x();  // mirrored face
  const SimilarityTransform fit = similarity_align(source, target);
  CHECK(fit.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("similarity_align: collinear landmarks are degenerate") {
  LandmarkSet line;
  line.names = {"a", "b", "c", "d"};
  for (int i = 0; i < 4; ++i) line.points.emplace_back(i * 2.0, i * 4.0, i * -1.0);
  CHECK_THROWS_WITH_AS(similarity_align(line, line), doctest::Contains("DegenerateConfiguration"), Error);
}

TEST_CASE("similarity_align: name mismatch is rejected") {
  const LandmarkSet a = testutil::to_landmark_set(testutil::face_template());
  LandmarkSet b = a;
  std::swap(b.names[0], b.names[1]);
  CHECK_THROWS_WITH_AS(similarity_align(a, b), doctest::Contains("NameMismatch"), Error);
}

TEST_CASE("similarity_align: residual is globally minimal under random perturbations") {
  const LandmarkSet source = testutil::to_landmark_set(testutil::face_template());
  const CounterRng rng(902);

  SimilarityTransform truth;
  truth.rotation = testutil::random_rotation(rng, 0);
  truth.scale = 1.4;
  truth.translation = {20.0, -10.0, 5.0};
  LandmarkSet target = apply_transform(source, truth);
  // Landmark noise so the optimum has a strictly positive residual.
  for (std::size_t i = 0; i < target.points.size(); ++i)
    target.points[i] += testutil::random_point(rng, 1000 + 3 * i, -0.8, 0.8);

  const SimilarityTransform fit = similarity_align(source, target);
  const double best = alignment_residual(source, target, fit);

  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    SimilarityTransform jittered = fit;
    const double magnitude = testutil::uniform_in(rng, 5000 + 10 * trial, 1e-4, 0.05);
    Eigen::Matrix3d nudge = Eigen::Matrix3d::Identity();
    const Vec3 axis_noise = testutil::random_point(rng, 5000 + 10 * trial + 1, -magnitude, magnitude);
    nudge(0, 1) -= axis_noise.z(); nudge(1, 0) += axis_noise.z();
    nudge(0, 2) += axis_noise.y(); nudge(2, 0) -= axis_noise.y();
    nudge(1, 2) -= axis_noise.x(); nudge(2, 1) += axis_noise.x();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(nudge * jittered.rotation,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    jittered.rotation = svd.matrixU() * svd.matrixV().transpose();
    jittered.scale *= 1.0 + testutil::uniform_in(rng, 5000 + 10 * trial + 4, -magnitude, magnitude);
    jittered.translation += testutil::random_point(rng, 5000 + 10 * trial + 5, -magnitude, magnitude);

    REQUIRE(alignment_residual(source, target, jittered) >= best - 1e-12);
  }
}

TEST_CASE("apply_transform: identity, inverse composition, translation") {
  const LandmarkSet set = testutil::to_landmark_set(testutil::face_template());
  const TriangleMesh mesh = testutil::random_mesh(903, 50, 30, false, true);

  SUBCASE("identity leaves inputs unchanged") {
    const SimilarityTransform id;
    CHECK(apply_transform(set, id) == set);
    CHECK(apply_transform(mesh, id) == mesh);
  }
  SUBCASE("applying T then T^-1 returns the original within 1e-9") {
    SimilarityTransform t;
    t.rotation = testutil::random_rotation(CounterRng(904), 0);
    t.scale = 2.25;
    t.translation = {4.0, 5.0, -6.0};
    const TriangleMesh back = apply_transform(apply_transform(mesh, t), t.inverse());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
      REQUIRE((back.vertices[i] - mesh.vertices[i]).norm() < 1e-9);
  }
  SUBCASE("pure translation shifts the centroid exactly") {
    SimilarityTransform t;
    t.translation = {1.5, -2.5, 3.5};
    const LandmarkSet moved = apply_transform(set, t);
    Vec3 before = Vec3::Zero(), after = Vec3::Zero();
    for (std::size_t i = 0; i < set.size(); ++i) {
      before += set.points[i];
      after += moved.points[i];
    }
    CHECK(((after - before) / set.size() - t.translation).norm() < 1e-12);
  }
  SUBCASE("rotation keeps normals unit length") {
    SimilarityTransform t;
    t.rotation = testutil::random_rotation(CounterRng(905), 0);
    t.scale = 3.0;
    const TriangleMesh moved = apply_transform(mesh, t);
    for (const Vec3& n : moved.vertex_normals) REQUIRE(n.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}
