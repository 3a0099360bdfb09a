#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "faceval/landmarks.hpp"

namespace faceval {

// One subject's landmark coordinate matrix (L x 3, millimetres).
struct Configuration {
  std::string subject_id;
  std::string method_tag;
  std::vector<std::string> names;  // optional; checked when present
  Eigen::MatrixXd points;         // L x 3

  Eigen::Index landmark_count() const { return points.rows(); }
};

Configuration make_configuration(const LandmarkSet& set);

// Square root of the summed squared landmark distances to the centroid.
double centroid_size(const Configuration& c);

struct RotationFit {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  bool rank_deficient = false;  // optimum ambiguous; smallest-angle pick returned
};

// Proper rotation (det +1) minimizing ||A*R - B||_F for centered matrices.
RotationFit orthogonal_procrustes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct GpaOptions {
  bool scale = true;      // normalize specimens to unit centroid size
  double tol = 1e-10;     // RMS consensus change per iteration
  int max_iter = 100;
};

// Superimposed sample. Aligned coordinates and the consensus are reported in
// the consensus' principal-axis frame, so the result does not depend on the
// original orientation of any input specimen.
struct GpaResult {
  std::vector<Configuration> aligned;
  Configuration consensus;
  std::vector<double> centroid_sizes;  // original sizes, input order
  int iterations = 0;
  bool converged = false;
};

GpaResult gpa(const std::vector<Configuration>& samples, const GpaOptions& options = {});

// Partial Procrustes distance between unit-size pre-shapes. Values below
// 1e-12 (superimposition noise) collapse to exactly zero.
double procrustes_distance(const Configuration& a, const Configuration& b);

// PD for every unordered specimen pair, lexicographic order (0,1), (0,2), ...
std::vector<double> pairwise_procrustes_distances(const GpaResult& g);

struct PermutationResult {
  double observed = 0.0;         // PD between group mean shapes
  std::vector<double> permuted;  // n_perm statistics
  double p_value = 1.0;          // (1 + #{permuted >= observed}) / (n_perm + 1)
  std::uint64_t seed = 0;
};

// Goodall-style test: joint GPA, then label shuffles that preserve group
// sizes. Deterministic for a fixed seed.
PermutationResult permutation_test_pd(const std::vector<Configuration>& group_a,
                                      const std::vector<Configuration>& group_b, int n_perm, std::uint64_t seed);

struct PcaResult {
  Eigen::MatrixXd scores;                  // N x K
  Eigen::MatrixXd components;              // K x 3L, orthonormal rows
  Eigen::RowVectorXd mean;                 // 3L, for reconstruction/projection
  std::vector<double> variance_explained;  // K, non-increasing
};

// PCA of mean-centered flattened Procrustes coordinates (row-major L x 3
// flattening). K = min(N - 1, 3L).
PcaResult pca(const std::vector<Configuration>& aligned);

// Strictly convex hull, CCW, starting at the lexicographically smallest
// vertex; collinear boundary points excluded.
std::vector<Eigen::Vector2d> convex_hull_2d(const std::vector<Eigen::Vector2d>& points);

double polygon_area(const std::vector<Eigen::Vector2d>& polygon);

// area(A intersect B) / area(A union B) for convex CCW polygons.
double polygon_iou(const std::vector<Eigen::Vector2d>& a, const std::vector<Eigen::Vector2d>& b);

struct CorrelationResult {
  double r = 0.0;
  double p_value = 1.0;  // two-sided, t distribution with n-2 dof
  std::size_t n = 0;
};

CorrelationResult pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace faceval
