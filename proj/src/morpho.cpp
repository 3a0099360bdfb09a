#include "faceval/morpho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "faceval/error.hpp"
#include "faceval/rng.hpp"

namespace faceval {
namespace {

constexpr double kZeroPd = 1e-12;

Eigen::MatrixXd centered(const Eigen::MatrixXd& points) {
  return points.rowwise() - points.colwise().mean();
}

void check_same_landmarks(const std::vector<Configuration>& samples) {
  const Eigen::Index landmarks = samples.front().landmark_count();
  const std::vector<std::string>* names = samples.front().names.empty() ? nullptr : &samples.front().names;
  for (const auto& c : samples) {
    if (c.landmark_count() != landmarks)
      throw Error(Errc::name_mismatch, "specimens have different landmark counts");
    if (names != nullptr && !c.names.empty() && c.names != *names)
      throw Error(Errc::name_mismatch, "specimens have different landmark name sequences");
  }
}

// Orientation canon: principal axes of the consensus with deterministic
// signs, right-handed. Applied to consensus and every aligned specimen so
// the output frame is a function of shape only.
Eigen::Matrix3d principal_frame(const Eigen::MatrixXd& consensus) {
  const Eigen::Matrix3d scatter = consensus.transpose() * consensus;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);  // ascending eigenvalues

  Eigen::Matrix3d axes;
  axes.col(0) = eig.eigenvectors().col(2);
  axes.col(1) = eig.eigenvectors().col(1);
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd proj = consensus * axes.col(j);
    Eigen::Index argmax = 0;
    proj.cwiseAbs().maxCoeff(&argmax);
    if (proj(argmax) < 0.0) axes.col(j) = -axes.col(j);
  }
  axes.col(2) = axes.col(0).cross(axes.col(1));
  return axes;
}

// Regularized incomplete beta, continued-fraction form.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 200;
  constexpr double kEps = 3e-14;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

Configuration make_configuration(const LandmarkSet& set) {
  check_landmark_set(set);
  Configuration c;
  c.subject_id = set.subject_id;
  c.method_tag = set.method_tag;
  c.names = set.names;
  c.points.resize(static_cast<Eigen::Index>(set.size()), 3);
  for (std::size_t i = 0; i < set.size(); ++i) c.points.row(static_cast<Eigen::Index>(i)) = set.points[i];
  return c;
}

double centroid_size(const Configuration& c) {
  if (c.landmark_count() < 3) throw Error(Errc::too_few_landmarks, "configuration needs at least 3 landmarks");
  if (!c.points.allFinite()) throw Error(Errc::non_numeric_coordinate, "configuration has non-finite coordinates");
  const double cs = centered(c.points).norm();
  if (cs == 0.0) throw Error(Errc::degenerate_configuration, "all landmarks coincident, centroid size is zero");
  return cs;
}

RotationFit orthogonal_procrustes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != 3 || b.cols() != 3)
    throw Error(Errc::length_mismatch, "matrices must both be L x 3 with equal L");

  const Eigen::Matrix3d m = a.transpose() * b;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d signs = Eigen::Vector3d::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) signs(2) = -1.0;

  RotationFit fit;
  fit.rotation = svd.matrixU() * signs.asDiagonal() * svd.matrixV().transpose();
  const auto& sv = svd.singularValues();
  fit.rank_deficient = sv(0) <= 0.0 || sv(1) <= 1e-12 * sv(0);
  return fit;
}

GpaResult gpa(const std::vector<Configuration>& samples, const GpaOptions& options) {
  if (samples.size() < 2) throw Error(Errc::group_too_small, "GPA needs at least 2 specimens");
  check_same_landmarks(samples);

  const std::size_t n = samples.size();
  const auto landmarks = samples.front().landmark_count();

  GpaResult result;
  result.centroid_sizes.reserve(n);

  std::vector<Eigen::MatrixXd> shapes;
  shapes.reserve(n);
  for (const auto& sample : samples) {
    Configuration probe = sample;
    result.centroid_sizes.push_back(centroid_size(probe));
    Eigen::MatrixXd shape = centered(sample.points);
    if (options.scale) shape /= result.centroid_sizes.back();
    shapes.push_back(std::move(shape));
  }

  Eigen::MatrixXd consensus = shapes.front();
  if (options.scale) consensus /= consensus.norm();

  std::vector<Eigen::MatrixXd> aligned(n);
  for (result.iterations = 1; result.iterations <= options.max_iter; ++result.iterations) {
    for (std::size_t i = 0; i < n; ++i) aligned[i] = shapes[i] * orthogonal_procrustes(shapes[i], consensus).rotation;

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(landmarks, 3);
    for (const auto& shape : aligned) next += shape;
    next /= static_cast<double>(n);
    next = centered(next);
    if (options.scale) next /= next.norm();

    const double change = (next - consensus).norm() / std::sqrt(static_cast<double>(landmarks));
    consensus = std::move(next);
    if (change < options.tol) {
      result.converged = true;
      break;
    }
  }
  if (result.iterations > options.max_iter) result.iterations = options.max_iter;

  // One more rotation pass so the aligned set matches the reported consensus,
  // then move everything into the consensus' principal frame.
  for (std::size_t i = 0; i < n; ++i) aligned[i] = shapes[i] * orthogonal_procrustes(shapes[i], consensus).rotation;
  const Eigen::Matrix3d frame = principal_frame(consensus);
  consensus *= frame;
  for (auto& shape : aligned) shape *= frame;

  result.aligned.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Configuration c = samples[i];
    c.points = std::move(aligned[i]);
    result.aligned.push_back(std::move(c));
  }
  result.consensus.subject_id = "consensus";
  result.consensus.method_tag = samples.front().method_tag;
  result.consensus.names = samples.front().names;
  result.consensus.points = std::move(consensus);
  return result;
}

double procrustes_distance(const Configuration& a, const Configuration& b) {
  if (a.landmark_count() != b.landmark_count())
    throw Error(Errc::length_mismatch, "configurations have different landmark counts");

  const Eigen::MatrixXd ac = centered(a.points);
  const Eigen::MatrixXd bc = centered(b.points);
  const double cs_a = ac.norm();
  const double cs_b = bc.norm();
  if (cs_a == 0.0 || cs_b == 0.0)
    throw Error(Errc::degenerate_configuration, "cannot take Procrustes distance of a zero-size configuration");

  const Eigen::MatrixXd a_pre = ac / cs_a;
  const Eigen::MatrixXd b_pre = bc / cs_b;
  const Eigen::Matrix3d rotation = orthogonal_procrustes(b_pre, a_pre).rotation;
  const double pd = (b_pre * rotation - a_pre).norm();
  return pd < kZeroPd ? 0.0 : pd;
}

std::vector<double> pairwise_procrustes_distances(const GpaResult& g) {
  const std::size_t n = g.aligned.size();
  std::vector<double> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(procrustes_distance(g.aligned[i], g.aligned[j]));
  return out;
}

PermutationResult permutation_test_pd(const std::vector<Configuration>& group_a,
                                      const std::vector<Configuration>& group_b, int n_perm, std::uint64_t seed) {
  if (group_a.size() < 2 || group_b.size() < 2)
    throw Error(Errc::group_too_small, "permutation test needs at least 2 specimens per group");
  if (n_perm < 1) throw Error(Errc::group_too_small, "n_perm must be positive");

  std::vector<Configuration> pooled = group_a;
  pooled.insert(pooled.end(), group_b.begin(), group_b.end());
  const GpaResult joint = gpa(pooled);

  const std::size_t n = pooled.size();
  const std::size_t n_a = group_a.size();
  const auto landmarks = pooled.front().landmark_count();

  const auto mean_shape_pd = [&](const std::vector<std::size_t>& order) {
    Eigen::MatrixXd mean_a = Eigen::MatrixXd::Zero(landmarks, 3);
    Eigen::MatrixXd mean_b = Eigen::MatrixXd::Zero(landmarks, 3);
    for (std::size_t k = 0; k < n; ++k) {
      if (k < n_a) mean_a += joint.aligned[order[k]].points;
      else mean_b += joint.aligned[order[k]].points;
    }
    Configuration a{"", "", {}, mean_a / static_cast<double>(n_a)};
    Configuration b{"", "", {}, mean_b / static_cast<double>(n - n_a)};
    return procrustes_distance(a, b);
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  PermutationResult result;
  result.seed = seed;
  result.observed = mean_shape_pd(order);

  const CounterRng master(seed);
  result.permuted.reserve(static_cast<std::size_t>(n_perm));
  std::size_t exceed = 0;
  for (int j = 0; j < n_perm; ++j) {
    const CounterRng rng = master.stream(static_cast<std::uint64_t>(j));
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t counter = 0;
    for (std::size_t k = n - 1; k > 0; --k)
      std::swap(order[k], order[rng.index(counter++, k + 1)]);

    const double stat = mean_shape_pd(order);
    result.permuted.push_back(stat);
    if (stat >= result.observed) ++exceed;
  }
  result.p_value =
      static_cast<double>(1 + exceed) / static_cast<double>(n_perm + 1);
  return result;
}

PcaResult pca(const std::vector<Configuration>& aligned) {
  if (aligned.size() < 3) throw Error(Errc::too_few_subjects, "PCA needs at least 3 specimens");
  check_same_landmarks(aligned);

  const auto n = static_cast<Eigen::Index>(aligned.size());
  const Eigen::Index landmarks = aligned.front().landmark_count();
  const Eigen::Index dim = 3 * landmarks;

  Eigen::MatrixXd data(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& points = aligned[static_cast<std::size_t>(i)].points;
    for (Eigen::Index l = 0; l < landmarks; ++l) data.block<1, 3>(i, 3 * l) = points.row(l);
  }

  PcaResult result;
  result.mean = data.colwise().mean();
  const Eigen::MatrixXd centered_data = data.rowwise() - result.mean;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered_data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index k = std::min<Eigen::Index>(n - 1, dim);

  result.scores = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal();
  result.components = svd.matrixV().leftCols(k).transpose();
  result.variance_explained.resize(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    const double s = svd.singularValues()(j);
    result.variance_explained[static_cast<std::size_t>(j)] = s * s / static_cast<double>(n - 1);
  }

  // Deterministic component signs: largest-magnitude loading is positive.
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index argmax = 0;
    result.components.row(j).cwiseAbs().maxCoeff(&argmax);
    if (result.components(j, argmax) < 0.0) {
      result.components.row(j) = -result.components.row(j);
      result.scores.col(j) = -result.scores.col(j);
    }
  }
  return result;
}

std::vector<Eigen::Vector2d> convex_hull_2d(const std::vector<Eigen::Vector2d>& points) {
  if (points.size() < 3) throw Error(Errc::degenerate_hull, "hull needs at least 3 points");

  std::vector<Eigen::Vector2d> sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a == b; }),
               sorted.end());

  const auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };

  // Monotone chain; popping on cross <= 0 keeps the hull strictly convex.
  std::vector<Eigen::Vector2d> hull(2 * sorted.size());
  std::size_t k = 0;
  for (const auto& p : sorted) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = sorted.rbegin() + 1; it != sorted.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0.0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);  // last point repeats the first

  if (hull.size() < 3) throw Error(Errc::degenerate_hull, "points are collinear");
  return hull;
}

double polygon_area(const std::vector<Eigen::Vector2d>& polygon) {
  double twice_area = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& p = polygon[i];
    const auto& q = polygon[(i + 1) % polygon.size()];
    twice_area += p.x() * q.y() - q.x() * p.y();
  }
  return twice_area / 2.0;
}

namespace {

// Sutherland-Hodgman clip of a convex subject polygon by a convex CCW clip
// polygon; exact for convex inputs.
std::vector<Eigen::Vector2d> clip_convex(std::vector<Eigen::Vector2d> subject,
                                         const std::vector<Eigen::Vector2d>& clip) {
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Eigen::Vector2d& a = clip[e];
    const Eigen::Vector2d& b = clip[(e + 1) % clip.size()];
    const auto side = [&](const Eigen::Vector2d& p) {
      return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    };

    std::vector<Eigen::Vector2d> output;
    output.reserve(subject.size() + 2);
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Eigen::Vector2d& current = subject[i];
      const Eigen::Vector2d& previous = subject[(i + subject.size() - 1) % subject.size()];
      const double side_current = side(current);
      const double side_previous = side(previous);

      const auto intersection = [&]() {
        const double t = side_previous / (side_previous - side_current);
        return Eigen::Vector2d(previous + t * (current - previous));
      };

      if (side_current >= 0.0) {
        if (side_previous < 0.0) output.push_back(intersection());
        output.push_back(current);
      } else if (side_previous >= 0.0) {
        output.push_back(intersection());
      }
    }
    subject = std::move(output);
  }
  return subject;
}

}  // namespace

double polygon_iou(const std::vector<Eigen::Vector2d>& a, const std::vector<Eigen::Vector2d>& b) {
  if (a.size() < 3 || b.size() < 3) throw Error(Errc::zero_area, "polygons need at least 3 vertices");
  const double area_a = polygon_area(a);
  const double area_b = polygon_area(b);
  if (area_a <= 0.0 || area_b <= 0.0)
    throw Error(Errc::zero_area, "polygons must be CCW with positive area");

  const std::vector<Eigen::Vector2d> overlap = clip_convex(a, b);
  double inter = overlap.size() >= 3 ? polygon_area(overlap) : 0.0;
  inter = std::clamp(inter, 0.0, std::min(area_a, area_b));

  const double union_area = area_a + area_b - inter;
  return std::clamp(inter / union_area, 0.0, 1.0);
}

CorrelationResult pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(Errc::length_mismatch, "samples have different lengths");
  if (x.size() < 3) throw Error(Errc::group_too_small, "correlation needs n >= 3");

  const auto n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::zero_variance, "a sample has zero variance");

  CorrelationResult result;
  result.n = x.size();
  result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

  const double df = n - 2.0;
  if (std::abs(result.r) >= 1.0) {
    result.p_value = 0.0;
  } else {
    const double t_sq = result.r * result.r * df / (1.0 - result.r * result.r);
    result.p_value = incomplete_beta(df / 2.0, 0.5, df / (df + t_sq));
  }
  return result;
}

}  // namespace faceval
