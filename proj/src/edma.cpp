#include "faceval/edma.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "faceval/error.hpp"
#include "faceval/numeric.hpp"
#include "faceval/rng.hpp"

namespace faceval {
namespace {

void check_group(const std::vector<FormMatrix>& group, const char* which) {
  if (group.size() < 2)
    throw Error(Errc::group_too_small, std::string(which) + " group needs at least 2 subjects");
  for (const auto& form : group) {
    if (form.pair_names != group.front().pair_names)
      throw Error(Errc::pair_name_mismatch, "form matrices have different landmark pairs");
  }
}

std::vector<double> column_means(const std::vector<FormMatrix>& group, const std::vector<std::size_t>& rows) {
  std::vector<double> means(group.front().distances.size(), 0.0);
  for (std::size_t row : rows) {
    const auto& distances = group[row].distances;
    for (std::size_t k = 0; k < means.size(); ++k) means[k] += distances[k];
  }
  for (double& m : means) m /= static_cast<double>(rows.size());
  return means;
}

std::vector<std::size_t> identity_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

bool pair_less(const SignificantDistance& a, const SignificantDistance& b, bool descending) {
  if (a.ratio != b.ratio) return descending ? a.ratio > b.ratio : a.ratio < b.ratio;
  return a.pair < b.pair;
}

}  // namespace

FormMatrix form_matrix(const Configuration& c) {
  const auto landmarks = c.landmark_count();
  if (landmarks < 3) throw Error(Errc::too_few_landmarks, "form matrix needs at least 3 landmarks");

  FormMatrix form;
  form.subject_id = c.subject_id;
  form.method_tag = c.method_tag;
  form.pair_names.reserve(static_cast<std::size_t>(landmarks * (landmarks - 1) / 2));
  form.distances.reserve(form.pair_names.capacity());

  const auto name_of = [&](Eigen::Index i) {
    return c.names.empty() ? "lm" + std::to_string(i) : c.names[static_cast<std::size_t>(i)];
  };

  for (Eigen::Index i = 0; i < landmarks; ++i) {
    for (Eigen::Index j = i + 1; j < landmarks; ++j) {
      const double d = (c.points.row(i) - c.points.row(j)).norm();
      if (d == 0.0)
        throw Error(Errc::coincident_landmarks,
                    "landmarks '" + name_of(i) + "' and '" + name_of(j) + "' coincide");
      form.pair_names.emplace_back(name_of(i), name_of(j));
      form.distances.push_back(d);
    }
  }
  return form;
}

FormMatrix mean_form(const std::vector<FormMatrix>& group) {
  check_group(group, "mean-form");
  FormMatrix mean;
  mean.subject_id = "mean";
  mean.method_tag = group.front().method_tag;
  mean.pair_names = group.front().pair_names;
  mean.distances = column_means(group, identity_rows(group.size()));
  return mean;
}

std::vector<double> form_difference_matrix(const std::vector<FormMatrix>& group_a,
                                           const std::vector<FormMatrix>& group_b) {
  check_group(group_a, "numerator");
  check_group(group_b, "denominator");
  if (group_a.front().pair_names != group_b.front().pair_names)
    throw Error(Errc::pair_name_mismatch, "groups have different landmark pairs");

  const std::vector<double> mean_a = column_means(group_a, identity_rows(group_a.size()));
  const std::vector<double> mean_b = column_means(group_b, identity_rows(group_b.size()));

  std::vector<double> ratios(mean_a.size());
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (mean_b[k] == 0.0) throw Error(Errc::zero_denominator, "mean inter-landmark distance is zero");
    ratios[k] = mean_a[k] / mean_b[k];
  }
  return ratios;
}

FormDifferenceResult bootstrap_fdm(const std::vector<FormMatrix>& group_a, const std::vector<FormMatrix>& group_b,
                                   int n_boot, double alpha, std::uint64_t seed) {
  check_group(group_a, "numerator");
  check_group(group_b, "denominator");
  if (group_a.front().pair_names != group_b.front().pair_names)
    throw Error(Errc::pair_name_mismatch, "groups have different landmark pairs");
  if (n_boot < 1) throw Error(Errc::group_too_small, "n_boot must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::config_error, "alpha must be in (0, 1)");

  FormDifferenceResult result;
  result.pair_names = group_a.front().pair_names;
  result.ratios = form_difference_matrix(group_a, group_b);
  result.alpha = alpha;
  result.n_boot = n_boot;
  result.seed = seed;

  const std::size_t pairs = result.pair_names.size();
  const std::size_t n_a = group_a.size();
  const std::size_t n_b = group_b.size();

  // replicate-major storage: samples[pair][replicate]
  std::vector<std::vector<double>> samples(pairs, std::vector<double>(static_cast<std::size_t>(n_boot)));
  const CounterRng master(seed);
  std::vector<std::size_t> rows_a(n_a), rows_b(n_b);
  for (int rep = 0; rep < n_boot; ++rep) {
    const CounterRng rng = master.stream(static_cast<std::uint64_t>(rep));
    std::uint64_t counter = 0;
    for (std::size_t i = 0; i < n_a; ++i) rows_a[i] = rng.index(counter++, n_a);
    for (std::size_t i = 0; i < n_b; ++i) rows_b[i] = rng.index(counter++, n_b);

    const std::vector<double> mean_a = column_means(group_a, rows_a);
    const std::vector<double> mean_b = column_means(group_b, rows_b);
    for (std::size_t k = 0; k < pairs; ++k)
      samples[k][static_cast<std::size_t>(rep)] = mean_a[k] / mean_b[k];
  }

  result.ci_low.resize(pairs);
  result.ci_high.resize(pairs);
  for (std::size_t k = 0; k < pairs; ++k) {
    double low = quantile(samples[k], alpha / 2.0);
    double high = quantile(samples[k], 1.0 - alpha / 2.0);
    // The interval always brackets the point estimate.
    low = std::min(low, result.ratios[k]);
    high = std::max(high, result.ratios[k]);
    result.ci_low[k] = low;
    result.ci_high[k] = high;
  }
  return result;
}

SignificantDistanceSet significant_distances(const FormDifferenceResult& fdm) {
  SignificantDistanceSet set;
  for (std::size_t k = 0; k < fdm.pair_names.size(); ++k) {
    const SignificantDistance entry{fdm.pair_names[k], fdm.ratios[k], fdm.ci_low[k], fdm.ci_high[k]};
    if (entry.ci_low > 1.0) set.longer.push_back(entry);
    else if (entry.ci_high < 1.0) set.shorter.push_back(entry);
  }
  std::sort(set.longer.begin(), set.longer.end(),
            [](const SignificantDistance& a, const SignificantDistance& b) { return pair_less(a, b, true); });
  std::sort(set.shorter.begin(), set.shorter.end(),
            [](const SignificantDistance& a, const SignificantDistance& b) { return pair_less(a, b, false); });
  return set;
}

TopSets top_n(const SignificantDistanceSet& s, int n) {
  if (n < 1) throw Error(Errc::config_error, "top-n requires n >= 1");
  TopSets top;
  top.n_requested = n;
  const auto take = [n](const std::vector<SignificantDistance>& from) {
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(n), from.size());
    return std::vector<SignificantDistance>(from.begin(), from.begin() + static_cast<std::ptrdiff_t>(count));
  };
  top.longer = take(s.longer);
  top.shorter = take(s.shorter);
  return top;
}

MatchingDistances matching_distances(const TopSets& reference, const TopSets& method) {
  if (reference.n_requested != method.n_requested)
    throw Error(Errc::config_error, "top-n sets were built with different n");

  const auto overlap = [](const std::vector<SignificantDistance>& ref,
                          const std::vector<SignificantDistance>& other) {
    std::set<LandmarkPair> ref_pairs;
    for (const auto& entry : ref) ref_pairs.insert(entry.pair);
    std::size_t hits = 0;
    for (const auto& entry : other) hits += ref_pairs.count(entry.pair);
    return hits;
  };

  MatchingDistances md;
  const double n = reference.n_requested;
  md.longer_pct = 100.0 * static_cast<double>(overlap(reference.longer, method.longer)) / n;
  md.shorter_pct = 100.0 * static_cast<double>(overlap(reference.shorter, method.shorter)) / n;
  md.avg_pct = (md.longer_pct + md.shorter_pct) / 2.0;
  return md;
}

}  // namespace faceval
