#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "faceval/morpho.hpp"

namespace faceval {

using LandmarkPair = std::pair<std::string, std::string>;

// All C(L,2) inter-landmark distances of one configuration, lexicographic
// pair order (0,1), (0,2), ..., raw millimetres (no scale normalization).
struct FormMatrix {
  std::string subject_id;
  std::string method_tag;
  std::vector<LandmarkPair> pair_names;
  std::vector<double> distances;
};

FormMatrix form_matrix(const Configuration& c);

FormMatrix mean_form(const std::vector<FormMatrix>& group);

// ratio_k = mean_form(group_a)_k / mean_form(group_b)_k
std::vector<double> form_difference_matrix(const std::vector<FormMatrix>& group_a,
                                           const std::vector<FormMatrix>& group_b);

struct FormDifferenceResult {
  std::vector<LandmarkPair> pair_names;
  std::vector<double> ratios;
  std::vector<double> ci_low;   // percentile bootstrap, widened to hold the ratio
  std::vector<double> ci_high;
  double alpha = 0.10;
  int n_boot = 1000;
  std::uint64_t seed = 0;
};

// Resamples subjects with replacement within each group; per-pair percentile
// interval [alpha/2, 1 - alpha/2]. Deterministic for a fixed seed.
FormDifferenceResult bootstrap_fdm(const std::vector<FormMatrix>& group_a, const std::vector<FormMatrix>& group_b,
                                   int n_boot, double alpha, std::uint64_t seed);

struct SignificantDistance {
  LandmarkPair pair;
  double ratio = 1.0;
  double ci_low = 1.0;
  double ci_high = 1.0;
};

// Pairs whose CI excludes 1: `longer` descending by ratio, `shorter`
// ascending; ratio ties broken by pair name.
struct SignificantDistanceSet {
  std::vector<SignificantDistance> longer;
  std::vector<SignificantDistance> shorter;
};

SignificantDistanceSet significant_distances(const FormDifferenceResult& fdm);

struct TopSets {
  int n_requested = 0;
  std::vector<SignificantDistance> longer;   // first min(n, available)
  std::vector<SignificantDistance> shorter;
};

TopSets top_n(const SignificantDistanceSet& s, int n);

// Table-2 style percentages: overlap of the method's top-n pairs with the
// reference's, divided by the requested n.
struct MatchingDistances {
  double longer_pct = 0.0;
  double shorter_pct = 0.0;
  double avg_pct = 0.0;
};

MatchingDistances matching_distances(const TopSets& reference, const TopSets& method);

}  // namespace faceval
