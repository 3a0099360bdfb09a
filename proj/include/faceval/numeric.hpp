#pragma once

#include <vector>

namespace faceval {

// Linear-interpolation quantile (R type 7). `values` need not be sorted.
double quantile(std::vector<double> values, double q);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 when n < 2
};

MeanSd mean_sd(const std::vector<double>& values);

}  // namespace faceval
