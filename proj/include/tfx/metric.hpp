#pragma once

#include <vector>

#include "tfx/errors.hpp"

namespace tfx {

enum class DistanceKind { euclidean, max };

const char* distance_name(DistanceKind k);
DistanceKind distance_by_name(const std::string& name);  // ParseError on miss

// R^dimension with the chosen distance. eq_tolerance is the space's equality
// threshold: points within it count as the same state.
struct MetricSpaceSpec {
  int dimension = 1;
  DistanceKind distance = DistanceKind::euclidean;
  double eq_tolerance = 1e-9;
};

double metric_distance(const MetricSpaceSpec& m, const std::vector<double>& a,
                       const std::vector<double>& b);

}  // namespace tfx
