#include "tfx/checks.hpp"

#include <limits>

#include "tfx/rng.hpp"

namespace tfx {

namespace {

constexpr std::uint64_t kMonotonePairCap = 4096;

void require_on_lattice(const Operator& op, const FiniteLattice& lat) {
  if (op.space == nullptr || !op.space->is_lattice() || &op.space->lattice() != &lat)
    fail(Errc::space_mismatch,
         "operator \"" + op.name + "\" does not live on the lattice being checked");
}

// Comparable pairs of a powerset are exactly the (X, Y) with X subset of Y:
// 3^base many, countable without touching the carrier.
std::uint64_t count_comparable(const FiniteLattice& lat) {
  if (lat.is_powerset()) {
    std::uint64_t c = 1;
    for (std::size_t i = 0; i < lat.powerset_base->size(); ++i) c *= 3;
    return c;
  }
  const int n = lat.size();
  std::uint64_t c = 0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (lat.leq(x, y)) ++c;
  return c;
}

}  // namespace

MonotoneResult check_monotone(const Operator& op, const FiniteLattice& lat) {
  require_on_lattice(op, lat);
  const std::uint64_t comparable = count_comparable(lat);
  if (comparable > kMonotonePairCap)
    fail(Errc::too_large, "monotonicity scan over " + std::to_string(comparable) +
                              " comparable pairs exceeds the cap of " +
                              std::to_string(kMonotonePairCap));

  const int n = lat.size();
  std::vector<int> image(n);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < n; ++e) image[e] = std::get<int>(op.apply(State{e}));

  // Materialize comparable pairs in row-major order so the witness index is
  // the same whatever the thread count.
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(comparable);
  if (lat.is_powerset()) {
    for (int x = 0; x < n; ++x) {
      // Supersets of x in increasing order: y runs through x | t for every
      // submask t of ~x, and (y - x) grows monotonically under this step.
      int rest = ~x & (n - 1);
      for (int t = 0;; t = (t - rest) & rest) {
        pairs.emplace_back(x, x | t);
        if (t == rest) break;
      }
    }
  } else {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (lat.leq(x, y)) pairs.emplace_back(x, y);
  }

  constexpr long long kNone = std::numeric_limits<long long>::max();
  long long first = kNone;
#pragma omp parallel for schedule(static) reduction(min : first)
  for (long long i = 0; i < static_cast<long long>(pairs.size()); ++i) {
    auto [x, y] = pairs[static_cast<std::size_t>(i)];
    if (!lat.leq(image[x], image[y])) first = std::min(first, i);
  }

  MonotoneResult r;
  r.pairs_checked = pairs.size();
  if (first == kNone) {
    r.pass = true;
  } else {
    r.witness_x = pairs[static_cast<std::size_t>(first)].first;
    r.witness_y = pairs[static_cast<std::size_t>(first)].second;
  }
  return r;
}

namespace {

// Sample layout shared by the parallel and serial contraction checks: points
// are drawn serially up front so the draw order (and hence every witness) is
// seed-determined, never thread-determined.
std::vector<double> draw_points(std::uint64_t samples, int dim, std::uint64_t seed, double box) {
  Rng rng(seed);
  std::vector<double> pts(2 * samples * static_cast<std::uint64_t>(dim));
  for (double& v : pts) v = rng.real(-box, box);
  return pts;
}

void require_contraction(const Operator& op, const MetricSpaceSpec& m) {
  if (op.space == nullptr || !op.space->is_metric() || &op.space->metric() != &m)
    fail(Errc::space_mismatch,
         "operator \"" + op.name + "\" does not live on the metric space being checked");
  if (op.kind != OpKind::contraction)
    fail(Errc::bad_factor, "operator \"" + op.name + "\" does not declare a contraction factor");
}

}  // namespace

ContractionResult check_contraction(const Operator& op, const MetricSpaceSpec& m,
                                    std::uint64_t samples, std::uint64_t seed, double box) {
  require_contraction(op, m);
  const int dim = m.dimension;
  const std::vector<double> pts = draw_points(samples, dim, seed, box);

  constexpr long long kNone = std::numeric_limits<long long>::max();
  long long first = kNone;
#pragma omp parallel for schedule(static) reduction(min : first)
  for (long long i = 0; i < static_cast<long long>(samples); ++i) {
    const double* px = pts.data() + static_cast<std::size_t>(2 * i) * dim;
    std::vector<double> x(px, px + dim), y(px + dim, px + 2 * dim);
    double dxy = metric_distance(m, x, y);
    if (dxy == 0.0) continue;
    std::vector<double> fx = std::get<std::vector<double>>(op.apply(State{x}));
    std::vector<double> fy = std::get<std::vector<double>>(op.apply(State{y}));
    if (metric_distance(m, fx, fy) > op.factor * dxy + m.eq_tolerance) first = std::min(first, i);
  }

  ContractionResult r;
  r.samples = samples;
  if (first == kNone) {
    r.pass = true;
    return r;
  }
  const double* px = pts.data() + static_cast<std::size_t>(2 * first) * dim;
  r.witness_x.assign(px, px + dim);
  r.witness_y.assign(px + dim, px + 2 * dim);
  double dxy = metric_distance(m, r.witness_x, r.witness_y);
  std::vector<double> fx = std::get<std::vector<double>>(op.apply(State{r.witness_x}));
  std::vector<double> fy = std::get<std::vector<double>>(op.apply(State{r.witness_y}));
  r.witness_ratio = metric_distance(m, fx, fy) / dxy;
  return r;
}

std::string run_declared_check(Operator& op, std::uint64_t samples, std::uint64_t seed) {
  std::string label = "none";
  switch (op.kind) {
    case OpKind::unchecked:
      break;
    case OpKind::monotone: {
      if (!op.space->is_lattice()) break;  // ordinal-space claims admit no scan
      MonotoneResult r = check_monotone(op, op.space->lattice());
      if (!r.pass)
        fail(Errc::validation_error,
             "operator \"" + op.name + "\" is not monotone: f(" +
                 op.space->lattice().names[r.witness_x] + ") !<= f(" +
                 op.space->lattice().names[r.witness_y] + ")");
      label = "monotone-exhaustive";
      break;
    }
    case OpKind::contraction: {
      ContractionResult r = check_contraction(op, op.space->metric(), samples, seed);
      if (!r.pass)
        fail(Errc::validation_error,
             "operator \"" + op.name + "\" violates its contraction factor " +
                 render_double(op.factor) + ": observed ratio " + render_double(r.witness_ratio));
      label = "contraction-sampled n=" + std::to_string(samples) + " seed=" + std::to_string(seed);
      break;
    }
  }
  op.check_label = label;
  return label;
}

}  // namespace tfx
