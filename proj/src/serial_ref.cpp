#include "tfx/checks.hpp"
#include "tfx/oracle.hpp"
#include "tfx/rng.hpp"

namespace tfx::serial_ref {

// Plain nested loops over the full carrier, testing comparability on the fly
// instead of materializing the pair list the parallel kernel scans.
MonotoneResult check_monotone(const Operator& op, const FiniteLattice& lat) {
  if (op.space == nullptr || !op.space->is_lattice() || &op.space->lattice() != &lat)
    fail(Errc::space_mismatch,
         "operator \"" + op.name + "\" does not live on the lattice being checked");

  const int n = lat.size();
  std::uint64_t comparable = 0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (lat.leq(x, y)) ++comparable;
  if (comparable > 4096)
    fail(Errc::too_large, "monotonicity scan over " + std::to_string(comparable) +
                              " comparable pairs exceeds the cap of 4096");

  MonotoneResult r;
  r.pairs_checked = comparable;
  for (int x = 0; x < n; ++x) {
    int fx = std::get<int>(op.apply(State{x}));
    for (int y = 0; y < n; ++y) {
      if (!lat.leq(x, y)) continue;
      int fy = std::get<int>(op.apply(State{y}));
      if (!lat.leq(fx, fy)) {
        r.witness_x = x;
        r.witness_y = y;
        return r;
      }
    }
  }
  r.pass = true;
  return r;
}

ContractionResult check_contraction(const Operator& op, const MetricSpaceSpec& m,
                                    std::uint64_t samples, std::uint64_t seed, double box) {
  if (op.space == nullptr || !op.space->is_metric() || &op.space->metric() != &m)
    fail(Errc::space_mismatch,
         "operator \"" + op.name + "\" does not live on the metric space being checked");
  if (op.kind != OpKind::contraction)
    fail(Errc::bad_factor, "operator \"" + op.name + "\" does not declare a contraction factor");

  Rng rng(seed);
  ContractionResult r;
  r.samples = samples;
  for (std::uint64_t i = 0; i < samples; ++i) {
    std::vector<double> x(m.dimension), y(m.dimension);
    for (double& v : x) v = rng.real(-box, box);
    for (double& v : y) v = rng.real(-box, box);
    double dxy = metric_distance(m, x, y);
    if (dxy == 0.0) continue;
    auto fx = std::get<std::vector<double>>(op.apply(State{x}));
    auto fy = std::get<std::vector<double>>(op.apply(State{y}));
    double dff = metric_distance(m, fx, fy);
    if (dff > op.factor * dxy + m.eq_tolerance) {
      r.witness_x = x;
      r.witness_y = y;
      r.witness_ratio = dff / dxy;
      return r;
    }
  }
  r.pass = true;
  return r;
}

std::optional<LawViolation> scan_lattice_laws(const FiniteLattice& lat) {
  const int n = lat.size();
  if (n > 512) fail(Errc::too_large, "law scan cap is 512 elements");

  for (int x = 0; x < n; ++x) {
    if (lat.join(x, x) != x) return LawViolation{"join idempotence", x};
    if (lat.meet(x, x) != x) return LawViolation{"meet idempotence", x};
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (lat.join(x, y) != lat.join(y, x)) return LawViolation{"join commutativity", x, y};
      if (lat.meet(x, y) != lat.meet(y, x)) return LawViolation{"meet commutativity", x, y};
      if (lat.join(x, lat.meet(x, y)) != x) return LawViolation{"join absorption", x, y};
      if (lat.meet(x, lat.join(x, y)) != x) return LawViolation{"meet absorption", x, y};
      bool le = lat.leq(x, y);
      if (le != (lat.join(x, y) == y) || le != (lat.meet(x, y) == x))
        return LawViolation{"order consistency", x, y};
    }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        if (lat.join(lat.join(x, y), z) != lat.join(x, lat.join(y, z)))
          return LawViolation{"join associativity", x, y, z};
        if (lat.meet(lat.meet(x, y), z) != lat.meet(x, lat.meet(y, z)))
          return LawViolation{"meet associativity", x, y, z};
      }
  return std::nullopt;
}

std::vector<int> enumerate_fixpoints(const Operator& op, const FiniteLattice& lat) {
  if (op.space == nullptr || !op.space->is_lattice() || &op.space->lattice() != &lat)
    fail(Errc::space_mismatch,
         "operator \"" + op.name + "\" does not live on the lattice being scanned");
  if (lat.size() > 65536) fail(Errc::too_large, "fixed-point scan cap is 65536 elements");

  std::vector<int> out;
  for (int e = 0; e < lat.size(); ++e)
    if (std::get<int>(op.apply(State{e})) == e) out.push_back(e);
  return out;
}

}  // namespace tfx::serial_ref
