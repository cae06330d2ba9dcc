#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfx/operators.hpp"

namespace tfx {

// Outcome of the exhaustive monotonicity scan. On failure (witness_x,
// witness_y) is the first comparable pair in row-major (x, y) order with
// x <= y but f(x) !<= f(y), regardless of thread count.
struct MonotoneResult {
  bool pass = false;
  std::uint64_t pairs_checked = 0;
  int witness_x = -1;
  int witness_y = -1;
};

// Scans every comparable pair. Throws SpaceMismatch unless op lives on a
// lattice space whose lattice is `lat`, TooLarge when the comparable pairs
// exceed 4096 (the scan is meant for small carriers; anything bigger needs a
// proof, not a scan).
MonotoneResult check_monotone(const Operator& op, const FiniteLattice& lat);

// Outcome of the sampled contraction check. On failure the witness pair is
// the first failing sample in draw order.
struct ContractionResult {
  bool pass = false;
  std::uint64_t samples = 0;
  std::vector<double> witness_x, witness_y;
  double witness_ratio = 0.0;
};

// Draws `samples` point pairs from [-box, box]^dim seeded deterministically
// and verifies d(f(x), f(y)) <= factor * d(x, y) + eq_tolerance on each.
// Throws BadFactor unless op declares a contraction (the factor itself was
// range-checked at construction), SpaceMismatch on the wrong space.
ContractionResult check_contraction(const Operator& op, const MetricSpaceSpec& m,
                                    std::uint64_t samples, std::uint64_t seed, double box = 10.0);

// Runs the check matching op's declared kind and stores a provenance label on
// the operator for certificates: "monotone-exhaustive",
// "contraction-sampled n=<samples> seed=<seed>", or "none" for unchecked
// operators and for declarations that admit no scan (ordinal-space
// operators). Throws ValidationError naming the witness when a check fails.
std::string run_declared_check(Operator& op, std::uint64_t samples, std::uint64_t seed);

namespace serial_ref {

// Independently coded serial twins of the kernels above (plus the lattice law
// scan and the fixed-point enumeration living in lattice.hpp / oracle.hpp).
// They exist so every parallel scan has a second implementation to disagree
// with in tests and benchmarks; keep them boring.
MonotoneResult check_monotone(const Operator& op, const FiniteLattice& lat);
ContractionResult check_contraction(const Operator& op, const MetricSpaceSpec& m,
                                    std::uint64_t samples, std::uint64_t seed, double box = 10.0);
std::optional<LawViolation> scan_lattice_laws(const FiniteLattice& lat);
std::vector<int> enumerate_fixpoints(const Operator& op, const FiniteLattice& lat);

}  // namespace serial_ref

}  // namespace tfx
