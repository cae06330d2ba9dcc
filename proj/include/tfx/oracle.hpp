#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tfx/operators.hpp"

namespace tfx {

// Ground-truth routes. Everything in this header recomputes its answer by
// direct enumeration, linear algebra, or graph search; none of it calls into
// the iteration engine, so agreement between the two is evidence, not an
// artifact of shared code.

// All fixed points of op by scanning the whole carrier, ascending element
// order. Throws TooLarge above 65536 elements.
std::vector<int> enumerate_fixpoints(const Operator& op, const FiniteLattice& lat);

// Least / greatest fixed point under the lattice order, straight off the
// enumerated set. Throws NoFixpoint when there is none, and also when fixed
// points exist but no single one is least (resp. greatest); that cannot
// happen for monotone operators.
int lfp_bruteforce(const Operator& op, const FiniteLattice& lat);
int gfp_bruteforce(const Operator& op, const FiniteLattice& lat);

// Finite labeled transition system over at most 16 states, so that state sets
// embed into a powerset lattice.
struct TransitionSystem {
  std::vector<std::string> states;
  std::vector<std::pair<int, int>> edges;
  std::map<std::string, int> labels;  // label -> state-set mask

  int state_by_name(const std::string& name) const;  // -1 when absent
};

TransitionSystem make_transition_system(std::vector<std::string> states,
                                        std::vector<std::pair<std::string, std::string>> edges,
                                        std::map<std::string, std::vector<std::string>> labels);

// States from which some path reaches the target label: the least solution of
// X = target ∪ pre(X), computed by saturating that equation over masks.
// Throws UnknownLabel for an undeclared label.
int mu_reachability(const TransitionSystem& ts, const std::string& target_label);

// Same set by breadth-first search along reversed edges; the third route,
// sharing nothing with mu_reachability but the struct.
int bfs_reachable(const TransitionSystem& ts, int target_mask);

// Closed-form fixed point of x -> Ax + b via LU decomposition of (I - A).
// Throws NoFixpoint when I - A is singular.
std::vector<double> affine_fixed_point(const AffineMap& f, int dim);

// Discretized-carrier fixed-point census over the grid {lo, lo+step, ...} per
// axis (points beyond hi are excluded).
struct GridSpec {
  double lo = -10.0;
  double hi = 10.0;
  double step = 0.5;
};

struct GridFixpointReport {
  std::uint64_t grid_points = 0;
  std::uint64_t near_fixed = 0;    // d(x, f(x)) <= tol
  std::uint64_t exact_fixed = 0;   // f(x) == x componentwise
  std::uint64_t clusters = 0;      // axis-connected groups of near-fixed cells
  // Distinct fixed points resolvable at this resolution: a contraction leaves
  // one near-fixed cluster, a map fixing many grid points exactly (identity)
  // shows them all, so the estimate is max(clusters, exact_fixed).
  std::uint64_t estimated_fixpoints = 0;
};

// Throws TooLarge when the grid exceeds 65536 points.
GridFixpointReport grid_fixpoint_scan(const Operator& op, GridSpec grid, double tol);

}  // namespace tfx
