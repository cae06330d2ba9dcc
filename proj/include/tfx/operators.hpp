#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tfx/space.hpp"

namespace tfx {

// What the operator claims about itself. monotone is checkable exhaustively
// on small lattices, contraction by sampling on metric spaces; unchecked ops
// carry no claim and run without a precondition check (divergence studies
// need maps like x+1 that satisfy neither claim).
enum class OpKind { monotone, contraction, unchecked };

const char* op_kind_name(OpKind k);
OpKind op_kind_by_name(const std::string& name);  // ParseError on miss

// x -> A*x + b, row-major A, on a metric space of matching dimension.
struct AffineMap {
  std::vector<double> matrix;
  std::vector<double> offset;
};

// X -> X ∪ S / X -> X ∩ S on a powerset lattice.
struct UnionWith {
  int mask = 0;
};
struct IntersectWith {
  int mask = 0;
};

// X -> seed ∪ image(X) under the edge relation on the powerset base:
// post-image adds v for u in X with (u,v) an edge, pre-image adds u for v in
// X. The least fixed point from {} is exactly the reachability set, which is
// what makes this the workhorse for the modal-reachability cross-checks.
struct RelationImage {
  std::vector<std::pair<int, int>> edges;  // indices into the powerset base
  int seed_mask = 0;
  bool pre = false;
};

// Explicit element map on any finite lattice.
struct TableMap {
  std::vector<int> table;
};

struct IdentityMap {};

struct ConstantMap {
  State value;
};

// x -> min(succ(x), bound) on an ordinal space; the bound is the space's.
struct ClampSuccessor {};

// Arbitrary function of the right state shape. Engine-internal glue (composed
// outer maps, test fixtures); not expressible in scenario files.
struct CustomMap {
  std::function<State(const State&)> fn;
};

using OpFamily = std::variant<AffineMap, UnionWith, IntersectWith, RelationImage, TableMap,
                              IdentityMap, ConstantMap, ClampSuccessor, CustomMap>;

struct Operator {
  std::string name;
  const Space* space = nullptr;
  OpKind kind = OpKind::unchecked;
  double factor = 0.0;  // declared contraction factor, meaningful for contraction only
  OpFamily family;
  // Provenance of the precondition check that admitted this operator, written
  // by run_declared_check and copied into certificates. "none" until checked.
  std::string check_label = "none";

  // Must be pure: the check and oracle kernels apply operators concurrently.
  State apply(const State& x) const;
};

// Validates that the family fits the space (SpaceMismatch), that parameters
// are well-formed (ValidationError) and that a declared contraction factor
// lies in (0,1) (BadFactor). Does not run the behavioral checks; those live
// in checks.hpp and are invoked where an operator enters the system.
Operator make_operator(std::string name, const Space& space, OpKind kind, double factor,
                       OpFamily family);

// Labels the d_alpha column of traces and certificates.
struct DiscrepancyMeasure {
  std::string name;
  std::function<double(const State& x, const State& fx)> eval;
};

// Engine default: d(x, f(x)) under the space's distance, zero exactly at
// fixed points.
DiscrepancyMeasure step_residual_measure(const Space& s);

}  // namespace tfx
