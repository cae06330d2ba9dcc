#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfx/operators.hpp"
#include "tfx/ordinal.hpp"

namespace tfx {

// Lattice and ordinal spaces compare states exactly; metric spaces within the
// space's eq_tolerance.
enum class CheckMode { exact, tolerant };
const char* check_mode_name(CheckMode m);

struct EngineLimits {
  // Stages strictly beyond the budget are never evaluated.
  Ordinal budget = nat_scale(Ordinal::omega(), Nat(10));
  // Successor samples spent on one limit stage before giving up on it.
  std::uint64_t limit_cap = 100000;
  // Consecutive agreeing samples required to accept a limit value.
  int agreement_window = 2;
  // Successor steps taken inside a segment before the ordinal-space
  // sup-extrapolation rule starts looking for a limit jump.
  std::uint64_t segment_cap = 10000;
  // Trace recording: every stage up to the cap, then every sparse_stride-th,
  // plus always segment starts (limit stages) and the final stage.
  std::uint64_t dense_record_cap = 10000;
  std::uint64_t sparse_stride = 1000;
  // Samples per nested limit evaluation (exponents >= w^2 in state_at).
  std::uint64_t nested_sample_cap = 64;
  // Convergence threshold override. Default: eq_tolerance * (1 - factor) / 4
  // for declared contractions (small enough that runs from different starts
  // land pairwise within eq_tolerance), else eq_tolerance, else exact.
  std::optional<double> stop_tolerance;
};

struct TraceStage {
  Ordinal stage;
  State state;
  double discrepancy;
};

enum class RunOutcome {
  converged,
  budget_exhausted,  // next stage would exceed the budget
  limit_diverged,    // a limit stage failed to settle under the caps
  cap_exhausted,     // ran out of per-segment samples before the budget
};
const char* run_outcome_name(RunOutcome o);

struct IterationTrace {
  const Space* space = nullptr;
  State initial;
  Ordinal budget;
  CheckMode mode = CheckMode::exact;
  double eps = 0.0;
  std::string measure;  // label of the discrepancy column
  // Recorded stages, strictly increasing; always includes stage 0, every
  // segment start and the final evaluated stage.
  std::vector<TraceStage> stages;
  RunOutcome outcome = RunOutcome::budget_exhausted;
  std::optional<Ordinal> failed_limit;  // set when outcome == limit_diverged
};

struct FixpointCertificate {
  State value;
  Ordinal closure;  // first stage whose state the step rule left in place
  double residual;  // d(value, op(value)); exactly 0 in exact mode
  CheckMode mode = CheckMode::exact;
  double eps = 0.0;
  bool limit_crossed = false;  // some limit stage was evaluated on the way
  std::string check;           // operator precondition provenance
  std::string measure;
  // (initial, converged value) pairs; iterate fills in one, verify_uniqueness
  // appends the rest.
  std::vector<std::pair<State, State>> uniqueness_evidence;
};

struct IterateResult {
  IterationTrace trace;
  // Present exactly when trace.outcome == converged.
  std::optional<FixpointCertificate> certificate;
};

// The state at stage o: o-fold application of op, with limit stages evaluated
// by fundamental-sequence sampling until agreement_window consecutive samples
// coincide (mode equality), or on ordinal spaces until the
// least-limit-above extrapolation settles. Throws BudgetExceeded when
// o > limits.budget, LimitDivergence when a limit fails to settle, TooLarge
// for finite segments beyond limit_cap.
State state_at(const Operator& op, const State& x0, const Ordinal& o,
               const EngineLimits& limits = {});

// Walks stages from 0 until the step rule leaves the state in place, jumping
// to segment-limit stages when the space supports it. Divergence is a result,
// not an exception: budget exhaustion and unsettled limits come back as a
// trace without a certificate.
IterateResult iterate_to_fixpoint(const Operator& op, const State& x0,
                                  const EngineLimits& limits = {},
                                  const DiscrepancyMeasure* measure = nullptr);

// True iff every recorded stage >= from carries a state equal (mode equality,
// trace tolerance) to the state recorded at `from`. Throws EmptyTrace on an
// empty trace, StageNotRecorded when `from` is not a recorded stage.
bool detect_stable(const IterationTrace& trace, const Ordinal& from);

enum class UniquenessVerdict { unique, multiple, inconclusive };
const char* uniqueness_verdict_name(UniquenessVerdict v);

struct UniquenessReport {
  UniquenessVerdict verdict = UniquenessVerdict::inconclusive;
  // Converged values with duplicates (mode equality) collapsed, in input
  // order of the first initial reaching each.
  std::vector<State> values;
  // Per initial: the converged value, or nothing for a failed run.
  std::vector<std::pair<State, std::optional<State>>> evidence;
  std::vector<std::string> notes;  // failure detail per non-converged run
};

// Runs iterate_to_fixpoint from every initial (runs are independent and
// execute in parallel). unique: all runs converged to one value class.
// multiple: all runs converged, >= 2 value classes. inconclusive: some run
// failed to converge or errored.
UniquenessReport verify_uniqueness(const Operator& op, const std::vector<State>& initials,
                                   const EngineLimits& limits = {});

}  // namespace tfx
