#include "tfx/engine.hpp"

#include <exception>

namespace tfx {

const char* check_mode_name(CheckMode m) { return m == CheckMode::exact ? "exact" : "tolerant"; }

const char* run_outcome_name(RunOutcome o) {
  switch (o) {
    case RunOutcome::converged: return "converged";
    case RunOutcome::budget_exhausted: return "budget-exhausted";
    case RunOutcome::limit_diverged: return "limit-diverged";
    case RunOutcome::cap_exhausted: return "cap-exhausted";
  }
  return "?";
}

const char* uniqueness_verdict_name(UniquenessVerdict v) {
  switch (v) {
    case UniquenessVerdict::unique: return "unique";
    case UniquenessVerdict::multiple: return "multiple";
    case UniquenessVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct ModeInfo {
  CheckMode mode = CheckMode::exact;
  double eps = 0.0;  // state equality tolerance
  double tau = 0.0;  // step-rule convergence threshold
};

// The step rule stops at d(x, f(x)) <= tau. For declared contractions tau is
// shrunk to eps*(1-c)/4: the true fixed point is then within tau/(1-c) =
// eps/4 of the stop value, so runs from any two initials land within eps/2 of
// each other and uniqueness comparisons at eps stay sound.
ModeInfo mode_for(const Operator& op, const EngineLimits& lim) {
  ModeInfo mi;
  if (op.space->is_metric()) {
    mi.mode = CheckMode::tolerant;
    mi.eps = op.space->metric().eq_tolerance;
    if (lim.stop_tolerance)
      mi.tau = *lim.stop_tolerance;
    else if (op.kind == OpKind::contraction)
      mi.tau = mi.eps * (1.0 - op.factor) / 4.0;
    else
      mi.tau = mi.eps;
  }
  return mi;
}

bool eq_tau(const Space& s, const ModeInfo& mi, const State& a, const State& b) {
  return mi.mode == CheckMode::tolerant ? states_equal(s, a, b, mi.tau)
                                        : states_equal_exact(s, a, b);
}

// Sup-extrapolation for ordinal spaces: when a successor run keeps strictly
// climbing, its limit is the least limit ordinal above the recent states.
// The rule only fires once that candidate has agreed across the window and
// fits under the space bound; a candidate above the bound means the walk may
// still stabilize at some natural further out, so the caller keeps walking.
class SupTracker {
 public:
  SupTracker(const Space& s, int window) : active_(s.is_ordinal()), window_(window) {
    if (active_) bound_ = s.ordinal().bound;
  }

  void feed(const State& before, const State& after) {
    if (!active_) return;
    const Ordinal& a = std::get<Ordinal>(before);
    const Ordinal& b = std::get<Ordinal>(after);
    if (!(a < b)) {
      candidate_.reset();
      agree_ = 0;
      return;
    }
    Ordinal cand = least_limit_above(b);
    if (candidate_ && *candidate_ == cand) {
      ++agree_;
    } else {
      candidate_ = std::move(cand);
      agree_ = 1;
    }
  }

  std::optional<Ordinal> settled() const {
    if (!active_ || !candidate_ || agree_ < window_) return std::nullopt;
    if (!(*candidate_ <= bound_)) return std::nullopt;
    return candidate_;
  }

 private:
  bool active_;
  int window_;
  Ordinal bound_;
  std::optional<Ordinal> candidate_;
  int agree_ = 0;
};

// Successor walk from x until agreement_window consecutive samples coincide
// (returns the latest), or the sup rule settles. Throws LimitDivergence at
// limit_cap. This is how every w-limit is evaluated outside
// iterate_to_fixpoint.
State walk_limit(const Operator& op, State x, const ModeInfo& mi, const EngineLimits& lim) {
  const Space& s = *op.space;
  SupTracker sup(s, lim.agreement_window);
  int agree = 1;
  for (std::uint64_t k = 0; k < lim.limit_cap; ++k) {
    State fx = op.apply(x);
    if (eq_tau(s, mi, x, fx)) {
      if (++agree >= lim.agreement_window) return fx;
    } else {
      agree = 1;
    }
    if (k >= lim.segment_cap) {
      sup.feed(x, fx);
      if (auto lv = sup.settled()) return State{std::move(*lv)};
    }
    x = std::move(fx);
  }
  fail(Errc::limit_divergence,
       "limit stage failed to settle within " + std::to_string(lim.limit_cap) + " samples");
}

State advance(const Operator& op, State x, const Ordinal& by, const ModeInfo& mi,
              const EngineLimits& lim);

// phi^(w^e) of x.
State advance_pow(const Operator& op, State x, const Ordinal& e, const ModeInfo& mi,
                  const EngineLimits& lim) {
  const Space& s = *op.space;
  if (e == Ordinal::nat(std::uint64_t{1})) return walk_limit(op, std::move(x), mi, lim);

  if (classify(e) == OrdKind::successor) {
    // w^(d+1) = sup_n w^d * n: fold w^d advances until samples agree.
    Ordinal d = pred(e);
    State prev = std::move(x);
    int agree = 1;
    for (std::uint64_t n = 1; n <= lim.nested_sample_cap; ++n) {
      State next = advance_pow(op, prev, d, mi, lim);
      if (eq_tau(s, mi, prev, next)) {
        if (++agree >= lim.agreement_window) return next;
      } else {
        agree = 1;
      }
      prev = std::move(next);
    }
    fail(Errc::limit_divergence, "limit stage w^" + to_string(e) +
                                     " failed to settle within the nested sample cap");
  }

  // Limit exponent: sample the trajectory at w^(e[n]) from the same start.
  State prev = advance(op, x, Ordinal::omega_pow(fundamental_seq(e, 0)), mi, lim);
  int agree = 1;
  for (std::uint64_t n = 1; n <= lim.nested_sample_cap; ++n) {
    State next = advance(op, x, Ordinal::omega_pow(fundamental_seq(e, n)), mi, lim);
    if (eq_tau(s, mi, prev, next)) {
      if (++agree >= lim.agreement_window) return next;
    } else {
      agree = 1;
    }
    prev = std::move(next);
  }
  fail(Errc::limit_divergence, "limit stage w^" + to_string(e) +
                                   " failed to settle within the nested sample cap");
}

State advance(const Operator& op, State x, const Ordinal& by, const ModeInfo& mi,
              const EngineLimits& lim) {
  const Space& s = *op.space;
  // Leading term first: phi^(t + rest) = phi^rest after phi^t.
  for (const OrdTerm& t : by.terms()) {
    if (t.exponent.is_zero()) {
      if (t.coefficient > Nat(lim.limit_cap))
        fail(Errc::too_large, "finite segment of " + t.coefficient.str() +
                                  " steps exceeds the evaluation cap");
      std::uint64_t c = t.coefficient.convert_to<std::uint64_t>();
      for (std::uint64_t i = 0; i < c; ++i) {
        State fx = op.apply(x);
        // An exact fixed point absorbs every later stage.
        if (states_equal_exact(s, x, fx)) return x;
        x = std::move(fx);
      }
    } else {
      if (t.coefficient > Nat(lim.limit_cap))
        fail(Errc::too_large, "limit segment coefficient " + t.coefficient.str() +
                                  " exceeds the evaluation cap");
      std::uint64_t c = t.coefficient.convert_to<std::uint64_t>();
      for (std::uint64_t i = 0; i < c; ++i) x = advance_pow(op, std::move(x), t.exponent, mi, lim);
    }
  }
  return x;
}

}  // namespace

State state_at(const Operator& op, const State& x0, const Ordinal& o, const EngineLimits& lim) {
  if (!state_in_space(*op.space, x0))
    fail(Errc::space_mismatch, "initial state is outside space \"" + op.space->name + "\"");
  if (o > lim.budget)
    fail(Errc::budget_exceeded,
         "stage " + to_string(o) + " exceeds the budget " + to_string(lim.budget));
  ModeInfo mi = mode_for(op, lim);
  return advance(op, x0, o, mi, lim);
}

IterateResult iterate_to_fixpoint(const Operator& op, const State& x0, const EngineLimits& lim,
                                  const DiscrepancyMeasure* measure) {
  const Space& s = *op.space;
  if (!state_in_space(s, x0))
    fail(Errc::space_mismatch, "initial state is outside space \"" + s.name + "\"");
  ModeInfo mi = mode_for(op, lim);
  DiscrepancyMeasure fallback = step_residual_measure(s);
  const DiscrepancyMeasure& meas = measure ? *measure : fallback;

  IterateResult res;
  IterationTrace& tr = res.trace;
  tr.space = &s;
  tr.initial = x0;
  tr.budget = lim.budget;
  tr.mode = mi.mode;
  tr.eps = mi.eps;
  tr.measure = meas.name;

  State x = x0;
  Ordinal base;
  std::uint64_t k = 0;
  bool limit_crossed = false;
  SupTracker sup(s, lim.agreement_window);

  auto record = [&](const Ordinal& stage, const State& st, double disc, bool force) {
    if (!force && tr.stages.size() >= lim.dense_record_cap && k % lim.sparse_stride != 0) return;
    tr.stages.push_back(TraceStage{stage, st, disc});
  };
  auto ensure_final = [&](const Ordinal& stage, const State& st, double disc) {
    if (tr.stages.empty() || tr.stages.back().stage != stage)
      tr.stages.push_back(TraceStage{stage, st, disc});
  };

  while (true) {
    Ordinal stage = add(base, Ordinal::nat(k));
    State fx = op.apply(x);
    double disc = meas.eval(x, fx);
    bool fixed = eq_tau(s, mi, x, fx);
    record(stage, x, disc, fixed || k == 0);

    if (fixed) {
      tr.outcome = RunOutcome::converged;
      FixpointCertificate cert;
      cert.value = x;
      cert.closure = std::move(stage);
      cert.residual = s.is_metric() ? state_distance(s, x, fx) : 0.0;
      cert.mode = mi.mode;
      cert.eps = mi.eps;
      cert.limit_crossed = limit_crossed;
      cert.check = op.check_label;
      cert.measure = meas.name;
      cert.uniqueness_evidence.emplace_back(x0, x);
      res.certificate = std::move(cert);
      return res;
    }

    if (k >= lim.segment_cap) {
      sup.feed(x, fx);
      if (auto lv = sup.settled()) {
        Ordinal lam = add(base, Ordinal::omega());
        if (lam <= lim.budget) {
          x = State{std::move(*lv)};
          base = std::move(lam);
          k = 0;
          limit_crossed = true;
          sup = SupTracker(s, lim.agreement_window);
          continue;
        }
        // The segment's limit lies beyond the budget: no jump; the successor
        // budget check below ends the run.
      }
    }

    Ordinal next = add(base, Ordinal::nat(k + 1));
    if (next > lim.budget) {
      ensure_final(stage, x, disc);
      tr.outcome = RunOutcome::budget_exhausted;
      return res;
    }
    if (k + 1 >= lim.limit_cap) {
      ensure_final(stage, x, disc);
      Ordinal lam = add(base, Ordinal::omega());
      if (lam <= lim.budget) {
        tr.outcome = RunOutcome::limit_diverged;
        tr.failed_limit = std::move(lam);
      } else {
        tr.outcome = RunOutcome::cap_exhausted;
      }
      return res;
    }
    x = std::move(fx);
    ++k;
  }
}

bool detect_stable(const IterationTrace& tr, const Ordinal& from) {
  if (tr.stages.empty()) fail(Errc::empty_trace, "trace has no recorded stages");
  const Space& s = *tr.space;

  std::size_t idx = tr.stages.size();
  for (std::size_t i = 0; i < tr.stages.size(); ++i)
    if (tr.stages[i].stage == from) {
      idx = i;
      break;
    }
  if (idx == tr.stages.size())
    fail(Errc::stage_not_recorded, "stage " + to_string(from) + " is not recorded in the trace");

  const State& anchor = tr.stages[idx].state;
  for (std::size_t j = idx + 1; j < tr.stages.size(); ++j) {
    bool same = tr.mode == CheckMode::tolerant
                    ? states_equal(s, anchor, tr.stages[j].state, tr.eps)
                    : states_equal_exact(s, anchor, tr.stages[j].state);
    if (!same) return false;
  }
  return true;
}

UniquenessReport verify_uniqueness(const Operator& op, const std::vector<State>& initials,
                                   const EngineLimits& lim) {
  const Space& s = *op.space;
  ModeInfo mi = mode_for(op, lim);
  const int n = static_cast<int>(initials.size());
  std::vector<std::optional<State>> vals(n);
  std::vector<std::string> errs(n);

  // Runs are independent; order of results is by initial index either way.
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      IterateResult r = iterate_to_fixpoint(op, initials[i], lim);
      if (r.certificate)
        vals[i] = r.certificate->value;
      else
        errs[i] = std::string("run did not converge: ") + run_outcome_name(r.trace.outcome);
    } catch (const std::exception& e) {
      errs[i] = e.what();
    }
  }

  UniquenessReport rep;
  bool all_converged = n > 0;
  for (int i = 0; i < n; ++i) {
    rep.evidence.emplace_back(initials[i], vals[i]);
    if (!vals[i]) {
      all_converged = false;
      rep.notes.push_back("initial " + render_state(s, initials[i]) + ": " + errs[i]);
      continue;
    }
    bool known = false;
    for (const State& v : rep.values)
      if (mi.mode == CheckMode::tolerant ? states_equal(s, v, *vals[i], mi.eps)
                                         : states_equal_exact(s, v, *vals[i])) {
        known = true;
        break;
      }
    if (!known) rep.values.push_back(*vals[i]);
  }
  if (n == 0) rep.notes.push_back("no initial states given");

  rep.verdict = !all_converged          ? UniquenessVerdict::inconclusive
                : rep.values.size() == 1 ? UniquenessVerdict::unique
                                         : UniquenessVerdict::multiple;
  return rep;
}

}  // namespace tfx
