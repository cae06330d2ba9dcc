#include "tfx/games.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>

#include "tfx/errors.hpp"

namespace tfx {

const char* game_family_name(GameFamily f) {
  switch (f) {
    case GameFamily::toward_signal: return "toward_signal";
    case GameFamily::union_signal: return "union_signal";
    case GameFamily::intersect_signal: return "intersect_signal";
  }
  return "?";
}

GameFamily game_family_by_name(const std::string& name) {
  if (name == "toward_signal") return GameFamily::toward_signal;
  if (name == "union_signal") return GameFamily::union_signal;
  if (name == "intersect_signal") return GameFamily::intersect_signal;
  fail(Errc::parse_error, "unknown game family '" + name + "'");
}

const char* measure_kind_name(MeasureKind m) {
  switch (m) {
    case MeasureKind::step_change: return "step_change";
    case MeasureKind::signal_distance: return "signal_distance";
    case MeasureKind::signal_gap: return "signal_gap";
  }
  return "?";
}

MeasureKind measure_kind_by_name(const std::string& name) {
  if (name == "step_change") return MeasureKind::step_change;
  if (name == "signal_distance") return MeasureKind::signal_distance;
  if (name == "signal_gap") return MeasureKind::signal_gap;
  fail(Errc::parse_error, "unknown measure '" + name + "'");
}

namespace {

bool is_powerset_space(const Space& s) {
  return s.is_lattice() && s.lattice().is_powerset();
}

void require_state(const Space& s, const State& x, const std::string& what) {
  if (!state_in_space(s, x)) {
    fail(Errc::validation_error, what + " is not a member of space '" + s.name + "'");
  }
}

}  // namespace

SemanticGame make_semantic_game(std::string name, const Space& space, GameFamily family,
                                double rate, SignalSchedule signal, MeasureKind measure) {
  SemanticGame g;
  g.name = std::move(name);
  g.space = &space;
  g.family = family;
  g.rate = rate;
  g.measure = measure;

  if (family == GameFamily::toward_signal) {
    if (!space.is_metric()) {
      fail(Errc::space_mismatch, "toward_signal plays on metric spaces, not '" + space.name + "'");
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      fail(Errc::bad_factor, "toward_signal rate must be positive and finite");
    }
  } else {
    if (!is_powerset_space(space)) {
      fail(Errc::space_mismatch, std::string(game_family_name(family)) +
                                     " plays on powerset lattices, not '" + space.name + "'");
    }
  }
  if (measure == MeasureKind::signal_distance && !space.is_metric()) {
    fail(Errc::space_mismatch, "signal_distance needs a metric space");
  }
  if (measure == MeasureKind::signal_gap && family == GameFamily::toward_signal) {
    fail(Errc::space_mismatch, "signal_gap needs a set-valued game");
  }

  for (std::size_t i = 0; i < signal.rounds.size(); ++i) {
    require_state(space, signal.rounds[i], "signal for round " + std::to_string(i));
  }
  if (signal.tail) require_state(space, *signal.tail, "tail signal");
  g.signal = std::move(signal);
  return g;
}

State game_step(const SemanticGame& g, const State& x, const State& signal) {
  require_state(*g.space, x, "game state");
  require_state(*g.space, signal, "signal");
  switch (g.family) {
    case GameFamily::toward_signal: {
      const auto& vx = std::get<std::vector<double>>(x);
      const auto& vs = std::get<std::vector<double>>(signal);
      std::vector<double> out(vx.size());
      for (std::size_t i = 0; i < vx.size(); ++i) out[i] = vx[i] + g.rate * (vs[i] - vx[i]);
      return out;
    }
    case GameFamily::union_signal:
      return std::get<int>(x) | std::get<int>(signal);
    case GameFamily::intersect_signal:
      return std::get<int>(x) & std::get<int>(signal);
  }
  fail(Errc::validation_error, "unreachable game family");
}

const State& signal_at(const SemanticGame& g, const Ordinal& round) {
  if (round.is_nat()) {
    Nat n = *round.as_nat();
    if (n < Nat(g.signal.rounds.size())) {
      return g.signal.rounds[n.convert_to<std::size_t>()];
    }
  }
  if (g.signal.tail) return *g.signal.tail;
  fail(Errc::signal_undefined,
       "game '" + g.name + "' defines no signal for round " + to_string(round));
}

double game_measure(const SemanticGame& g, const State& pre, const State& post,
                    const State& signal) {
  switch (g.measure) {
    case MeasureKind::step_change:
      return state_distance(*g.space, pre, post);
    case MeasureKind::signal_distance:
      return state_distance(*g.space, post, signal);
    case MeasureKind::signal_gap: {
      unsigned s = static_cast<unsigned>(std::get<int>(signal));
      unsigned v = static_cast<unsigned>(std::get<int>(post));
      unsigned gap = g.family == GameFamily::intersect_signal ? (v & ~s) : (s & ~v);
      return static_cast<double>(std::popcount(gap));
    }
  }
  fail(Errc::validation_error, "unreachable measure kind");
}

std::pair<State, double> play_round(const SemanticGame& g, const State& x, const Ordinal& round) {
  const State& s = signal_at(g, round);
  State next = game_step(g, x, s);
  double m = game_measure(g, x, next, s);
  return {std::move(next), m};
}

namespace {

// The whole-run budget minus the explicit rounds already played. Any budget
// with a limit part absorbs a finite prefix unchanged.
Ordinal remaining_budget(const Ordinal& budget, std::uint64_t played) {
  if (budget.is_nat()) return Ordinal::nat(*budget.as_nat() - played);
  return budget;
}

Operator tail_operator(const SemanticGame& g) {
  const State& tail = *g.signal.tail;
  std::string name = g.name + ".tail";
  Operator op = [&] {
    switch (g.family) {
      case GameFamily::toward_signal: {
        const auto& vs = std::get<std::vector<double>>(tail);
        std::size_t dim = vs.size();
        AffineMap aff;
        aff.matrix.assign(dim * dim, 0.0);
        aff.offset.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          aff.matrix[i * dim + i] = 1.0 - g.rate;
          aff.offset[i] = g.rate * vs[i];
        }
        double factor = std::abs(1.0 - g.rate);
        if (factor > 0.0 && factor < 1.0) {
          return make_operator(name, *g.space, OpKind::contraction, factor, std::move(aff));
        }
        return make_operator(name, *g.space, OpKind::unchecked, 0.0, std::move(aff));
      }
      case GameFamily::union_signal:
        return make_operator(name, *g.space, OpKind::monotone, 0.0,
                             UnionWith{std::get<int>(tail)});
      case GameFamily::intersect_signal:
        return make_operator(name, *g.space, OpKind::monotone, 0.0,
                             IntersectWith{std::get<int>(tail)});
    }
    fail(Errc::validation_error, "unreachable game family");
  }();
  // Shape provenance: the bound comes from the family's algebra, not a scan.
  op.check_label = "family-derived";
  return op;
}

}  // namespace

IterateResult run_semantic_game(const SemanticGame& g, const State& x0,
                                const EngineLimits& limits) {
  if (!g.signal.tail) {
    fail(Errc::signal_undefined, "game '" + g.name + "' has no tail signal to settle on");
  }
  require_state(*g.space, x0, "initial state");
  std::size_t k = g.signal.rounds.size();
  if (k > limits.dense_record_cap) {
    fail(Errc::too_large, "explicit schedule longer than the dense record cap");
  }

  IterateResult out;
  IterationTrace& tr = out.trace;
  tr.space = g.space;
  tr.initial = x0;
  tr.budget = limits.budget;
  if (g.space->is_metric()) {
    tr.mode = CheckMode::tolerant;
    tr.eps = g.space->metric().eq_tolerance;
  } else {
    tr.mode = CheckMode::exact;
    tr.eps = 0.0;
  }
  tr.measure = measure_kind_name(g.measure);

  State x = x0;
  for (std::size_t i = 0; i < k; ++i) {
    const State& s = g.signal.rounds[i];
    State next = game_step(g, x, s);
    double disc = game_measure(g, x, next, s);
    tr.stages.push_back({Ordinal::nat(std::uint64_t(i)), x, disc});
    if (compare(Ordinal::nat(std::uint64_t(i + 1)), limits.budget) == Ordering::greater) {
      tr.outcome = RunOutcome::budget_exhausted;
      return out;
    }
    x = std::move(next);
  }

  Operator tail_op = tail_operator(g);
  const State& tail = *g.signal.tail;
  DiscrepancyMeasure meas;
  meas.name = measure_kind_name(g.measure);
  meas.eval = [&g, &tail](const State& pre, const State& post) {
    return game_measure(g, pre, post, tail);
  };

  EngineLimits tail_limits = limits;
  tail_limits.budget = remaining_budget(limits.budget, k);
  if (g.space->is_metric() && !tail_limits.stop_tolerance) {
    // Stop once steps shrink to eps*min(rate,1)/4; the remaining offset from
    // the tail signal is then at most a quarter of the equality tolerance.
    tail_limits.stop_tolerance = tr.eps * std::min(g.rate, 1.0) / 4.0;
  }

  IterateResult tail_res = iterate_to_fixpoint(tail_op, x, tail_limits, &meas);

  Ordinal offset = Ordinal::nat(std::uint64_t(k));
  for (auto& st : tail_res.trace.stages) {
    tr.stages.push_back({add(offset, st.stage), std::move(st.state), st.discrepancy});
  }
  tr.outcome = tail_res.trace.outcome;
  if (tail_res.trace.failed_limit) tr.failed_limit = add(offset, *tail_res.trace.failed_limit);
  if (tail_res.certificate) {
    FixpointCertificate cert = std::move(*tail_res.certificate);
    cert.closure = add(offset, cert.closure);
    if (!cert.uniqueness_evidence.empty()) cert.uniqueness_evidence.front().first = x0;
    out.certificate = std::move(cert);
  }
  return out;
}

bool equilibrium_check(const SemanticGame& g, const State& x) {
  if (!g.signal.tail) {
    fail(Errc::signal_undefined, "game '" + g.name + "' has no tail signal");
  }
  State next = game_step(g, x, *g.signal.tail);
  double eps = g.space->is_metric() ? g.space->metric().eq_tolerance : 0.0;
  return states_equal(*g.space, x, next, eps);
}

NestedGame make_nested_game(std::string name, const Space& outer_space, const Space& inner_space,
                            double a, double b, std::vector<double> c, double p, double q,
                            std::vector<double> r, std::optional<double> declared_factor) {
  if (!outer_space.is_metric() || !inner_space.is_metric()) {
    fail(Errc::space_mismatch, "nested games need metric outer and inner spaces");
  }
  std::size_t dim = static_cast<std::size_t>(outer_space.metric().dimension);
  if (static_cast<std::size_t>(inner_space.metric().dimension) != dim) {
    fail(Errc::space_mismatch, "outer and inner spaces must share one dimension");
  }
  if (c.size() != dim || r.size() != dim) {
    fail(Errc::validation_error, "offset lengths must match the space dimension");
  }
  for (double v : {a, b, p, q}) {
    if (!std::isfinite(v)) fail(Errc::validation_error, "couplings must be finite");
  }
  if (declared_factor && !(*declared_factor > 0.0 && *declared_factor < 1.0)) {
    fail(Errc::bad_factor, "declared composed factor must lie in (0,1)");
  }
  NestedGame g;
  g.name = std::move(name);
  g.outer_space = &outer_space;
  g.inner_space = &inner_space;
  g.a = a;
  g.b = b;
  g.c = std::move(c);
  g.p = p;
  g.q = q;
  g.r = std::move(r);
  g.declared_factor = declared_factor;
  return g;
}

namespace {

std::vector<double> outer_step(const NestedGame& g, const std::vector<double>& x,
                               const std::vector<double>& y) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = g.a * x[i] + g.b * y[i] + g.c[i];
  return out;
}

}  // namespace

Operator inner_operator(const NestedGame& g, const State& outer_x) {
  require_state(*g.outer_space, outer_x, "outer state");
  const auto& vx = std::get<std::vector<double>>(outer_x);
  std::size_t dim = vx.size();
  AffineMap aff;
  aff.matrix.assign(dim * dim, 0.0);
  aff.offset.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    aff.matrix[i * dim + i] = g.p;
    aff.offset[i] = g.q * vx[i] + g.r[i];
  }
  double fp = std::abs(g.p);
  if (fp > 0.0 && fp < 1.0) {
    return make_operator(g.name + ".inner", *g.inner_space, OpKind::contraction, fp,
                         std::move(aff));
  }
  return make_operator(g.name + ".inner", *g.inner_space, OpKind::unchecked, 0.0, std::move(aff));
}

IterateResult solve_inner(const NestedGame& g, const State& outer_x, const State& inner_y0,
                          const EngineLimits& limits) {
  Operator op = inner_operator(g, outer_x);
  IterateResult res = iterate_to_fixpoint(op, inner_y0, limits);
  if (!res.certificate) {
    fail(Errc::inner_divergence, "inner game of '" + g.name + "' did not settle (outcome " +
                                     run_outcome_name(res.trace.outcome) + ")");
  }
  return res;
}

double composed_factor(const NestedGame& g) {
  if (!(std::abs(g.p) < 1.0)) {
    fail(Errc::validation_error, "composed factor needs |p| < 1");
  }
  return std::abs(g.a + g.b * g.q / (1.0 - g.p));
}

Operator composed_operator(const NestedGame& g) {
  if (!(std::abs(g.p) < 1.0)) {
    fail(Errc::validation_error, "composed map needs |p| < 1");
  }
  double m = g.a + g.b * g.q / (1.0 - g.p);
  std::size_t dim = static_cast<std::size_t>(g.outer_space->metric().dimension);
  AffineMap aff;
  aff.matrix.assign(dim * dim, 0.0);
  aff.offset.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    aff.matrix[i * dim + i] = m;
    aff.offset[i] = g.b / (1.0 - g.p) * g.r[i] + g.c[i];
  }
  double factor = g.declared_factor ? *g.declared_factor : std::abs(m);
  if (factor > 0.0 && factor < 1.0) {
    return make_operator(g.name + ".composed", *g.outer_space, OpKind::contraction, factor,
                         std::move(aff));
  }
  return make_operator(g.name + ".composed", *g.outer_space, OpKind::unchecked, 0.0,
                       std::move(aff));
}

NestedResult solve_nested(const NestedGame& g, const State& outer_x0, const State& inner_y0,
                          const EngineLimits& outer_limits, const EngineLimits& inner_limits) {
  require_state(*g.outer_space, outer_x0, "outer initial state");
  require_state(*g.inner_space, inner_y0, "inner initial state");

  std::vector<Ordinal> closures;
  std::vector<State> inner_values;
  CustomMap fn;
  fn.fn = [&](const State& x) -> State {
    IterateResult inner = solve_inner(g, x, inner_y0, inner_limits);
    closures.push_back(inner.certificate->closure);
    inner_values.push_back(inner.certificate->value);
    return outer_step(g, std::get<std::vector<double>>(x),
                      std::get<std::vector<double>>(inner.certificate->value));
  };

  OpKind kind = OpKind::unchecked;
  double factor = 0.0;
  if (g.declared_factor) {
    kind = OpKind::contraction;
    factor = *g.declared_factor;
  } else if (std::abs(g.p) < 1.0) {
    double m = composed_factor(g);
    if (m > 0.0 && m < 1.0) {
      kind = OpKind::contraction;
      factor = m;
    }
  }
  Operator op = make_operator(g.name + ".outer", *g.outer_space, kind, factor, std::move(fn));
  op.check_label = "family-derived";

  NestedResult out;
  out.outer = iterate_to_fixpoint(op, outer_x0, outer_limits);
  // The engine applies the map exactly once per recorded-or-not stage and
  // metric runs never jump, so call order enumerates stages 0, 1, 2, ...
  out.inner_closures.reserve(closures.size());
  for (std::size_t i = 0; i < closures.size(); ++i) {
    out.inner_closures.emplace_back(Ordinal::nat(std::uint64_t(i)), std::move(closures[i]));
  }
  if (out.outer.certificate && !inner_values.empty()) {
    out.inner_value = std::move(inner_values.back());
  }
  return out;
}

bool equilibrium_check(const NestedGame& g, const State& outer_x, const State& inner_y) {
  require_state(*g.outer_space, outer_x, "outer state");
  require_state(*g.inner_space, inner_y, "inner state");
  const auto& vx = std::get<std::vector<double>>(outer_x);
  const auto& vy = std::get<std::vector<double>>(inner_y);
  std::vector<double> ynext(vy.size());
  for (std::size_t i = 0; i < vy.size(); ++i) ynext[i] = g.p * vy[i] + g.q * vx[i] + g.r[i];
  if (!states_equal(*g.inner_space, State(ynext), inner_y, g.inner_space->metric().eq_tolerance)) {
    return false;
  }
  std::vector<double> xnext = outer_step(g, vx, vy);
  return states_equal(*g.outer_space, State(xnext), outer_x, g.outer_space->metric().eq_tolerance);
}

}  // namespace tfx
