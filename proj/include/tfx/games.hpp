#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfx/engine.hpp"

namespace tfx {

// One-player alignment games: each round the state moves toward the round's
// signal. toward_signal on metric spaces (x' = x + rate*(s - x)),
// union_signal / intersect_signal on powerset lattices (X' = X u S / X n S).
enum class GameFamily { toward_signal, union_signal, intersect_signal };
const char* game_family_name(GameFamily f);
GameFamily game_family_by_name(const std::string& name);  // ParseError on miss

// Per-round discrepancy. step_change: d(pre, post). signal_distance:
// d(post, signal), metric only. signal_gap: members the post state still
// misses from the signal (union) or still keeps beyond it (intersect),
// powerset only. Each vanishes exactly at the matching family's fixed points
// under a constant signal.
enum class MeasureKind { step_change, signal_distance, signal_gap };
const char* measure_kind_name(MeasureKind m);
MeasureKind measure_kind_by_name(const std::string& name);  // ParseError on miss

// Signals for rounds 0..rounds.size()-1 explicitly, every later round from
// the constant tail. A schedule without a tail is inspectable but cannot
// drive a run past its explicit rounds (SignalUndefined).
struct SignalSchedule {
  std::vector<State> rounds;
  std::optional<State> tail;
};

struct SemanticGame {
  std::string name;
  const Space* space = nullptr;
  GameFamily family = GameFamily::toward_signal;
  double rate = 0.5;  // toward_signal only
  SignalSchedule signal;
  MeasureKind measure = MeasureKind::step_change;
};

// Validates family/space fit, rate > 0, signals inside the space, and the
// measure's space requirements.
SemanticGame make_semantic_game(std::string name, const Space& space, GameFamily family,
                                double rate, SignalSchedule signal, MeasureKind measure);

State game_step(const SemanticGame& g, const State& x, const State& signal);

// The signal for a round: explicit for natural rounds below the explicit
// count, the tail for everything beyond. SignalUndefined without a tail.
const State& signal_at(const SemanticGame& g, const Ordinal& round);

double game_measure(const SemanticGame& g, const State& pre, const State& post,
                    const State& signal);

// One round: the updated state plus the discrepancy of the transition.
std::pair<State, double> play_round(const SemanticGame& g, const State& x, const Ordinal& round);

// Plays the explicit rounds, then hands the constant-tail phase to the
// iteration engine. Trace stage n carries the state entering round n and the
// discrepancy of the transition out of it; stage offsets continue through the
// tail, so a closure at stage k + m means m tail rounds after k explicit
// ones. SignalUndefined without a tail.
IterateResult run_semantic_game(const SemanticGame& g, const State& x0,
                                const EngineLimits& limits = {});

// Whether x is already an equilibrium of the constant-tail round: one more
// round leaves it in place (space equality tolerance).
bool equilibrium_check(const SemanticGame& g, const State& x);

// Two-level game with scalar couplings and vector offsets on metric spaces
// of one shared dimension:
//   outer: X' = a*X + b*Y + c
//   inner: Y' = p*Y + q*X + r
// The inner game is solved to its fixed point Y*(X) = (q*X + r) / (1 - p)
// before each outer step, so the effective outer map is
//   Phi(X) = (a + b*q/(1-p)) * X + (b/(1-p)) * r + c,
// an affine map with the composed factor |a + b*q/(1-p)|.
struct NestedGame {
  std::string name;
  const Space* outer_space = nullptr;
  const Space* inner_space = nullptr;
  double a = 0.0, b = 0.0;
  std::vector<double> c;
  double p = 0.0, q = 0.0;
  std::vector<double> r;
  // Contraction factor the composed map claims; checked against (0,1) at
  // construction. When absent the composed factor is derived when |p| < 1,
  // and the outer run is unchecked otherwise.
  std::optional<double> declared_factor;
};

NestedGame make_nested_game(std::string name, const Space& outer_space, const Space& inner_space,
                            double a, double b, std::vector<double> c, double p, double q,
                            std::vector<double> r, std::optional<double> declared_factor);

// The inner-round operator for a fixed outer state: Y -> p*Y + (q*X + r).
// Declared a contraction with factor |p| when 0 < |p| < 1.
Operator inner_operator(const NestedGame& g, const State& outer_x);

// Runs the inner game to its fixed point. Throws InnerDivergence when it does
// not settle within the limits.
IterateResult solve_inner(const NestedGame& g, const State& outer_x, const State& inner_y0,
                          const EngineLimits& limits = {});

// The exact composed factor a + b*q/(1-p); ValidationError unless |p| < 1.
double composed_factor(const NestedGame& g);

// The closed-form composed map Phi as a plain affine operator. This is the
// independent route: iterating it never touches the inner solver.
Operator composed_operator(const NestedGame& g);

struct NestedResult {
  IterateResult outer;
  // Y*(X_Omega): the inner value backing the outer run's final stage.
  std::optional<State> inner_value;
  // One entry per outer stage evaluation, in stage order: the inner closure
  // ordinal reached while computing that stage's update.
  std::vector<std::pair<Ordinal, Ordinal>> inner_closures;
};

// Iterates X -> outer(X, Y*(X)) with a fresh inner solve per outer stage.
// InnerDivergence propagates; outer non-convergence is a result, not an
// error.
NestedResult solve_nested(const NestedGame& g, const State& outer_x0, const State& inner_y0,
                          const EngineLimits& outer_limits = {},
                          const EngineLimits& inner_limits = {});

// Whether (X, Y) is a joint equilibrium: Y is inner-fixed for X and X is
// outer-fixed given Y, each at its space's equality tolerance.
bool equilibrium_check(const NestedGame& g, const State& outer_x, const State& inner_y);

}  // namespace tfx
