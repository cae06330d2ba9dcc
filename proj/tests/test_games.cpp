#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "tfx/games.hpp"
#include "tfx/oracle.hpp"

using namespace tfx;

namespace {

template <typename Fn>
bool throws_code(Errc code, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

const Space kLine{"line", MetricSpaceSpec{1, DistanceKind::euclidean, 1e-9}};

State v1(double x) { return State(std::vector<double>{x}); }

double head(const State& x) { return std::get<std::vector<double>>(x)[0]; }

Ordinal nat(std::uint64_t n) { return Ordinal::nat(n); }

SemanticGame pull_game(MeasureKind m, std::vector<State> rounds = {},
                       std::optional<State> tail = v1(4.0), double rate = 0.5) {
  SignalSchedule sched{std::move(rounds), std::move(tail)};
  return make_semantic_game("pull", kLine, GameFamily::toward_signal, rate, std::move(sched), m);
}

}  // namespace

TEST_CASE("one round moves halfway to the signal") {
  SemanticGame g = pull_game(MeasureKind::step_change);
  auto [next, disc] = play_round(g, v1(0.0), nat(0));
  CHECK(head(next) == 2.0);
  CHECK(disc == 2.0);  // the state moved by 2

  SemanticGame g2 = pull_game(MeasureKind::signal_distance);
  auto [next2, disc2] = play_round(g2, v1(0.0), nat(0));
  CHECK(head(next2) == 2.0);
  CHECK(disc2 == 2.0);  // and ends 2 short of the signal
}

TEST_CASE("signals come from the schedule, then the tail") {
  SemanticGame g = pull_game(MeasureKind::step_change, {v1(10.0), v1(-10.0)});
  CHECK(head(signal_at(g, nat(0))) == 10.0);
  CHECK(head(signal_at(g, nat(1))) == -10.0);
  CHECK(head(signal_at(g, nat(2))) == 4.0);
  CHECK(head(signal_at(g, nat(999))) == 4.0);
  CHECK(head(signal_at(g, Ordinal::omega())) == 4.0);

  SemanticGame bare = pull_game(MeasureKind::step_change, {v1(10.0)}, std::nullopt);
  CHECK(head(signal_at(bare, nat(0))) == 10.0);
  CHECK(throws_code(Errc::signal_undefined, [&] { signal_at(bare, nat(1)); }));
  CHECK(throws_code(Errc::signal_undefined, [&] { run_semantic_game(bare, v1(0.0)); }));
  CHECK(throws_code(Errc::signal_undefined, [&] { equilibrium_check(bare, v1(0.0)); }));
}

TEST_CASE("game construction rejects mismatched pieces") {
  Space sets{"sets", make_powerset_lattice({"a", "b"})};
  SignalSchedule tail4{{}, v1(4.0)};
  SignalSchedule tailmask{{}, State(1)};

  CHECK(throws_code(Errc::space_mismatch, [&] {
    make_semantic_game("g", sets, GameFamily::toward_signal, 0.5, tailmask,
                       MeasureKind::step_change);
  }));
  CHECK(throws_code(Errc::space_mismatch, [&] {
    make_semantic_game("g", kLine, GameFamily::union_signal, 0.5, tail4,
                       MeasureKind::step_change);
  }));
  CHECK(throws_code(Errc::bad_factor, [&] {
    make_semantic_game("g", kLine, GameFamily::toward_signal, 0.0, tail4,
                       MeasureKind::step_change);
  }));
  CHECK(throws_code(Errc::space_mismatch, [&] {
    make_semantic_game("g", sets, GameFamily::union_signal, 0.5, tailmask,
                       MeasureKind::signal_distance);
  }));
  CHECK(throws_code(Errc::space_mismatch, [&] {
    make_semantic_game("g", kLine, GameFamily::toward_signal, 0.5, tail4,
                       MeasureKind::signal_gap);
  }));
  // Signal outside the space.
  CHECK(throws_code(Errc::validation_error, [&] {
    make_semantic_game("g", sets, GameFamily::union_signal, 0.5, SignalSchedule{{}, State(7)},
                       MeasureKind::signal_gap);
  }));
  CHECK(throws_code(Errc::parse_error, [&] { game_family_by_name("tug_of_war"); }));
  CHECK(throws_code(Errc::parse_error, [&] { measure_kind_by_name("vibes"); }));
  CHECK(game_family_by_name(game_family_name(GameFamily::intersect_signal)) ==
        GameFamily::intersect_signal);
  CHECK(measure_kind_by_name(measure_kind_name(MeasureKind::signal_gap)) ==
        MeasureKind::signal_gap);
}

TEST_CASE("scheduled rounds then a settling tail") {
  SemanticGame g = pull_game(MeasureKind::signal_distance, {v1(10.0), v1(-10.0)});
  IterateResult res = run_semantic_game(g, v1(0.0));

  // Explicit prefix, exact dyadic arithmetic.
  REQUIRE(res.trace.stages.size() >= 3);
  CHECK(res.trace.stages[0].stage == nat(0));
  CHECK(head(res.trace.stages[0].state) == 0.0);
  CHECK(res.trace.stages[0].discrepancy == 5.0);  // moved to 5, signal 10
  CHECK(res.trace.stages[1].stage == nat(1));
  CHECK(head(res.trace.stages[1].state) == 5.0);
  CHECK(res.trace.stages[1].discrepancy == 7.5);  // moved to -2.5, signal -10
  CHECK(res.trace.stages[2].stage == nat(2));
  CHECK(head(res.trace.stages[2].state) == -2.5);

  REQUIRE(res.certificate.has_value());
  const FixpointCertificate& cert = *res.certificate;
  CHECK(std::abs(head(cert.value) - 4.0) < 1e-9);
  CHECK(cert.closure >= nat(3));
  CHECK(cert.closure.is_nat());
  CHECK(cert.check == "family-derived");
  CHECK(res.trace.measure == "signal_distance");
  CHECK(res.trace.outcome == RunOutcome::converged);

  // Tail discrepancies shrink monotonically: each round halves the gap.
  for (std::size_t i = 3; i < res.trace.stages.size(); ++i) {
    CHECK(res.trace.stages[i].discrepancy <= res.trace.stages[i - 1].discrepancy);
  }

  CHECK(equilibrium_check(g, cert.value));
  CHECK(!equilibrium_check(g, v1(0.0)));
}

TEST_CASE("rate one snaps to the signal in one tail round") {
  SemanticGame g = pull_game(MeasureKind::step_change, {}, v1(4.0), 1.0);
  IterateResult res = run_semantic_game(g, v1(0.0));
  REQUIRE(res.certificate.has_value());
  CHECK(head(res.certificate->value) == 4.0);
  CHECK(res.certificate->closure == nat(1));
}

TEST_CASE("union game absorbs the tail signal") {
  Space sets{"sets", make_powerset_lattice({"a", "b", "c"})};
  SignalSchedule sched{{State(0b010)}, State(0b001)};
  SemanticGame g = make_semantic_game("grow", sets, GameFamily::union_signal, 0.5,
                                      std::move(sched), MeasureKind::signal_gap);
  IterateResult res = run_semantic_game(g, State(0));
  REQUIRE(res.certificate.has_value());
  CHECK(std::get<int>(res.certificate->value) == 0b011);
  CHECK(res.certificate->closure == nat(2));
  CHECK(res.certificate->mode == CheckMode::exact);
  // signal_gap counts members of the signal the state still misses.
  CHECK(res.trace.stages[0].discrepancy == 0.0);
  CHECK(equilibrium_check(g, res.certificate->value));
  CHECK(!equilibrium_check(g, State(0)));
}

TEST_CASE("intersect game trims to the tail signal") {
  Space sets{"sets", make_powerset_lattice({"a", "b", "c"})};
  SignalSchedule sched{{}, State(0b101)};
  SemanticGame g = make_semantic_game("trim", sets, GameFamily::intersect_signal, 0.5,
                                      std::move(sched), MeasureKind::signal_gap);
  IterateResult res = run_semantic_game(g, State(0b111));
  REQUIRE(res.certificate.has_value());
  CHECK(std::get<int>(res.certificate->value) == 0b101);
  CHECK(res.certificate->closure == nat(1));
}

TEST_CASE("budget can run out inside the explicit schedule") {
  SemanticGame g =
      pull_game(MeasureKind::step_change, {v1(10.0), v1(-10.0), v1(10.0)});
  EngineLimits lim;
  lim.budget = nat(2);
  IterateResult res = run_semantic_game(g, v1(0.0), lim);
  CHECK(!res.certificate.has_value());
  CHECK(res.trace.outcome == RunOutcome::budget_exhausted);
  CHECK(res.trace.stages.back().stage == nat(2));
  CHECK(head(res.trace.stages.back().state) == -2.5);
}

TEST_CASE("a very long schedule is refused, not truncated") {
  std::vector<State> rounds(40, v1(1.0));
  SemanticGame g = pull_game(MeasureKind::step_change, std::move(rounds));
  EngineLimits lim;
  lim.dense_record_cap = 8;
  CHECK(throws_code(Errc::too_large, [&] { run_semantic_game(g, v1(0.0), lim); }));
}

TEST_CASE("nested game with a flat inner round") {
  // X' = X/2 + Y/2 + 1, Y' = X/2. Solving Y out gives Phi(X) = 3X/4 + 1,
  // so the joint equilibrium is X = 4, Y = 2.
  NestedGame g = make_nested_game("joint", kLine, kLine, 0.5, 0.5, {1.0}, 0.0, 0.5, {0.0},
                                  std::nullopt);
  CHECK(composed_factor(g) == 0.75);

  Operator phi = composed_operator(g);
  CHECK(phi.kind == OpKind::contraction);
  const AffineMap* aff = std::get_if<AffineMap>(&phi.family);
  REQUIRE(aff != nullptr);
  CHECK(aff->matrix == std::vector<double>{0.75});
  CHECK(aff->offset == std::vector<double>{1.0});

  NestedResult nr = solve_nested(g, v1(0.0), v1(0.0));
  REQUIRE(nr.outer.certificate.has_value());
  CHECK(std::abs(head(nr.outer.certificate->value) - 4.0) < 1e-9);
  CHECK(nr.outer.certificate->check == "family-derived");
  REQUIRE(nr.inner_value.has_value());
  CHECK(std::abs(head(*nr.inner_value) - 2.0) < 1e-9);

  REQUIRE(!nr.inner_closures.empty());
  CHECK(nr.inner_closures.front().first == nat(0));
  CHECK(nr.inner_closures.front().second == nat(0));  // Y0 = 0 already fixed for X0 = 0
  for (std::size_t i = 0; i < nr.inner_closures.size(); ++i) {
    CHECK(nr.inner_closures[i].first == nat(i));
    CHECK(nr.inner_closures[i].second <= nat(1));  // flat inner settles in one step
  }

  // Independent route: iterate the closed-form map.
  IterateResult direct = iterate_to_fixpoint(phi, v1(0.0));
  REQUIRE(direct.certificate.has_value());
  CHECK(std::abs(head(direct.certificate->value) - head(nr.outer.certificate->value)) < 1e-9);

  CHECK(equilibrium_check(g, nr.outer.certificate->value, *nr.inner_value));
  CHECK(equilibrium_check(g, v1(4.0), v1(2.0)));
  CHECK(!equilibrium_check(g, v1(0.0), v1(0.0)));
  CHECK(!equilibrium_check(g, v1(4.0), v1(1.0)));
}

TEST_CASE("nested game whose composed map walks off") {
  // Y*(X) = X + 2, so Phi(X) = X + 1: factor exactly 1, no fixed point.
  NestedGame g = make_nested_game("drift", kLine, kLine, 0.5, 0.5, {0.0}, 0.5, 0.5, {1.0},
                                  std::nullopt);
  CHECK(composed_factor(g) == 1.0);
  EngineLimits outer;
  outer.budget = nat(30);
  NestedResult nr = solve_nested(g, v1(0.0), v1(0.0), outer);
  CHECK(!nr.outer.certificate.has_value());
  CHECK(nr.outer.trace.outcome == RunOutcome::budget_exhausted);
  CHECK(!nr.inner_value.has_value());
  CHECK(nr.inner_closures.size() == 31);  // one inner solve per outer evaluation
  // After n outer rounds the state sits near n.
  CHECK(std::abs(head(nr.outer.trace.stages.back().state) - 30.0) < 1e-6);
}

TEST_CASE("inner divergence surfaces as an error") {
  // Inner Y' = 2Y doubles forever from any nonzero start.
  NestedGame g = make_nested_game("blow", kLine, kLine, 0.5, 0.5, {0.0}, 2.0, 0.0, {0.0},
                                  std::nullopt);
  EngineLimits inner;
  inner.budget = nat(20);
  CHECK(throws_code(Errc::inner_divergence, [&] { solve_inner(g, v1(0.0), v1(1.0), inner); }));
  CHECK(throws_code(Errc::inner_divergence, [&] {
    solve_nested(g, v1(0.0), v1(1.0), EngineLimits{}, inner);
  }));
  CHECK(throws_code(Errc::validation_error, [&] { composed_factor(g); }));
  CHECK(throws_code(Errc::validation_error, [&] { composed_operator(g); }));
}

TEST_CASE("nested construction checks its inputs") {
  Space plane{"plane", MetricSpaceSpec{2, DistanceKind::euclidean, 1e-9}};
  Space sets{"sets", make_powerset_lattice({"a"})};
  CHECK(throws_code(Errc::space_mismatch, [&] {
    make_nested_game("g", sets, kLine, 0.5, 0.5, {0.0}, 0.0, 0.0, {0.0}, std::nullopt);
  }));
  CHECK(throws_code(Errc::space_mismatch, [&] {
    make_nested_game("g", plane, kLine, 0.5, 0.5, {0.0, 0.0}, 0.0, 0.0, {0.0}, std::nullopt);
  }));
  CHECK(throws_code(Errc::validation_error, [&] {
    make_nested_game("g", kLine, kLine, 0.5, 0.5, {0.0, 1.0}, 0.0, 0.0, {0.0}, std::nullopt);
  }));
  CHECK(throws_code(Errc::bad_factor, [&] {
    make_nested_game("g", kLine, kLine, 0.5, 0.5, {0.0}, 0.0, 0.0, {0.0}, 1.0);
  }));

  // A declared factor overrides the derived one and lands on the certificate.
  NestedGame g = make_nested_game("joint", kLine, kLine, 0.5, 0.5, {1.0}, 0.0, 0.5, {0.0}, 0.8);
  Operator phi = composed_operator(g);
  CHECK(phi.kind == OpKind::contraction);
  CHECK(phi.factor == 0.8);
}

TEST_CASE("inner operator is a declared contraction when |p| < 1") {
  NestedGame g = make_nested_game("joint", kLine, kLine, 0.5, 0.5, {1.0}, 0.5, 0.5, {2.0},
                                  std::nullopt);
  Operator in = inner_operator(g, v1(6.0));
  CHECK(in.kind == OpKind::contraction);
  CHECK(in.factor == 0.5);
  // Y' = Y/2 + (3 + 2) at X = 6.
  CHECK(head(in.apply(v1(0.0))) == 5.0);
  CHECK(head(in.apply(v1(10.0))) == 10.0);  // Y* = 10

  IterateResult res = solve_inner(g, v1(6.0), v1(0.0));
  REQUIRE(res.certificate.has_value());
  CHECK(std::abs(head(res.certificate->value) - 10.0) < 1e-9);
}
