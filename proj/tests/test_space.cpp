#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "tfx/checks.hpp"
#include "tfx/lattice.hpp"
#include "tfx/metric.hpp"
#include "tfx/space.hpp"

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

}  // namespace

TEST_CASE("chain lattice is the total order") {
  FiniteLattice lat = make_chain_lattice(5);
  CHECK(lat.size() == 5);
  CHECK(lat.bottom == 0);
  CHECK(lat.top == 4);
  CHECK(lat.names[0] == "c0");
  CHECK(lat.names[4] == "c4");
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      CHECK(lat.leq(a, b) == (a <= b));
      CHECK(lat.join(a, b) == std::max(a, b));
      CHECK(lat.meet(a, b) == std::min(a, b));
    }
  }
  CHECK(!scan_lattice_laws(lat).has_value());
  CHECK(!serial_ref::scan_lattice_laws(lat).has_value());
  CHECK(throws_code(Errc::validation_error, [] { make_chain_lattice(0); }));
  CHECK(throws_code(Errc::too_large, [] { make_chain_lattice(1025); }));
}

TEST_CASE("powerset lattice indexes subsets by mask") {
  FiniteLattice lat = make_powerset_lattice({"a", "b", "c"});
  CHECK(lat.size() == 8);
  CHECK(lat.is_powerset());
  CHECK(lat.names[0] == "{}");
  CHECK(lat.names[1] == "{a}");
  CHECK(lat.names[2] == "{b}");
  CHECK(lat.names[3] == "{a,b}");
  CHECK(lat.names[7] == "{a,b,c}");
  CHECK(lat.bottom == 0);
  CHECK(lat.top == 7);
  CHECK(lat.element_by_name("{a,c}") == 5);
  CHECK(lat.element_by_name("{c,a}") == -1);  // names are canonical
  for (int x = 0; x < 8; ++x) {
    for (int y = 0; y < 8; ++y) {
      CHECK(lat.leq(x, y) == ((x & ~y) == 0));
      CHECK(lat.join(x, y) == (x | y));
      CHECK(lat.meet(x, y) == (x & y));
    }
  }
  CHECK(!scan_lattice_laws(lat).has_value());
  CHECK(!serial_ref::scan_lattice_laws(lat).has_value());

  CHECK(throws_code(Errc::too_large, [] {
    make_powerset_lattice(std::vector<std::string>(17, "x"));
  }));
  CHECK(throws_code(Errc::validation_error, [] { make_powerset_lattice({"a", "a"}); }));
}

TEST_CASE("cover lattice builds the diamond") {
  // bot < l, r < top with l, r incomparable
  FiniteLattice lat = make_cover_lattice({"bot", "l", "r", "top"},
                                         {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  CHECK(lat.bottom == 0);
  CHECK(lat.top == 3);
  CHECK(lat.leq(0, 1));
  CHECK(lat.leq(1, 3));
  CHECK(lat.leq(0, 3));  // transitive closure
  CHECK(!lat.leq(1, 2));
  CHECK(!lat.leq(2, 1));
  CHECK(lat.join(1, 2) == 3);
  CHECK(lat.meet(1, 2) == 0);
  CHECK(lat.join(1, 1) == 1);
  CHECK(!scan_lattice_laws(lat).has_value());
  CHECK(!serial_ref::scan_lattice_laws(lat).has_value());
}

TEST_CASE("cover lattice rejects non-lattices") {
  // Two incomparable elements with no common upper bound.
  CHECK(throws_code(Errc::validation_error, [] {
    make_cover_lattice({"a", "b"}, {});
  }));
  // Two minimal upper bounds of {x, y}: join not unique.
  CHECK(throws_code(Errc::validation_error, [] {
    make_cover_lattice({"bot", "x", "y", "u", "v", "top"},
                       {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {1, 4}, {2, 4}, {3, 5}, {4, 5}});
  }));
  // A cycle in the covers is no order at all.
  CHECK(throws_code(Errc::validation_error, [] {
    make_cover_lattice({"a", "b"}, {{0, 1}, {1, 0}});
  }));
  CHECK(throws_code(Errc::validation_error, [] {
    make_cover_lattice({"a", "b"}, {{0, 5}});
  }));
}

TEST_CASE("law scan catches corrupted tables") {
  FiniteLattice lat = make_chain_lattice(4);
  lat.join_tab[static_cast<std::size_t>(1) * 4 + 2] = 1;  // join(c1,c2) should be c2
  auto par = scan_lattice_laws(lat);
  auto ser = serial_ref::scan_lattice_laws(lat);
  REQUIRE(par.has_value());
  REQUIRE(ser.has_value());
  // Determinism: the parallel scan names the same violation every time.
  auto again = scan_lattice_laws(lat);
  REQUIRE(again.has_value());
  CHECK(par->law == again->law);
  CHECK(par->x == again->x);
  CHECK(par->y == again->y);
  CHECK(par->z == again->z);
}

TEST_CASE("metric distances") {
  MetricSpaceSpec eu{2, DistanceKind::euclidean, 1e-9};
  MetricSpaceSpec mx{2, DistanceKind::max, 1e-9};
  std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
  CHECK(metric_distance(eu, a, b) == doctest::Approx(5.0));
  CHECK(metric_distance(mx, a, b) == doctest::Approx(4.0));
  CHECK(metric_distance(eu, a, a) == 0.0);
  CHECK(distance_by_name("euclidean") == DistanceKind::euclidean);
  CHECK(distance_by_name("max") == DistanceKind::max);
  CHECK(throws_code(Errc::parse_error, [] { distance_by_name("taxicab"); }));
}

TEST_CASE("state membership per space kind") {
  Space ps{"sets", make_powerset_lattice({"a", "b"})};
  Space ms{"plane", MetricSpaceSpec{2, DistanceKind::euclidean, 1e-9}};
  Space os{"counter", OrdinalSpace{parse_ordinal("w*2")}};

  CHECK(state_in_space(ps, State(3)));
  CHECK(!state_in_space(ps, State(4)));
  CHECK(!state_in_space(ps, State(-1)));
  CHECK(!state_in_space(ps, State(std::vector<double>{1.0})));

  CHECK(state_in_space(ms, State(std::vector<double>{1.0, 2.0})));
  CHECK(!state_in_space(ms, State(std::vector<double>{1.0})));
  CHECK(!state_in_space(ms, State(2)));

  CHECK(state_in_space(os, State(parse_ordinal("w+5"))));
  CHECK(state_in_space(os, State(parse_ordinal("w*2"))));
  CHECK(!state_in_space(os, State(parse_ordinal("w*2+1"))));
}

TEST_CASE("state equality and distance") {
  Space ps{"sets", make_powerset_lattice({"a", "b", "c"})};
  Space ms{"plane", MetricSpaceSpec{2, DistanceKind::euclidean, 1e-9}};

  CHECK(states_equal_exact(ps, State(5), State(5)));
  CHECK(!states_equal_exact(ps, State(5), State(4)));
  // Powerset distance counts the symmetric difference.
  CHECK(state_distance(ps, State(0b101), State(0b011)) == 2.0);
  CHECK(state_distance(ps, State(0b101), State(0b101)) == 0.0);

  State u = std::vector<double>{1.0, 1.0};
  State v = std::vector<double>{1.0, 1.0 + 1e-12};
  CHECK(!states_equal_exact(ms, u, v));
  CHECK(states_equal(ms, u, v, 1e-9));
  CHECK(!states_equal(ms, u, std::vector<double>{1.0, 1.1}, 1e-9));
}

TEST_CASE("state rendering round trips") {
  Space ps{"sets", make_powerset_lattice({"a", "b", "c"})};
  Space ms{"plane", MetricSpaceSpec{2, DistanceKind::euclidean, 1e-9}};
  Space os{"counter", OrdinalSpace{parse_ordinal("w^2")}};

  CHECK(render_state(ps, State(0)) == "{}");
  CHECK(render_state(ps, State(6)) == "{b,c}");
  CHECK(std::get<int>(parse_state(ps, "{c,b}")) == 6);  // member order is free
  CHECK(std::get<int>(parse_state(ps, "{}")) == 0);

  // Third roots and the like survive the decimal round trip bit for bit.
  std::vector<double> awkward{1.0 / 3.0, -std::sqrt(2.0)};
  std::string text = render_state(ms, State(awkward));
  State back = parse_state(ms, text);
  CHECK(std::get<std::vector<double>>(back) == awkward);
  CHECK(render_state(ms, back) == text);

  CHECK(render_state(os, State(parse_ordinal("w*3+4"))) == "w*3 + 4");
  CHECK(std::get<Ordinal>(parse_state(os, "w*3 + 4")) == parse_ordinal("w*3+4"));

  CHECK(throws_code(Errc::parse_error, [&] { parse_state(ps, "{a,z}"); }));
  CHECK(throws_code(Errc::parse_error, [&] { parse_state(ms, "[1.0]"); }));
  CHECK(throws_code(Errc::parse_error, [&] { parse_state(ms, "[1.0, oops]"); }));
  CHECK(throws_code(Errc::parse_error, [&] { parse_state(os, "w^3"); }));  // above the bound
}

TEST_CASE("non-powerset lattice states render by element name") {
  Space cs{"steps", make_chain_lattice(3)};
  CHECK(render_state(cs, State(2)) == "c2");
  CHECK(std::get<int>(parse_state(cs, "c1")) == 1);
  CHECK(throws_code(Errc::parse_error, [&] { parse_state(cs, "c9"); }));
}
