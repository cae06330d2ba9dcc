#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tfx/errors.hpp"
#include "tfx/lattice.hpp"
#include "tfx/metric.hpp"
#include "tfx/ordinal.hpp"

namespace tfx {

// Carrier = ordinals <= bound. Iteration in this space climbs toward the
// bound, so limits of strictly increasing runs stay representable.
struct OrdinalSpace {
  Ordinal bound;
};

struct Space {
  std::string name;
  std::variant<FiniteLattice, MetricSpaceSpec, OrdinalSpace> kind;

  bool is_lattice() const { return std::holds_alternative<FiniteLattice>(kind); }
  bool is_metric() const { return std::holds_alternative<MetricSpaceSpec>(kind); }
  bool is_ordinal() const { return std::holds_alternative<OrdinalSpace>(kind); }
  const FiniteLattice& lattice() const { return std::get<FiniteLattice>(kind); }
  const MetricSpaceSpec& metric() const { return std::get<MetricSpaceSpec>(kind); }
  const OrdinalSpace& ordinal() const { return std::get<OrdinalSpace>(kind); }
  const char* kind_name() const {
    return is_lattice() ? "lattice" : is_metric() ? "metric" : "ordinal";
  }
};

// One point of a space: lattice element index, metric vector, or ordinal.
using State = std::variant<int, std::vector<double>, Ordinal>;

bool state_in_space(const Space& s, const State& x);

// Structural equality. Metric states compare exactly componentwise here;
// states_equal applies the tolerant comparison instead.
bool states_equal_exact(const Space& s, const State& a, const State& b);
bool states_equal(const Space& s, const State& a, const State& b, double eps);

// Metric spaces use their declared distance. Powerset lattices measure the
// symmetric difference, other lattices and ordinals the discrete 0/1 gap, so
// every space has a discrepancy that vanishes exactly at equal states.
double state_distance(const Space& s, const State& a, const State& b);

// %.17g: shortest form that strtod parses back to the identical bits.
std::string render_double(double v);

std::string render_state(const Space& s, const State& x);
// Inverse of render_state, with set-literal flexibility for powersets
// ("{b,a}" normalizes). ParseError on malformed text, including states
// outside the space.
State parse_state(const Space& s, std::string_view text);

}  // namespace tfx
