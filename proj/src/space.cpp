#include "tfx/space.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace tfx {

const char* distance_name(DistanceKind k) {
  return k == DistanceKind::euclidean ? "euclidean" : "max";
}

DistanceKind distance_by_name(const std::string& name) {
  if (name == "euclidean") return DistanceKind::euclidean;
  if (name == "max") return DistanceKind::max;
  fail(Errc::parse_error, "unknown distance \"" + name + "\"");
}

double metric_distance(const MetricSpaceSpec& m, const std::vector<double>& a,
                       const std::vector<double>& b) {
  if (a.size() != b.size() || static_cast<int>(a.size()) != m.dimension)
    fail(Errc::space_mismatch, "vector dimension does not match the space");
  if (m.distance == DistanceKind::euclidean) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  }
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

bool state_in_space(const Space& s, const State& x) {
  if (s.is_lattice())
    return std::holds_alternative<int>(x) && std::get<int>(x) >= 0 &&
           std::get<int>(x) < s.lattice().size();
  if (s.is_metric())
    return std::holds_alternative<std::vector<double>>(x) &&
           static_cast<int>(std::get<std::vector<double>>(x).size()) == s.metric().dimension;
  return std::holds_alternative<Ordinal>(x) && std::get<Ordinal>(x) <= s.ordinal().bound;
}

namespace {

[[noreturn]] void wrong_state_kind(const Space& s) {
  fail(Errc::space_mismatch, std::string("state does not belong to ") + s.kind_name() +
                                 " space \"" + s.name + "\"");
}

int lattice_elem(const Space& s, const State& x) {
  if (!std::holds_alternative<int>(x)) wrong_state_kind(s);
  int e = std::get<int>(x);
  if (e < 0 || e >= s.lattice().size()) wrong_state_kind(s);
  return e;
}

const std::vector<double>& metric_point(const Space& s, const State& x) {
  if (!std::holds_alternative<std::vector<double>>(x)) wrong_state_kind(s);
  return std::get<std::vector<double>>(x);
}

const Ordinal& ordinal_elem(const Space& s, const State& x) {
  if (!std::holds_alternative<Ordinal>(x)) wrong_state_kind(s);
  return std::get<Ordinal>(x);
}

}  // namespace

bool states_equal_exact(const Space& s, const State& a, const State& b) {
  if (s.is_lattice()) return lattice_elem(s, a) == lattice_elem(s, b);
  if (s.is_metric()) return metric_point(s, a) == metric_point(s, b);
  return ordinal_elem(s, a) == ordinal_elem(s, b);
}

bool states_equal(const Space& s, const State& a, const State& b, double eps) {
  if (s.is_metric()) return metric_distance(s.metric(), metric_point(s, a), metric_point(s, b)) <= eps;
  return states_equal_exact(s, a, b);
}

double state_distance(const Space& s, const State& a, const State& b) {
  if (s.is_metric()) return metric_distance(s.metric(), metric_point(s, a), metric_point(s, b));
  if (s.is_lattice()) {
    int x = lattice_elem(s, a), y = lattice_elem(s, b);
    if (s.lattice().is_powerset())
      return static_cast<double>(__builtin_popcount(static_cast<unsigned>(x ^ y)));
    return x == y ? 0.0 : 1.0;
  }
  return ordinal_elem(s, a) == ordinal_elem(s, b) ? 0.0 : 1.0;
}

std::string render_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_state(const Space& s, const State& x) {
  if (s.is_lattice()) return s.lattice().names[lattice_elem(s, x)];
  if (s.is_ordinal()) return to_string(ordinal_elem(s, x));
  const std::vector<double>& v = metric_point(s, x);
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += render_double(v[i]);
  }
  out += "]";
  return out;
}

namespace {

std::string_view trim(std::string_view t) {
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.remove_prefix(1);
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.remove_suffix(1);
  return t;
}

State parse_metric_state(const Space& s, std::string_view text) {
  std::string_view t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    fail(Errc::parse_error, "metric state must look like [x1, x2] , got \"" + std::string(text) + "\"");
  t = t.substr(1, t.size() - 2);

  std::vector<double> v;
  std::string_view rest = t;
  while (true) {
    std::string_view piece = rest;
    std::size_t comma = rest.find(',');
    if (comma != std::string_view::npos) {
      piece = rest.substr(0, comma);
      rest = rest.substr(comma + 1);
    }
    std::string num(trim(piece));
    if (num.empty()) fail(Errc::parse_error, "empty component in \"" + std::string(text) + "\"");
    const char* cs = num.c_str();
    char* end = nullptr;
    double d = std::strtod(cs, &end);
    if (end != cs + num.size())
      fail(Errc::parse_error, "bad number \"" + num + "\" in metric state");
    v.push_back(d);
    if (comma == std::string_view::npos) break;
  }
  if (static_cast<int>(v.size()) != s.metric().dimension)
    fail(Errc::parse_error, "state \"" + std::string(text) + "\" has " +
                                std::to_string(v.size()) + " components, space \"" + s.name +
                                "\" needs " + std::to_string(s.metric().dimension));
  return State{std::move(v)};
}

State parse_lattice_state(const Space& s, std::string_view text) {
  const FiniteLattice& lat = s.lattice();
  std::string t(trim(text));
  if (lat.is_powerset() && t.size() >= 2 && t.front() == '{' && t.back() == '}') {
    // Member list in any order, e.g. "{b,a}".
    int mask = 0;
    std::string_view inner = std::string_view(t).substr(1, t.size() - 2);
    while (!inner.empty()) {
      std::size_t comma = inner.find(',');
      std::string member(trim(comma == std::string_view::npos ? inner : inner.substr(0, comma)));
      inner = comma == std::string_view::npos ? std::string_view{} : inner.substr(comma + 1);
      if (member.empty()) fail(Errc::parse_error, "empty member in set \"" + t + "\"");
      int bit = -1;
      const auto& base = *lat.powerset_base;
      for (std::size_t i = 0; i < base.size(); ++i)
        if (base[i] == member) bit = static_cast<int>(i);
      if (bit == -1)
        fail(Errc::parse_error, "\"" + member + "\" is not a base element of space \"" + s.name + "\"");
      mask |= 1 << bit;
    }
    return State{mask};
  }
  int e = lat.element_by_name(t);
  if (e == -1)
    fail(Errc::parse_error, "\"" + t + "\" is not an element of space \"" + s.name + "\"");
  return State{e};
}

}  // namespace

State parse_state(const Space& s, std::string_view text) {
  if (s.is_metric()) return parse_metric_state(s, text);
  if (s.is_lattice()) return parse_lattice_state(s, text);
  Ordinal o = parse_ordinal(std::string(trim(text)));
  if (!(o <= s.ordinal().bound))
    fail(Errc::parse_error, "ordinal " + to_string(o) + " exceeds the bound " +
                                to_string(s.ordinal().bound) + " of space \"" + s.name + "\"");
  return State{o};
}

}  // namespace tfx
