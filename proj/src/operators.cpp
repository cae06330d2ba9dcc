#include "tfx/operators.hpp"

namespace tfx {

const char* op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::monotone: return "monotone";
    case OpKind::contraction: return "contraction";
    case OpKind::unchecked: return "unchecked";
  }
  return "?";
}

OpKind op_kind_by_name(const std::string& name) {
  if (name == "monotone") return OpKind::monotone;
  if (name == "contraction") return OpKind::contraction;
  if (name == "unchecked") return OpKind::unchecked;
  fail(Errc::parse_error, "unknown operator kind \"" + name + "\"");
}

namespace {

int powerset_carrier(const Space& s, const std::string& opname) {
  if (!s.is_lattice() || !s.lattice().is_powerset())
    fail(Errc::space_mismatch, "operator \"" + opname + "\" needs a powerset lattice space");
  return s.lattice().size();
}

struct Validator {
  const std::string& name;
  const Space& space;

  void operator()(const AffineMap& f) const {
    if (!space.is_metric())
      fail(Errc::space_mismatch, "affine operator \"" + name + "\" needs a metric space");
    const std::size_t d = static_cast<std::size_t>(space.metric().dimension);
    if (f.matrix.size() != d * d || f.offset.size() != d)
      fail(Errc::validation_error, "affine operator \"" + name + "\" has " +
                                       std::to_string(f.matrix.size()) + " matrix entries and " +
                                       std::to_string(f.offset.size()) + " offset entries for dimension " +
                                       std::to_string(d));
  }
  void operator()(const UnionWith& f) const {
    int n = powerset_carrier(space, name);
    if (f.mask < 0 || f.mask >= n) fail(Errc::validation_error, "union set out of range");
  }
  void operator()(const IntersectWith& f) const {
    int n = powerset_carrier(space, name);
    if (f.mask < 0 || f.mask >= n) fail(Errc::validation_error, "intersection set out of range");
  }
  void operator()(const RelationImage& f) const {
    int n = powerset_carrier(space, name);
    int bits = static_cast<int>(space.lattice().powerset_base->size());
    if (f.seed_mask < 0 || f.seed_mask >= n)
      fail(Errc::validation_error, "seed set out of range");
    for (auto [u, v] : f.edges)
      if (u < 0 || u >= bits || v < 0 || v >= bits)
        fail(Errc::validation_error, "edge references a missing base element");
  }
  void operator()(const TableMap& f) const {
    if (!space.is_lattice())
      fail(Errc::space_mismatch, "table operator \"" + name + "\" needs a lattice space");
    int n = space.lattice().size();
    if (static_cast<int>(f.table.size()) != n)
      fail(Errc::validation_error, "table has " + std::to_string(f.table.size()) +
                                       " rows for a lattice of " + std::to_string(n));
    for (int v : f.table)
      if (v < 0 || v >= n) fail(Errc::validation_error, "table entry out of range");
  }
  void operator()(const IdentityMap&) const {}
  void operator()(const ConstantMap& f) const {
    if (!state_in_space(space, f.value))
      fail(Errc::validation_error, "constant operator \"" + name + "\" value is outside the space");
  }
  void operator()(const ClampSuccessor&) const {
    if (!space.is_ordinal())
      fail(Errc::space_mismatch, "clamp-successor operator \"" + name + "\" needs an ordinal space");
  }
  void operator()(const CustomMap& f) const {
    if (!f.fn) fail(Errc::validation_error, "custom operator \"" + name + "\" has no function");
  }
};

struct Applier {
  const Operator& op;
  const State& x;

  State operator()(const AffineMap& f) const {
    const auto& v = std::get<std::vector<double>>(x);
    const std::size_t d = v.size();
    std::vector<double> out(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = f.offset[i];
      for (std::size_t j = 0; j < d; ++j) acc += f.matrix[i * d + j] * v[j];
      out[i] = acc;
    }
    return State{std::move(out)};
  }
  State operator()(const UnionWith& f) const { return State{std::get<int>(x) | f.mask}; }
  State operator()(const IntersectWith& f) const { return State{std::get<int>(x) & f.mask}; }
  State operator()(const RelationImage& f) const {
    int in = std::get<int>(x);
    int out = f.seed_mask;
    for (auto [u, v] : f.edges) {
      if (!f.pre && (in & (1 << u))) out |= 1 << v;
      if (f.pre && (in & (1 << v))) out |= 1 << u;
    }
    return State{out};
  }
  State operator()(const TableMap& f) const { return State{f.table[std::get<int>(x)]}; }
  State operator()(const IdentityMap&) const { return x; }
  State operator()(const ConstantMap& f) const { return f.value; }
  State operator()(const ClampSuccessor&) const {
    const Ordinal& a = std::get<Ordinal>(x);
    const Ordinal& bound = op.space->ordinal().bound;
    Ordinal next = succ(a);
    return State{next <= bound ? next : bound};
  }
  State operator()(const CustomMap& f) const { return f.fn(x); }
};

}  // namespace

State Operator::apply(const State& x) const {
  if (!state_in_space(*space, x))
    fail(Errc::space_mismatch, "operator \"" + name + "\" applied to a state outside space \"" +
                                   space->name + "\"");
  State out = std::visit(Applier{*this, x}, family);
  if (!state_in_space(*space, out))
    fail(Errc::space_mismatch, "operator \"" + name + "\" left space \"" + space->name + "\"");
  return out;
}

Operator make_operator(std::string name, const Space& space, OpKind kind, double factor,
                       OpFamily family) {
  if (kind == OpKind::contraction) {
    if (!space.is_metric())
      fail(Errc::validation_error,
           "operator \"" + name + "\" declares a contraction on a non-metric space");
    if (!(factor > 0.0 && factor < 1.0))
      fail(Errc::bad_factor, "operator \"" + name + "\" declares contraction factor " +
                                 render_double(factor) + ", need 0 < factor < 1");
  } else {
    factor = 0.0;
  }
  std::visit(Validator{name, space}, family);

  Operator op;
  op.name = std::move(name);
  op.space = &space;
  op.kind = kind;
  op.factor = factor;
  op.family = std::move(family);
  return op;
}

DiscrepancyMeasure step_residual_measure(const Space& s) {
  return DiscrepancyMeasure{
      "step_residual",
      [&s](const State& x, const State& fx) { return state_distance(s, x, fx); }};
}

}  // namespace tfx
