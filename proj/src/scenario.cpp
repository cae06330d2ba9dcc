#include "tfx/scenario.hpp"

#include <cctype>
#include <filesystem>
#include <initializer_list>

#include "tfx/checks.hpp"
#include "tfx/errors.hpp"

namespace tfx {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& ctx, const std::string& msg) {
  fail(Errc::validation_error, ctx + ": " + msg);
}

void require_object(const json& o, const std::string& ctx) {
  if (!o.is_object()) bad(ctx, "expected an object");
}

void check_keys(const json& o, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  require_object(o, ctx);
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) bad(ctx, "unknown key '" + it.key() + "'");
  }
}

const json* find(const json& o, const char* key) {
  if (!o.is_object()) return nullptr;
  auto it = o.find(key);
  return it == o.end() ? nullptr : &*it;
}

const json& need(const json& o, const char* key, const std::string& ctx) {
  const json* p = find(o, key);
  if (p == nullptr) bad(ctx, "missing key '" + std::string(key) + "'");
  return *p;
}

std::string need_str(const json& o, const char* key, const std::string& ctx) {
  const json& v = need(o, key, ctx);
  if (!v.is_string()) bad(ctx, "'" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::string opt_str(const json& o, const char* key, const std::string& ctx, std::string def) {
  const json* p = find(o, key);
  if (p == nullptr) return def;
  if (!p->is_string()) bad(ctx, "'" + std::string(key) + "' must be a string");
  return p->get<std::string>();
}

double need_num(const json& o, const char* key, const std::string& ctx) {
  const json& v = need(o, key, ctx);
  if (!v.is_number()) bad(ctx, "'" + std::string(key) + "' must be a number");
  return v.get<double>();
}

double opt_num(const json& o, const char* key, const std::string& ctx, double def) {
  const json* p = find(o, key);
  if (p == nullptr) return def;
  if (!p->is_number()) bad(ctx, "'" + std::string(key) + "' must be a number");
  return p->get<double>();
}

std::int64_t need_int(const json& o, const char* key, const std::string& ctx) {
  const json& v = need(o, key, ctx);
  if (!v.is_number_integer()) bad(ctx, "'" + std::string(key) + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t opt_u64(const json& o, const char* key, const std::string& ctx, std::uint64_t def) {
  const json* p = find(o, key);
  if (p == nullptr) return def;
  if (!p->is_number_unsigned()) {
    bad(ctx, "'" + std::string(key) + "' must be a non-negative integer");
  }
  return p->get<std::uint64_t>();
}

void require_ident(const std::string& s, const std::string& ctx) {
  if (s.empty()) bad(ctx, "names must not be empty");
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-')) {
      bad(ctx, "name '" + s + "' may use letters, digits, '_' and '-' only");
    }
  }
}

Ordinal ord_field(const json& o, const char* key, const std::string& ctx) {
  return parse_ordinal(need_str(o, key, ctx));
}

std::vector<std::string> string_list(const json& v, const std::string& ctx) {
  if (!v.is_array()) bad(ctx, "expected an array of strings");
  std::vector<std::string> out;
  for (const json& e : v) {
    if (!e.is_string()) bad(ctx, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<double> number_list(const json& v, const std::string& ctx) {
  if (!v.is_array()) bad(ctx, "expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) bad(ctx, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

State state_from_json(const Space& s, const json& j, const std::string& ctx) {
  if (j.is_string()) return parse_state(s, j.get<std::string>());
  if (j.is_array() && s.is_metric()) {
    State x = number_list(j, ctx);
    if (!state_in_space(s, x)) {
      bad(ctx, "state has the wrong dimension for space '" + s.name + "'");
    }
    return x;
  }
  bad(ctx, "states are strings, or number arrays on metric spaces");
}

template <class T>
const T& find_named(const T* begin, const T* end, const std::string& name, const char* what) {
  for (const T* it = begin; it != end; ++it) {
    if (it->name == name) return *it;
  }
  fail(Errc::validation_error, std::string("unknown ") + what + " '" + name + "'");
}

const Space& find_space(const Scenario& sc, const std::string& name) {
  for (const Space& s : sc.spaces) {
    if (s.name == name) return s;
  }
  fail(Errc::validation_error, "unknown space '" + name + "'");
}

const Operator& find_operator(const Scenario& sc, const std::string& name) {
  return find_named(sc.operators.data(), sc.operators.data() + sc.operators.size(), name,
                    "operator");
}

const SemanticGame& find_game(const Scenario& sc, const std::string& name) {
  return find_named(sc.games.data(), sc.games.data() + sc.games.size(), name, "game");
}

const NestedGame& find_nested(const Scenario& sc, const std::string& name) {
  return find_named(sc.nested.data(), sc.nested.data() + sc.nested.size(), name, "nested game");
}

const NamedSystem& find_system(const Scenario& sc, const std::string& name) {
  return find_named(sc.systems.data(), sc.systems.data() + sc.systems.size(), name,
                    "transition system");
}

void load_space(Scenario& sc, const json& j, std::size_t index) {
  std::string ctx = "spaces[" + std::to_string(index) + "]";
  require_object(j, ctx);
  std::string name = need_str(j, "name", ctx);
  ctx = "space '" + name + "'";
  require_ident(name, ctx);
  for (const Space& s : sc.spaces) {
    if (s.name == name) bad(ctx, "duplicate space name");
  }
  std::string kind = need_str(j, "kind", ctx);
  if (kind == "powerset") {
    check_keys(j, {"name", "kind", "base"}, ctx);
    sc.spaces.push_back(
        Space{name, make_powerset_lattice(string_list(need(j, "base", ctx), ctx))});
  } else if (kind == "chain") {
    check_keys(j, {"name", "kind", "size"}, ctx);
    sc.spaces.push_back(
        Space{name, make_chain_lattice(static_cast<int>(need_int(j, "size", ctx)))});
  } else if (kind == "covers") {
    check_keys(j, {"name", "kind", "names", "covers"}, ctx);
    std::vector<std::string> names = string_list(need(j, "names", ctx), ctx);
    const json& cov = need(j, "covers", ctx);
    if (!cov.is_array()) bad(ctx, "'covers' must be an array of [lower, upper] pairs");
    std::vector<std::pair<int, int>> covers;
    for (const json& e : cov) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
          !e[1].is_number_integer()) {
        bad(ctx, "'covers' must be an array of [lower, upper] index pairs");
      }
      covers.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    sc.spaces.push_back(Space{name, make_cover_lattice(std::move(names), std::move(covers))});
  } else if (kind == "metric") {
    check_keys(j, {"name", "kind", "dimension", "distance", "eq_tolerance"}, ctx);
    MetricSpaceSpec spec;
    spec.dimension = static_cast<int>(need_int(j, "dimension", ctx));
    if (spec.dimension < 1) bad(ctx, "dimension must be at least 1");
    spec.distance = distance_by_name(opt_str(j, "distance", ctx, "euclidean"));
    spec.eq_tolerance = opt_num(j, "eq_tolerance", ctx, 1e-9);
    if (!(spec.eq_tolerance > 0.0)) bad(ctx, "eq_tolerance must be positive");
    sc.spaces.push_back(Space{name, spec});
  } else if (kind == "ordinal") {
    check_keys(j, {"name", "kind", "bound"}, ctx);
    sc.spaces.push_back(Space{name, OrdinalSpace{ord_field(j, "bound", ctx)}});
  } else {
    bad(ctx, "unknown space kind '" + kind + "'");
  }
}

int base_index(const FiniteLattice& lat, const std::string& element, const std::string& ctx) {
  const auto& base = *lat.powerset_base;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base[i] == element) return static_cast<int>(i);
  }
  bad(ctx, "unknown base element '" + element + "'");
}

void load_operator(Scenario& sc, const json& j, std::size_t index) {
  std::string ctx = "operators[" + std::to_string(index) + "]";
  require_object(j, ctx);
  std::string name = need_str(j, "name", ctx);
  ctx = "operator '" + name + "'";
  require_ident(name, ctx);
  for (const Operator& o : sc.operators) {
    if (o.name == name) bad(ctx, "duplicate operator name");
  }
  const Space& space = find_space(sc, need_str(j, "space", ctx));
  std::string family = need_str(j, "family", ctx);
  OpKind kind = op_kind_by_name(opt_str(j, "kind", ctx, "unchecked"));
  double factor = opt_num(j, "factor", ctx, 0.0);

  OpFamily fam;
  if (family == "affine") {
    check_keys(j, {"name", "space", "family", "kind", "factor", "matrix", "offset"}, ctx);
    const json& rows = need(j, "matrix", ctx);
    if (!rows.is_array() || rows.empty()) bad(ctx, "'matrix' must be an array of rows");
    AffineMap aff;
    for (const json& row : rows) {
      std::vector<double> r = number_list(row, ctx);
      if (r.size() != rows.size()) bad(ctx, "'matrix' must be square");
      aff.matrix.insert(aff.matrix.end(), r.begin(), r.end());
    }
    aff.offset = number_list(need(j, "offset", ctx), ctx);
    fam = std::move(aff);
  } else if (family == "union_with" || family == "intersect_with") {
    check_keys(j, {"name", "space", "family", "kind", "factor", "with"}, ctx);
    if (!space.is_lattice()) bad(ctx, family + " needs a powerset space");
    int mask = std::get<int>(parse_state(space, need_str(j, "with", ctx)));
    if (family == "union_with") {
      fam = UnionWith{mask};
    } else {
      fam = IntersectWith{mask};
    }
  } else if (family == "relation_image") {
    check_keys(j, {"name", "space", "family", "kind", "factor", "edges", "seed", "direction"},
               ctx);
    if (!space.is_lattice() || !space.lattice().is_powerset()) {
      bad(ctx, "relation_image needs a powerset space");
    }
    RelationImage ri;
    const json& edges = need(j, "edges", ctx);
    if (!edges.is_array()) bad(ctx, "'edges' must be an array of [from, to] pairs");
    for (const json& e : edges) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        bad(ctx, "'edges' must be an array of [from, to] name pairs");
      }
      ri.edges.emplace_back(base_index(space.lattice(), e[0].get<std::string>(), ctx),
                            base_index(space.lattice(), e[1].get<std::string>(), ctx));
    }
    ri.seed_mask = std::get<int>(parse_state(space, need_str(j, "seed", ctx)));
    std::string dir = opt_str(j, "direction", ctx, "post");
    if (dir != "post" && dir != "pre") bad(ctx, "'direction' is 'post' or 'pre'");
    ri.pre = dir == "pre";
    fam = std::move(ri);
  } else if (family == "table") {
    check_keys(j, {"name", "space", "family", "kind", "factor", "table"}, ctx);
    const json& tab = need(j, "table", ctx);
    if (!tab.is_array()) bad(ctx, "'table' must be an array of element indices");
    TableMap tm;
    for (const json& e : tab) {
      if (!e.is_number_integer()) bad(ctx, "'table' must be an array of element indices");
      tm.table.push_back(e.get<int>());
    }
    fam = std::move(tm);
  } else if (family == "identity") {
    check_keys(j, {"name", "space", "family", "kind", "factor"}, ctx);
    fam = IdentityMap{};
  } else if (family == "constant") {
    check_keys(j, {"name", "space", "family", "kind", "factor", "value"}, ctx);
    fam = ConstantMap{state_from_json(space, need(j, "value", ctx), ctx)};
  } else if (family == "clamp_successor") {
    check_keys(j, {"name", "space", "family", "kind", "factor"}, ctx);
    fam = ClampSuccessor{};
  } else {
    bad(ctx, "unknown operator family '" + family + "'");
  }

  Operator op = make_operator(name, space, kind, factor, std::move(fam));
  // Declared claims are verified on the way in; a violation stops the load.
  run_declared_check(op, sc.defaults.check_samples, sc.defaults.seed);
  sc.operators.push_back(std::move(op));
}

void load_game(Scenario& sc, const json& j, std::size_t index) {
  std::string ctx = "games[" + std::to_string(index) + "]";
  require_object(j, ctx);
  std::string name = need_str(j, "name", ctx);
  ctx = "game '" + name + "'";
  require_ident(name, ctx);
  for (const SemanticGame& g : sc.games) {
    if (g.name == name) bad(ctx, "duplicate game name");
  }
  check_keys(j, {"name", "space", "family", "rate", "signal", "measure"}, ctx);
  const Space& space = find_space(sc, need_str(j, "space", ctx));
  GameFamily family = game_family_by_name(need_str(j, "family", ctx));
  double rate = 0.5;
  if (family == GameFamily::toward_signal) {
    rate = need_num(j, "rate", ctx);
  } else if (find(j, "rate") != nullptr) {
    bad(ctx, "'rate' only applies to toward_signal");
  }

  const json& sig = need(j, "signal", ctx);
  check_keys(sig, {"rounds", "tail"}, ctx + " signal");
  SignalSchedule schedule;
  if (const json* rounds = find(sig, "rounds")) {
    if (!rounds->is_array()) bad(ctx, "'signal.rounds' must be an array of states");
    for (const json& e : *rounds) schedule.rounds.push_back(state_from_json(space, e, ctx));
  }
  if (const json* tail = find(sig, "tail")) {
    schedule.tail = state_from_json(space, *tail, ctx);
  }

  MeasureKind measure = space.is_metric() ? MeasureKind::signal_distance : MeasureKind::step_change;
  if (const json* m = find(j, "measure")) {
    if (!m->is_string()) bad(ctx, "'measure' must be a string");
    measure = measure_kind_by_name(m->get<std::string>());
  }
  sc.games.push_back(
      make_semantic_game(name, space, family, rate, std::move(schedule), measure));
}

void load_nested(Scenario& sc, const json& j, std::size_t index) {
  std::string ctx = "nested[" + std::to_string(index) + "]";
  require_object(j, ctx);
  std::string name = need_str(j, "name", ctx);
  ctx = "nested game '" + name + "'";
  require_ident(name, ctx);
  for (const NestedGame& g : sc.nested) {
    if (g.name == name) bad(ctx, "duplicate nested game name");
  }
  check_keys(j, {"name", "outer_space", "inner_space", "outer", "inner", "declared_factor"}, ctx);
  const Space& outer = find_space(sc, need_str(j, "outer_space", ctx));
  const Space& inner = find_space(sc, need_str(j, "inner_space", ctx));
  const json& jo = need(j, "outer", ctx);
  const json& ji = need(j, "inner", ctx);
  check_keys(jo, {"self", "other", "offset"}, ctx + " outer");
  check_keys(ji, {"self", "other", "offset"}, ctx + " inner");
  std::optional<double> declared;
  if (find(j, "declared_factor") != nullptr) declared = need_num(j, "declared_factor", ctx);
  sc.nested.push_back(make_nested_game(
      name, outer, inner, need_num(jo, "self", ctx), need_num(jo, "other", ctx),
      number_list(need(jo, "offset", ctx), ctx), need_num(ji, "self", ctx),
      need_num(ji, "other", ctx), number_list(need(ji, "offset", ctx), ctx), declared));
}

void load_system(Scenario& sc, const json& j, std::size_t index) {
  std::string ctx = "transition_systems[" + std::to_string(index) + "]";
  require_object(j, ctx);
  std::string name = need_str(j, "name", ctx);
  ctx = "transition system '" + name + "'";
  require_ident(name, ctx);
  for (const NamedSystem& s : sc.systems) {
    if (s.name == name) bad(ctx, "duplicate transition system name");
  }
  check_keys(j, {"name", "states", "edges", "labels"}, ctx);
  std::vector<std::string> states = string_list(need(j, "states", ctx), ctx);
  const json& edges = need(j, "edges", ctx);
  if (!edges.is_array()) bad(ctx, "'edges' must be an array of [from, to] pairs");
  std::vector<std::pair<std::string, std::string>> edge_names;
  for (const json& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
      bad(ctx, "'edges' must be an array of [from, to] name pairs");
    }
    edge_names.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  std::map<std::string, std::vector<std::string>> labels;
  if (const json* jl = find(j, "labels")) {
    require_object(*jl, ctx + " labels");
    for (auto it = jl->begin(); it != jl->end(); ++it) {
      labels[it.key()] = string_list(it.value(), ctx + " label '" + it.key() + "'");
    }
  }
  sc.systems.push_back(
      {std::move(name), make_transition_system(std::move(states), std::move(edge_names),
                                               std::move(labels))});
}

}  // namespace

Scenario load_scenario_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(Errc::parse_error, "scenario JSON: expected a top-level object");
  check_keys(doc,
             {"name", "defaults", "spaces", "operators", "games", "nested", "transition_systems",
              "runs"},
             "scenario");

  Scenario sc;
  sc.name = need_str(doc, "name", "scenario");
  require_ident(sc.name, "scenario");

  if (const json* d = find(doc, "defaults")) {
    check_keys(*d, {"seed", "check_samples", "budget"}, "defaults");
    sc.defaults.seed = opt_u64(*d, "seed", "defaults", sc.defaults.seed);
    sc.defaults.check_samples = opt_u64(*d, "check_samples", "defaults", sc.defaults.check_samples);
    if (sc.defaults.check_samples == 0) bad("defaults", "check_samples must be positive");
    if (find(*d, "budget") != nullptr) sc.defaults.budget = ord_field(*d, "budget", "defaults");
  }

  auto section = [&](const char* key, auto&& loader) {
    const json* arr = find(doc, key);
    if (arr == nullptr) return;
    if (!arr->is_array()) bad("scenario", std::string("'") + key + "' must be an array");
    for (std::size_t i = 0; i < arr->size(); ++i) loader(sc, (*arr)[i], i);
  };
  section("spaces", load_space);
  section("operators", load_operator);
  section("games", load_game);
  section("nested", load_nested);
  section("transition_systems", load_system);

  sc.runs = json::array();
  if (const json* runs = find(doc, "runs")) {
    if (!runs->is_array()) bad("scenario", "'runs' must be an array");
    for (std::size_t i = 0; i < runs->size(); ++i) {
      const json& r = (*runs)[i];
      std::string ctx = "runs[" + std::to_string(i) + "]";
      require_object(r, ctx);
      std::string name = need_str(r, "name", ctx);
      require_ident(name, ctx);
      for (const json& prev : sc.runs) {
        if (prev["name"] == name) bad(ctx, "duplicate run name '" + name + "'");
      }
      std::string directive = need_str(r, "directive", ctx);
      if (directive != "iterate" && directive != "uniqueness" && directive != "nested" &&
          directive != "oracle-check") {
        bad(ctx, "unknown directive '" + directive + "'");
      }
      sc.runs.push_back(r);
    }
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  return load_scenario_text(read_text_file(path));
}

bool ScenarioReport::all_passed() const {
  for (const RunReport& r : runs) {
    if (!r.passed) return false;
  }
  return true;
}

namespace {

struct RunCtx {
  const Scenario& sc;
  const json& run;
  RunReport& rr;
  std::string out_base;  // out_dir/<scenario>__<run>
  std::string ctx;       // "run '<name>'"
};

Ordinal run_budget(const RunCtx& c) {
  if (find(c.run, "budget") != nullptr) return ord_field(c.run, "budget", c.ctx);
  return c.sc.defaults.budget;
}

std::string expect_field(const RunCtx& c, const char* first, const char* second) {
  std::string e = opt_str(c.run, "expect", c.ctx, first);
  if (e != first && e != second) {
    bad(c.ctx, std::string("'expect' is '") + first + "' or '" + second + "'");
  }
  return e;
}

void write_artifact(RunCtx& c, const std::string& ext, const std::string& content) {
  std::string path = c.out_base + ext;
  write_text_file(path, content);
  c.rr.artifacts.push_back(path);
}

void exec_iterate(RunCtx& c) {
  check_keys(c.run, {"name", "directive", "operator", "game", "initial", "budget", "expect"},
             c.ctx);
  bool has_op = find(c.run, "operator") != nullptr;
  bool has_game = find(c.run, "game") != nullptr;
  if (has_op == has_game) bad(c.ctx, "give exactly one of 'operator' or 'game'");
  std::string expect = expect_field(c, "converge", "diverge");

  EngineLimits limits;
  limits.budget = run_budget(c);

  const Space* space = nullptr;
  IterateResult res;
  if (has_op) {
    const Operator& op = find_operator(c.sc, need_str(c.run, "operator", c.ctx));
    space = op.space;
    State x0 = state_from_json(*space, need(c.run, "initial", c.ctx), c.ctx);
    res = iterate_to_fixpoint(op, x0, limits);
  } else {
    const SemanticGame& g = find_game(c.sc, need_str(c.run, "game", c.ctx));
    space = g.space;
    State x0 = state_from_json(*space, need(c.run, "initial", c.ctx), c.ctx);
    res = run_semantic_game(g, x0, limits);
  }

  write_artifact(c, ".trace", render_trace(make_trace_file(res.trace)));
  if (res.certificate) {
    write_artifact(c, ".cert", render_cert(make_cert_file(*res.certificate, *space)));
  }

  const char* outcome = run_outcome_name(res.trace.outcome);
  if (expect == "converge") {
    if (res.certificate) {
      c.rr.passed = true;
      c.rr.detail = "converged at stage " + to_string(res.certificate->closure) + ", residual " +
                    render_double(res.certificate->residual);
    } else {
      c.rr.detail = std::string("expected convergence, outcome ") + outcome;
    }
  } else {
    if (!res.certificate) {
      c.rr.passed = true;
      c.rr.detail = std::string("did not settle, as expected (") + outcome + ")";
    } else {
      c.rr.detail = "expected divergence, converged at stage " +
                    to_string(res.certificate->closure);
    }
  }
}

void exec_uniqueness(RunCtx& c) {
  check_keys(c.run, {"name", "directive", "operator", "initials", "budget", "expect"}, c.ctx);
  const Operator& op = find_operator(c.sc, need_str(c.run, "operator", c.ctx));
  const json& ji = need(c.run, "initials", c.ctx);
  if (!ji.is_array() || ji.empty()) bad(c.ctx, "'initials' must be a non-empty array");
  std::vector<State> initials;
  for (const json& e : ji) initials.push_back(state_from_json(*op.space, e, c.ctx));
  std::string expect = expect_field(c, "unique", "multiple");

  EngineLimits limits;
  limits.budget = run_budget(c);
  UniquenessReport rep = verify_uniqueness(op, initials, limits);
  write_artifact(c, ".uniq", render_uniq(make_uniq_file(rep, *op.space)));

  const char* verdict = uniqueness_verdict_name(rep.verdict);
  c.rr.passed = expect == verdict;
  c.rr.detail = std::string("verdict ") + verdict + ", " + std::to_string(rep.values.size()) +
                " value class(es)";
  if (!c.rr.passed) c.rr.detail += ", expected " + expect;
}

void exec_nested(RunCtx& c) {
  check_keys(c.run,
             {"name", "directive", "game", "outer_initial", "inner_initial", "budget", "expect"},
             c.ctx);
  const NestedGame& g = find_nested(c.sc, need_str(c.run, "game", c.ctx));
  State x0 = state_from_json(*g.outer_space, need(c.run, "outer_initial", c.ctx), c.ctx);
  State y0 = state_from_json(*g.inner_space, need(c.run, "inner_initial", c.ctx), c.ctx);
  std::string expect = expect_field(c, "converge", "diverge");

  EngineLimits outer_limits;
  outer_limits.budget = run_budget(c);
  NestedResult nr = solve_nested(g, x0, y0, outer_limits, {});

  write_artifact(c, ".trace", render_trace(make_trace_file(nr.outer.trace)));
  if (nr.outer.certificate) {
    write_artifact(c, ".cert", render_cert(make_cert_file(*nr.outer.certificate, *g.outer_space)));
  }

  const char* outcome = run_outcome_name(nr.outer.trace.outcome);
  if (expect == "converge") {
    if (nr.outer.certificate) {
      c.rr.passed = true;
      c.rr.detail = "outer settled at stage " + to_string(nr.outer.certificate->closure);
      if (nr.inner_value) {
        c.rr.detail += ", inner value " + render_state(*g.inner_space, *nr.inner_value);
      }
      c.rr.detail += ", " + std::to_string(nr.inner_closures.size()) + " inner solves";
    } else {
      c.rr.detail = std::string("expected convergence, outcome ") + outcome;
    }
  } else {
    if (!nr.outer.certificate) {
      c.rr.passed = true;
      c.rr.detail = std::string("did not settle, as expected (") + outcome + ")";
    } else {
      c.rr.detail =
          "expected divergence, converged at stage " + to_string(nr.outer.certificate->closure);
    }
  }
}

void exec_oracle_check(RunCtx& c) {
  std::string kind = need_str(c.run, "check", c.ctx);
  OracleFile of;
  of.kind = kind;
  EngineLimits limits;
  limits.budget = c.sc.defaults.budget;

  if (kind == "lfp" || kind == "gfp") {
    check_keys(c.run, {"name", "directive", "check", "operator", "expect_value"}, c.ctx);
    const Operator& op = find_operator(c.sc, need_str(c.run, "operator", c.ctx));
    if (!op.space->is_lattice()) bad(c.ctx, kind + " checks need a lattice operator");
    const FiniteLattice& lat = op.space->lattice();
    of.space_name = op.space->name;

    int oracle_v = kind == "lfp" ? lfp_bruteforce(op, lat) : gfp_bruteforce(op, lat);
    State start = kind == "lfp" ? State(lat.bottom) : State(lat.top);
    IterateResult res = iterate_to_fixpoint(op, start, limits);
    of.rows.emplace_back("oracle", render_state(*op.space, oracle_v));
    bool agree = false;
    if (res.certificate) {
      of.rows.emplace_back("engine", render_state(*op.space, res.certificate->value));
      agree = states_equal_exact(*op.space, res.certificate->value, State(oracle_v));
    } else {
      of.rows.emplace_back("engine", std::string("(no fixpoint: ") +
                                         run_outcome_name(res.trace.outcome) + ")");
    }
    bool expect_ok = true;
    if (find(c.run, "expect_value") != nullptr) {
      State want = parse_state(*op.space, need_str(c.run, "expect_value", c.ctx));
      of.rows.emplace_back("expected", render_state(*op.space, want));
      expect_ok = states_equal_exact(*op.space, want, State(oracle_v));
    }
    of.rows.emplace_back("agree", agree ? "1" : "0");
    c.rr.passed = agree && expect_ok;
    c.rr.detail = kind + " oracle " + render_state(*op.space, oracle_v) +
                  (agree ? ", engine agrees" : ", engine disagrees");
    if (!expect_ok) c.rr.detail += ", expected value differs";
  } else if (kind == "enumerate") {
    check_keys(c.run, {"name", "directive", "check", "operator", "expect_count", "expect_values"},
               c.ctx);
    const Operator& op = find_operator(c.sc, need_str(c.run, "operator", c.ctx));
    if (!op.space->is_lattice()) bad(c.ctx, "enumerate checks need a lattice operator");
    of.space_name = op.space->name;
    std::vector<int> fps = enumerate_fixpoints(op, op.space->lattice());
    of.rows.emplace_back("count", std::to_string(fps.size()));
    for (int v : fps) of.rows.emplace_back("value", render_state(*op.space, v));

    c.rr.passed = true;
    c.rr.detail = std::to_string(fps.size()) + " fixed point(s)";
    if (find(c.run, "expect_count") != nullptr) {
      std::uint64_t want = opt_u64(c.run, "expect_count", c.ctx, 0);
      if (want != fps.size()) {
        c.rr.passed = false;
        c.rr.detail += ", expected " + std::to_string(want);
      }
    }
    if (const json* ev = find(c.run, "expect_values")) {
      std::vector<std::string> want = string_list(*ev, c.ctx);
      // Rendered element order is index order, which the scenario must match.
      std::vector<std::string> got;
      for (int v : fps) got.push_back(render_state(*op.space, v));
      if (want != got) {
        c.rr.passed = false;
        c.rr.detail += ", expected values differ";
      }
    }
  } else if (kind == "mu") {
    check_keys(c.run, {"name", "directive", "check", "system", "label", "expect_members"}, c.ctx);
    const NamedSystem& ns = find_system(c.sc, need_str(c.run, "system", c.ctx));
    const TransitionSystem& ts = ns.system;
    std::string label = need_str(c.run, "label", c.ctx);

    int via_mu = mu_reachability(ts, label);
    int target = ts.labels.at(label);
    int via_bfs = bfs_reachable(ts, target);

    // Third route: the engine's least fixed point of X -> target u pre(X)
    // over the powerset of states.
    Space ps{ns.name + "-sets", make_powerset_lattice(ts.states)};
    RelationImage ri;
    ri.edges = ts.edges;
    ri.seed_mask = target;
    ri.pre = true;
    Operator rop = make_operator(ns.name + "-pre", ps, OpKind::monotone, 0.0, std::move(ri));
    rop.check_label = "family-derived";
    IterateResult res = iterate_to_fixpoint(rop, State(ps.lattice().bottom), limits);

    of.space_name = ps.name;
    of.rows.emplace_back("mu", render_state(ps, via_mu));
    of.rows.emplace_back("bfs", render_state(ps, via_bfs));
    bool agree = via_mu == via_bfs;
    if (res.certificate) {
      of.rows.emplace_back("engine", render_state(ps, res.certificate->value));
      agree = agree && std::get<int>(res.certificate->value) == via_mu;
    } else {
      of.rows.emplace_back("engine", std::string("(no fixpoint: ") +
                                         run_outcome_name(res.trace.outcome) + ")");
      agree = false;
    }
    bool expect_ok = true;
    if (const json* em = find(c.run, "expect_members")) {
      int want = 0;
      for (const std::string& s : string_list(*em, c.ctx)) {
        int idx = ts.state_by_name(s);
        if (idx < 0) bad(c.ctx, "unknown state '" + s + "'");
        want |= 1 << idx;
      }
      of.rows.emplace_back("expected", render_state(ps, want));
      expect_ok = want == via_mu;
    }
    of.rows.emplace_back("agree", agree ? "1" : "0");
    c.rr.passed = agree && expect_ok;
    c.rr.detail = "reachable " + render_state(ps, via_mu) +
                  (agree ? " on all three routes" : ", routes disagree");
    if (!expect_ok) c.rr.detail += ", expected members differ";
  } else if (kind == "metric_fixpoints") {
    check_keys(c.run, {"name", "directive", "check", "operator", "grid", "tol", "expect_count"},
               c.ctx);
    const Operator& op = find_operator(c.sc, need_str(c.run, "operator", c.ctx));
    if (!op.space->is_metric()) bad(c.ctx, "metric_fixpoints checks need a metric operator");
    of.space_name = op.space->name;
    GridSpec grid;
    if (const json* jg = find(c.run, "grid")) {
      check_keys(*jg, {"lo", "hi", "step"}, c.ctx + " grid");
      grid.lo = opt_num(*jg, "lo", c.ctx, grid.lo);
      grid.hi = opt_num(*jg, "hi", c.ctx, grid.hi);
      grid.step = opt_num(*jg, "step", c.ctx, grid.step);
    }
    double tol = opt_num(c.run, "tol", c.ctx, 1e-6);
    std::uint64_t want = opt_u64(c.run, "expect_count", c.ctx, 1);
    GridFixpointReport rep = grid_fixpoint_scan(op, grid, tol);
    of.rows.emplace_back("grid_points", std::to_string(rep.grid_points));
    of.rows.emplace_back("near_fixed", std::to_string(rep.near_fixed));
    of.rows.emplace_back("exact_fixed", std::to_string(rep.exact_fixed));
    of.rows.emplace_back("clusters", std::to_string(rep.clusters));
    of.rows.emplace_back("estimated_fixpoints", std::to_string(rep.estimated_fixpoints));
    of.rows.emplace_back("expected", std::to_string(want));
    c.rr.passed = rep.estimated_fixpoints == want;
    c.rr.detail = "grid estimates " + std::to_string(rep.estimated_fixpoints) +
                  " fixed point(s), expected " + std::to_string(want);
  } else if (kind == "affine") {
    check_keys(c.run, {"name", "directive", "check", "operator", "initial", "tol", "expect_value"},
               c.ctx);
    const Operator& op = find_operator(c.sc, need_str(c.run, "operator", c.ctx));
    const auto* aff = std::get_if<AffineMap>(&op.family);
    if (aff == nullptr || !op.space->is_metric()) {
      bad(c.ctx, "affine checks need an affine operator on a metric space");
    }
    of.space_name = op.space->name;
    int dim = op.space->metric().dimension;
    std::vector<double> closed = affine_fixed_point(*aff, dim);

    State x0 = std::vector<double>(static_cast<std::size_t>(dim), 0.0);
    if (find(c.run, "initial") != nullptr) {
      x0 = state_from_json(*op.space, need(c.run, "initial", c.ctx), c.ctx);
    }
    IterateResult res = iterate_to_fixpoint(op, x0, limits);
    double tol = opt_num(c.run, "tol", c.ctx, op.space->metric().eq_tolerance);

    of.rows.emplace_back("closed_form", render_state(*op.space, State(closed)));
    bool ok = false;
    double dist = -1.0;
    if (res.certificate) {
      dist = state_distance(*op.space, res.certificate->value, State(closed));
      of.rows.emplace_back("engine", render_state(*op.space, res.certificate->value));
      of.rows.emplace_back("distance", render_double(dist));
      ok = dist <= tol;
    } else {
      of.rows.emplace_back("engine", std::string("(no fixpoint: ") +
                                         run_outcome_name(res.trace.outcome) + ")");
    }
    bool expect_ok = true;
    if (find(c.run, "expect_value") != nullptr) {
      State want = parse_state(*op.space, need_str(c.run, "expect_value", c.ctx));
      of.rows.emplace_back("expected", render_state(*op.space, want));
      expect_ok = state_distance(*op.space, want, State(closed)) <= tol;
    }
    c.rr.passed = ok && expect_ok;
    c.rr.detail = ok ? "engine within " + render_double(tol) + " of the closed form"
                     : "engine misses the closed form";
    if (!expect_ok) c.rr.detail += ", expected value differs";
  } else {
    bad(c.ctx, "unknown check '" + kind + "'");
  }

  write_artifact(c, ".oracle", render_oracle(of));
}

}  // namespace

ScenarioReport run_scenario(const Scenario& sc, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    fail(Errc::validation_error, "cannot create output directory '" + out_dir + "': " +
                                     ec.message());
  }

  ScenarioReport rep;
  rep.scenario = sc.name;
  for (const json& run : sc.runs) {
    RunReport rr;
    rr.name = run["name"].get<std::string>();
    rr.directive = run["directive"].get<std::string>();
    RunCtx c{sc, run, rr, out_dir + "/" + sc.name + "__" + rr.name, "run '" + rr.name + "'"};
    try {
      if (rr.directive == "iterate") {
        exec_iterate(c);
      } else if (rr.directive == "uniqueness") {
        exec_uniqueness(c);
      } else if (rr.directive == "nested") {
        exec_nested(c);
      } else {
        exec_oracle_check(c);
      }
    } catch (const std::exception& e) {
      rr.passed = false;
      rr.detail = e.what();
    }
    rep.runs.push_back(std::move(rr));
  }
  return rep;
}

}  // namespace tfx
