#include "tfx/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

namespace tfx {

std::vector<int> enumerate_fixpoints(const Operator& op, const FiniteLattice& lat) {
  if (op.space == nullptr || !op.space->is_lattice() || &op.space->lattice() != &lat)
    fail(Errc::space_mismatch,
         "operator \"" + op.name + "\" does not live on the lattice being scanned");
  const int n = lat.size();
  if (n > 65536) fail(Errc::too_large, "fixed-point scan over " + std::to_string(n) +
                                           " elements exceeds the cap of 65536");

  std::vector<std::uint8_t> fixed(n, 0);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < n; ++e) fixed[e] = std::get<int>(op.apply(State{e})) == e ? 1 : 0;

  std::vector<int> out;
  for (int e = 0; e < n; ++e)
    if (fixed[e]) out.push_back(e);
  return out;
}

namespace {

int extreme_fixpoint(const Operator& op, const FiniteLattice& lat, bool least) {
  std::vector<int> fps = enumerate_fixpoints(op, lat);
  if (fps.empty())
    fail(Errc::no_fixpoint, "operator \"" + op.name + "\" has no fixed point");
  for (int cand : fps) {
    bool extremal = true;
    for (int other : fps)
      if (least ? !lat.leq(cand, other) : !lat.leq(other, cand)) {
        extremal = false;
        break;
      }
    if (extremal) return cand;
  }
  fail(Errc::no_fixpoint, std::string("operator \"") + op.name + "\" has fixed points but no " +
                              (least ? "least" : "greatest") + " one");
}

}  // namespace

int lfp_bruteforce(const Operator& op, const FiniteLattice& lat) {
  return extreme_fixpoint(op, lat, true);
}

int gfp_bruteforce(const Operator& op, const FiniteLattice& lat) {
  return extreme_fixpoint(op, lat, false);
}

int TransitionSystem::state_by_name(const std::string& name) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == name) return static_cast<int>(i);
  return -1;
}

TransitionSystem make_transition_system(
    std::vector<std::string> states, std::vector<std::pair<std::string, std::string>> edges,
    std::map<std::string, std::vector<std::string>> labels) {
  if (states.empty()) fail(Errc::validation_error, "transition system needs at least one state");
  if (states.size() > 16)
    fail(Errc::too_large, "transition system of " + std::to_string(states.size()) +
                              " states exceeds the cap of 16");
  TransitionSystem ts;
  ts.states = std::move(states);
  for (std::size_t i = 0; i < ts.states.size(); ++i)
    for (std::size_t j = i + 1; j < ts.states.size(); ++j)
      if (ts.states[i] == ts.states[j])
        fail(Errc::validation_error, "duplicate state name \"" + ts.states[i] + "\"");

  for (const auto& [from, to] : edges) {
    int u = ts.state_by_name(from), v = ts.state_by_name(to);
    if (u == -1 || v == -1)
      fail(Errc::validation_error, "edge " + from + " -> " + to + " references a missing state");
    ts.edges.emplace_back(u, v);
  }
  for (const auto& [label, members] : labels) {
    int mask = 0;
    for (const std::string& m : members) {
      int s = ts.state_by_name(m);
      if (s == -1)
        fail(Errc::validation_error, "label \"" + label + "\" names a missing state \"" + m + "\"");
      mask |= 1 << s;
    }
    ts.labels[label] = mask;
  }
  return ts;
}

int mu_reachability(const TransitionSystem& ts, const std::string& target_label) {
  auto it = ts.labels.find(target_label);
  if (it == ts.labels.end())
    fail(Errc::unknown_label, "no label \"" + target_label + "\" in the transition system");
  const int target = it->second;

  // Saturate X = target | pre(X) from below; each pass adds states with an
  // edge into X, and the mask can only grow, so at most |states| passes.
  int x = 0;
  while (true) {
    int next = target;
    for (auto [u, v] : ts.edges)
      if (x & (1 << v)) next |= 1 << u;
    if (next == x) return x;
    x = next;
  }
}

int bfs_reachable(const TransitionSystem& ts, int target_mask) {
  const int n = static_cast<int>(ts.states.size());
  std::vector<std::vector<int>> rev(n);
  for (auto [u, v] : ts.edges) rev[v].push_back(u);

  std::vector<int> queue;
  std::vector<std::uint8_t> seen(n, 0);
  for (int s = 0; s < n; ++s)
    if (target_mask & (1 << s)) {
      seen[s] = 1;
      queue.push_back(s);
    }
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (int u : rev[queue[head]])
      if (!seen[u]) {
        seen[u] = 1;
        queue.push_back(u);
      }

  int mask = 0;
  for (int s = 0; s < n; ++s)
    if (seen[s]) mask |= 1 << s;
  return mask;
}

std::vector<double> affine_fixed_point(const AffineMap& f, int dim) {
  Eigen::MatrixXd a(dim, dim);
  Eigen::VectorXd b(dim);
  for (int i = 0; i < dim; ++i) {
    b(i) = f.offset[static_cast<std::size_t>(i)];
    for (int j = 0; j < dim; ++j)
      a(i, j) = f.matrix[static_cast<std::size_t>(i) * dim + j];
  }
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(dim, dim) - a;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible())
    fail(Errc::no_fixpoint, "I - A is singular; the affine map has no unique fixed point");
  Eigen::VectorXd x = lu.solve(b);
  return std::vector<double>(x.data(), x.data() + dim);
}

GridFixpointReport grid_fixpoint_scan(const Operator& op, GridSpec grid, double tol) {
  if (op.space == nullptr || !op.space->is_metric())
    fail(Errc::space_mismatch, "grid scan needs a metric-space operator");
  if (!(grid.step > 0.0) || !(grid.hi >= grid.lo))
    fail(Errc::validation_error, "grid needs step > 0 and hi >= lo");
  const MetricSpaceSpec& m = op.space->metric();
  const int dim = m.dimension;

  const std::uint64_t per_axis =
      static_cast<std::uint64_t>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;
  std::uint64_t total = 1;
  for (int i = 0; i < dim; ++i) {
    total *= per_axis;
    if (total > 65536)
      fail(Errc::too_large, "grid exceeds the cap of 65536 points");
  }

  std::vector<std::uint8_t> near(total, 0), exact(total, 0);
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < static_cast<long long>(total); ++idx) {
    std::vector<double> x(dim);
    std::uint64_t rem = static_cast<std::uint64_t>(idx);
    for (int d = 0; d < dim; ++d) {
      x[d] = grid.lo + static_cast<double>(rem % per_axis) * grid.step;
      rem /= per_axis;
    }
    auto fx = std::get<std::vector<double>>(op.apply(State{x}));
    if (fx == x) exact[idx] = 1;
    if (metric_distance(m, x, fx) <= tol) near[idx] = 1;
  }

  GridFixpointReport rep;
  rep.grid_points = total;
  rep.near_fixed = std::accumulate(near.begin(), near.end(), std::uint64_t{0});
  rep.exact_fixed = std::accumulate(exact.begin(), exact.end(), std::uint64_t{0});

  // Union-find over axis neighbors to count connected near-fixed clusters.
  std::vector<std::int64_t> parent(total, -1);
  std::function<std::int64_t(std::int64_t)> find = [&](std::int64_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (std::uint64_t idx = 0; idx < total; ++idx)
    if (near[idx]) parent[idx] = static_cast<std::int64_t>(idx);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    if (!near[idx]) continue;
    std::uint64_t stride = 1;
    std::uint64_t rem = idx;
    for (int d = 0; d < dim; ++d) {
      std::uint64_t coord = rem % per_axis;
      if (coord + 1 < per_axis && near[idx + stride]) {
        std::int64_t a = find(static_cast<std::int64_t>(idx)), b = find(static_cast<std::int64_t>(idx + stride));
        if (a != b) parent[a] = b;
      }
      rem /= per_axis;
      stride *= per_axis;
    }
  }
  for (std::uint64_t idx = 0; idx < total; ++idx)
    if (near[idx] && find(static_cast<std::int64_t>(idx)) == static_cast<std::int64_t>(idx))
      ++rep.clusters;

  rep.estimated_fixpoints = std::max(rep.clusters, rep.exact_fixed);
  return rep;
}

}  // namespace tfx
