#include "tfx/lattice.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace tfx {

namespace {

void check_unique_names(const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (const std::string& n : names)
    if (!seen.insert(n).second)
      fail(Errc::validation_error, "duplicate element name \"" + n + "\"");
}

// Fills join/meet/bottom/top from a finished leq relation by scanning for
// least upper / greatest lower bounds. Antisymmetry makes them unique when
// they exist at all.
void fill_tables_by_scan(FiniteLattice& lat) {
  const int n = lat.size();
  lat.join_tab.assign(static_cast<std::size_t>(n) * n, -1);
  lat.meet_tab.assign(static_cast<std::size_t>(n) * n, -1);

  bool missing_lub = false, missing_glb = false;
#pragma omp parallel for schedule(static) reduction(|| : missing_lub, missing_glb)
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      int lub = -1;
      for (int c = 0; c < n; ++c) {
        if (!(lat.leq(a, c) && lat.leq(b, c))) continue;
        if (lub == -1 || lat.leq(c, lub)) lub = c;
      }
      // lub is minimal among upper bounds by the scan; verify it is least.
      if (lub != -1)
        for (int c = 0; c < n; ++c)
          if (lat.leq(a, c) && lat.leq(b, c) && !lat.leq(lub, c)) lub = -1;
      if (lub == -1) missing_lub = true;
      lat.join_tab[static_cast<std::size_t>(a) * n + b] = lub;

      int glb = -1;
      for (int c = 0; c < n; ++c) {
        if (!(lat.leq(c, a) && lat.leq(c, b))) continue;
        if (glb == -1 || lat.leq(glb, c)) glb = c;
      }
      if (glb != -1)
        for (int c = 0; c < n; ++c)
          if (lat.leq(c, a) && lat.leq(c, b) && !lat.leq(c, glb)) glb = -1;
      if (glb == -1) missing_glb = true;
      lat.meet_tab[static_cast<std::size_t>(a) * n + b] = glb;
    }
  }
  if (missing_lub) fail(Errc::validation_error, "some pair has no least upper bound");
  if (missing_glb) fail(Errc::validation_error, "some pair has no greatest lower bound");

  for (int c = 0; c < n; ++c) {
    bool is_bottom = true, is_top = true;
    for (int x = 0; x < n; ++x) {
      is_bottom = is_bottom && lat.leq(c, x);
      is_top = is_top && lat.leq(x, c);
    }
    if (is_bottom) lat.bottom = c;
    if (is_top) lat.top = c;
  }
  if (lat.bottom == -1) fail(Errc::validation_error, "no bottom element");
  if (lat.top == -1) fail(Errc::validation_error, "no top element");
}

}  // namespace

int FiniteLattice::element_by_name(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (names[i] == name) return i;
  return -1;
}

FiniteLattice make_powerset_lattice(std::vector<std::string> base) {
  if (base.size() > 16)
    fail(Errc::too_large, "powerset base of " + std::to_string(base.size()) +
                              " elements exceeds the cap of 16");
  check_unique_names(base);
  const int n = 1 << base.size();

  FiniteLattice lat;
  lat.names.reserve(n);
  for (int mask = 0; mask < n; ++mask) {
    std::string name = "{";
    bool first = true;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (!(mask & (1 << i))) continue;
      if (!first) name += ",";
      name += base[i];
      first = false;
    }
    name += "}";
    lat.names.push_back(std::move(name));
  }
  // Masks carry the whole structure; the dense tables stay empty.
  lat.bottom = 0;
  lat.top = n - 1;
  lat.powerset_base = std::move(base);
  return lat;
}

FiniteLattice make_chain_lattice(int n) {
  if (n < 1) fail(Errc::validation_error, "chain needs at least one element");
  if (n > 1024) fail(Errc::too_large, "chain of " + std::to_string(n) + " exceeds the cap of 1024");
  FiniteLattice lat;
  for (int i = 0; i < n; ++i) lat.names.push_back("c" + std::to_string(i));
  lat.leq_bits.assign(static_cast<std::size_t>(n) * n, 0);
  lat.join_tab.assign(static_cast<std::size_t>(n) * n, 0);
  lat.meet_tab.assign(static_cast<std::size_t>(n) * n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      lat.leq_bits[static_cast<std::size_t>(a) * n + b] = a <= b ? 1 : 0;
      lat.join_tab[static_cast<std::size_t>(a) * n + b] = std::max(a, b);
      lat.meet_tab[static_cast<std::size_t>(a) * n + b] = std::min(a, b);
    }
  lat.bottom = 0;
  lat.top = n - 1;
  return lat;
}

FiniteLattice make_cover_lattice(std::vector<std::string> names,
                                 std::vector<std::pair<int, int>> covers) {
  const int n = static_cast<int>(names.size());
  if (n < 1) fail(Errc::validation_error, "lattice needs at least one element");
  if (n > 256) fail(Errc::too_large, "cover lattice of " + std::to_string(n) +
                                         " elements exceeds the cap of 256");
  check_unique_names(names);

  FiniteLattice lat;
  lat.names = std::move(names);
  lat.leq_bits.assign(static_cast<std::size_t>(n) * n, 0);
  for (int a = 0; a < n; ++a) lat.leq_bits[static_cast<std::size_t>(a) * n + a] = 1;
  for (auto [lo, hi] : covers) {
    if (lo < 0 || lo >= n || hi < 0 || hi >= n)
      fail(Errc::validation_error, "cover pair references a missing element");
    lat.leq_bits[static_cast<std::size_t>(lo) * n + hi] = 1;
  }

  // Reflexive-transitive closure (Floyd-Warshall on the boolean relation).
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a) {
      if (!lat.leq(a, k)) continue;
      for (int b = 0; b < n; ++b)
        if (lat.leq(k, b)) lat.leq_bits[static_cast<std::size_t>(a) * n + b] = 1;
    }

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && lat.leq(a, b) && lat.leq(b, a))
        fail(Errc::validation_error, "cover relation has a cycle through \"" +
                                         lat.names[a] + "\" and \"" + lat.names[b] + "\"");

  fill_tables_by_scan(lat);
  return lat;
}

std::optional<LawViolation> scan_lattice_laws(const FiniteLattice& lat) {
  const int n = lat.size();
  if (n > 512)
    fail(Errc::too_large, "law scan over " + std::to_string(n) +
                              " elements exceeds the cap of 512 (the triple pass is cubic)");

  // One pass per law keeps the reported witness deterministic: the first
  // violating tuple of the first violated law, independent of thread count.
  for (int x = 0; x < n; ++x) {
    if (lat.join(x, x) != x) return LawViolation{"join idempotence", x};
    if (lat.meet(x, x) != x) return LawViolation{"meet idempotence", x};
  }

  constexpr long long kNone = std::numeric_limits<long long>::max();

  auto scan_pairs = [&](const char* law, auto&& bad) -> std::optional<LawViolation> {
    long long first = kNone;
#pragma omp parallel for schedule(static) reduction(min : first)
    for (long long i = 0; i < static_cast<long long>(n) * n; ++i) {
      if (bad(static_cast<int>(i / n), static_cast<int>(i % n))) first = std::min(first, i);
    }
    if (first == kNone) return std::nullopt;
    return LawViolation{law, static_cast<int>(first / n), static_cast<int>(first % n)};
  };

  if (auto v = scan_pairs("join commutativity",
                          [&](int x, int y) { return lat.join(x, y) != lat.join(y, x); }))
    return v;
  if (auto v = scan_pairs("meet commutativity",
                          [&](int x, int y) { return lat.meet(x, y) != lat.meet(y, x); }))
    return v;
  if (auto v = scan_pairs("join absorption",
                          [&](int x, int y) { return lat.join(x, lat.meet(x, y)) != x; }))
    return v;
  if (auto v = scan_pairs("meet absorption",
                          [&](int x, int y) { return lat.meet(x, lat.join(x, y)) != x; }))
    return v;
  if (auto v = scan_pairs("order consistency", [&](int x, int y) {
        return lat.leq(x, y) != (lat.join(x, y) == y) || lat.leq(x, y) != (lat.meet(x, y) == x);
      }))
    return v;

  auto scan_triples = [&](const char* law, auto&& bad) -> std::optional<LawViolation> {
    long long first = kNone;
    const long long total = static_cast<long long>(n) * n * n;
#pragma omp parallel for schedule(static) reduction(min : first)
    for (long long i = 0; i < total; ++i) {
      int x = static_cast<int>(i / (static_cast<long long>(n) * n));
      int y = static_cast<int>((i / n) % n);
      int z = static_cast<int>(i % n);
      if (bad(x, y, z)) first = std::min(first, i);
    }
    if (first == kNone) return std::nullopt;
    return LawViolation{law, static_cast<int>(first / (static_cast<long long>(n) * n)),
                        static_cast<int>((first / n) % n), static_cast<int>(first % n)};
  };

  if (auto v = scan_triples("join associativity", [&](int x, int y, int z) {
        return lat.join(lat.join(x, y), z) != lat.join(x, lat.join(y, z));
      }))
    return v;
  if (auto v = scan_triples("meet associativity", [&](int x, int y, int z) {
        return lat.meet(lat.meet(x, y), z) != lat.meet(x, lat.meet(y, z));
      }))
    return v;
  return std::nullopt;
}

}  // namespace tfx
