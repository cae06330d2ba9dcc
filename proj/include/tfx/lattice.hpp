#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfx/errors.hpp"

namespace tfx {

// Finite lattice over elements 0..size-1. leq_bits is the full order
// relation; join/meet tables, bottom and top are filled at construction and
// the order axioms plus unique lub/glb existence verified (ValidationError on
// failure). For powerset lattices the element index is exactly the subset
// bitmask over the base list, so set operations are bit operations.
struct FiniteLattice {
  std::vector<std::string> names;
  std::vector<std::uint8_t> leq_bits;   // row-major size*size
  std::vector<int> join_tab, meet_tab;  // row-major
  int bottom = -1;
  int top = -1;
  std::optional<std::vector<std::string>> powerset_base;

  int size() const { return static_cast<int>(names.size()); }
  bool leq(int a, int b) const {
    if (is_powerset()) return (a & ~b) == 0;
    return leq_bits[static_cast<std::size_t>(a) * size() + b] != 0;
  }
  int join(int a, int b) const {
    return is_powerset() ? (a | b) : join_tab[static_cast<std::size_t>(a) * size() + b];
  }
  int meet(int a, int b) const {
    return is_powerset() ? (a & b) : meet_tab[static_cast<std::size_t>(a) * size() + b];
  }
  bool is_powerset() const { return powerset_base.has_value(); }
  int element_by_name(const std::string& name) const;  // -1 when absent
};

// Base size is capped at 16 (65536 elements). Element names follow mask
// order: "{}", "{a}", "{b}", "{a,b}", ...
FiniteLattice make_powerset_lattice(std::vector<std::string> base);

// Total order 0 < 1 < ... < n-1.
FiniteLattice make_chain_lattice(int n);

// Order = reflexive-transitive closure of the cover pairs (lower, upper).
// Fails unless the result is a partial order in which every pair has a unique
// least upper and greatest lower bound. Capped at 256 elements; the table
// fill scans all pairs.
FiniteLattice make_cover_lattice(std::vector<std::string> names,
                                 std::vector<std::pair<int, int>> covers);

struct LawViolation {
  std::string law;
  int x = -1, y = -1, z = -1;
};

// Scans the finished tables for lattice-law violations (idempotence,
// commutativity, associativity, absorption, consistency with leq). The
// builders already guarantee these hold; the scan is the independent check
// the tests run. Returns the first violation in (law, x, y, z) scan order.
std::optional<LawViolation> scan_lattice_laws(const FiniteLattice& lat);

}  // namespace tfx
