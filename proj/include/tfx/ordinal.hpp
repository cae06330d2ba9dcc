#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tfx/errors.hpp"

namespace tfx {

using Nat = boost::multiprecision::cpp_int;

enum class Ordering { less, equal, greater };
enum class OrdKind { zero, successor, limit };

struct OrdTerm;

// An ordinal below epsilon_0 in Cantor normal form:
//   w^e1 * c1 + w^e2 * c2 + ... + w^ek * ck
// with e1 > e2 > ... > ek (each itself such an ordinal) and every ci >= 1.
// The empty sum is 0. Every constructor output is canonical, so structural
// equality is ordinal equality.
class Ordinal {
 public:
  Ordinal();
  Ordinal(const Ordinal&);
  Ordinal(Ordinal&&) noexcept;
  Ordinal& operator=(const Ordinal&);
  Ordinal& operator=(Ordinal&&) noexcept;
  ~Ordinal();

  static Ordinal nat(const Nat& n);
  static Ordinal nat(std::uint64_t n);
  static Ordinal omega();
  static Ordinal omega_pow(const Ordinal& exponent, const Nat& coefficient = 1);
  // Validates strictly decreasing exponents and positive coefficients.
  static Ordinal from_terms(std::vector<OrdTerm> terms);

  bool is_zero() const;
  // True for 0 and for every ordinal whose only term has exponent 0.
  bool is_nat() const;
  std::optional<Nat> as_nat() const;
  const std::vector<OrdTerm>& terms() const;

  bool operator==(const Ordinal& other) const;
  bool operator!=(const Ordinal& other) const;
  bool operator<(const Ordinal& other) const;
  bool operator<=(const Ordinal& other) const;
  bool operator>(const Ordinal& other) const;
  bool operator>=(const Ordinal& other) const;

 private:
  explicit Ordinal(std::vector<OrdTerm> t);
  std::vector<OrdTerm> terms_;
};

struct OrdTerm {
  Ordinal exponent;
  Nat coefficient;
};

Ordering compare(const Ordinal& a, const Ordinal& b);

// Ordinal addition. Not commutative: terms of `a` strictly below the leading
// exponent of `b` are absorbed, e.g. 1 + w = w but w + 1 > w.
Ordinal add(const Ordinal& a, const Ordinal& b);

// a * n for a natural n >= 0. Distributes over the leading term only:
// (w^e * c + rest) * n = w^e * (c * n) + rest.
Ordinal nat_scale(const Ordinal& a, const Nat& n);

OrdKind classify(const Ordinal& a);
Ordinal succ(const Ordinal& a);
// Predecessor of a successor ordinal. Throws NotASuccessor otherwise.
Ordinal pred(const Ordinal& a);

// n-th element of the canonical fundamental sequence of a limit ordinal:
//   w[n] = n
//   (g + w^(b+1))[n] = g + w^b * n
//   (g + w^m)[n] = g + w^(m[n])   for limit m,
// where the trailing term's coefficient c is first peeled to
// g' = g + w^e * (c - 1). Throws NotALimit unless lam is a limit.
// The sequence is strictly increasing from n >= 1 with supremum lam.
Ordinal fundamental_seq(const Ordinal& lam, std::uint64_t n);

// Smallest limit ordinal strictly greater than a: drop the trailing finite
// part and add w.
Ordinal least_limit_above(const Ordinal& a);

// Canonical syntax: "0", naturals, "w", "w^<exp>", "*<coeff>", " + " between
// terms; exponents are parenthesized unless they print as a natural or as a
// coefficient-free tower of w's. parse_ordinal accepts exactly ordinals in
// canonical form (plus flexible whitespace) and round-trips to_string output
// bit-exactly.
std::string to_string(const Ordinal& a);
Ordinal parse_ordinal(std::string_view text);

}  // namespace tfx
