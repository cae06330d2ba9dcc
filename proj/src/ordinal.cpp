#include "tfx/ordinal.hpp"

#include <cctype>
#include <sstream>
#include <utility>

namespace tfx {

Ordinal::Ordinal() = default;
Ordinal::Ordinal(const Ordinal&) = default;
Ordinal::Ordinal(Ordinal&&) noexcept = default;
Ordinal& Ordinal::operator=(const Ordinal&) = default;
Ordinal& Ordinal::operator=(Ordinal&&) noexcept = default;
Ordinal::~Ordinal() = default;

Ordinal::Ordinal(std::vector<OrdTerm> t) : terms_(std::move(t)) {}

Ordinal Ordinal::nat(const Nat& n) {
  if (n < 0) fail(Errc::validation_error, "negative natural in ordinal");
  if (n == 0) return Ordinal{};
  return Ordinal{{OrdTerm{Ordinal{}, n}}};
}

Ordinal Ordinal::nat(std::uint64_t n) { return nat(Nat(n)); }

Ordinal Ordinal::omega() { return omega_pow(nat(Nat(1)), 1); }

Ordinal Ordinal::omega_pow(const Ordinal& exponent, const Nat& coefficient) {
  if (coefficient < 1) fail(Errc::validation_error, "omega_pow needs coefficient >= 1");
  if (exponent.is_zero()) return nat(coefficient);
  return Ordinal{{OrdTerm{exponent, coefficient}}};
}

Ordinal Ordinal::from_terms(std::vector<OrdTerm> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coefficient < 1)
      fail(Errc::validation_error, "term coefficient must be >= 1");
    if (i + 1 < terms.size() &&
        compare(terms[i].exponent, terms[i + 1].exponent) != Ordering::greater)
      fail(Errc::validation_error, "term exponents must be strictly decreasing");
  }
  return Ordinal{std::move(terms)};
}

bool Ordinal::is_zero() const { return terms_.empty(); }

bool Ordinal::is_nat() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

std::optional<Nat> Ordinal::as_nat() const {
  if (terms_.empty()) return Nat(0);
  if (terms_.size() == 1 && terms_[0].exponent.is_zero()) return terms_[0].coefficient;
  return std::nullopt;
}

const std::vector<OrdTerm>& Ordinal::terms() const { return terms_; }

// Lexicographic comparison of CNF term lists. Sound because a higher exponent
// dominates any tail: w^e > w^e' * c' + ... whenever e > e'.
Ordering compare(const Ordinal& a, const Ordinal& b) {
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  const std::size_t n = std::min(ta.size(), tb.size());
  for (std::size_t i = 0; i < n; ++i) {
    Ordering e = compare(ta[i].exponent, tb[i].exponent);
    if (e != Ordering::equal) return e;
    if (ta[i].coefficient != tb[i].coefficient)
      return ta[i].coefficient < tb[i].coefficient ? Ordering::less : Ordering::greater;
  }
  if (ta.size() == tb.size()) return Ordering::equal;
  return ta.size() < tb.size() ? Ordering::less : Ordering::greater;
}

bool Ordinal::operator==(const Ordinal& o) const { return compare(*this, o) == Ordering::equal; }
bool Ordinal::operator!=(const Ordinal& o) const { return compare(*this, o) != Ordering::equal; }
bool Ordinal::operator<(const Ordinal& o) const { return compare(*this, o) == Ordering::less; }
bool Ordinal::operator<=(const Ordinal& o) const { return compare(*this, o) != Ordering::greater; }
bool Ordinal::operator>(const Ordinal& o) const { return compare(*this, o) == Ordering::greater; }
bool Ordinal::operator>=(const Ordinal& o) const { return compare(*this, o) != Ordering::less; }

Ordinal add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  const Ordinal& lead = tb[0].exponent;

  // Keep the prefix of a whose exponents are >= b's leading exponent; the rest
  // of a is absorbed.
  std::vector<OrdTerm> out;
  out.reserve(ta.size() + tb.size());
  std::size_t i = 0;
  while (i < ta.size() && compare(ta[i].exponent, lead) == Ordering::greater) {
    out.push_back(ta[i]);
    ++i;
  }
  if (i < ta.size() && compare(ta[i].exponent, lead) == Ordering::equal) {
    out.push_back(OrdTerm{lead, ta[i].coefficient + tb[0].coefficient});
  } else {
    out.push_back(tb[0]);
  }
  out.insert(out.end(), tb.begin() + 1, tb.end());
  return Ordinal::from_terms(std::move(out));
}

Ordinal nat_scale(const Ordinal& a, const Nat& n) {
  if (n < 0) fail(Errc::validation_error, "nat_scale needs n >= 0");
  if (n == 0 || a.is_zero()) return Ordinal{};
  std::vector<OrdTerm> out = a.terms();
  out[0].coefficient *= n;
  return Ordinal::from_terms(std::move(out));
}

OrdKind classify(const Ordinal& a) {
  if (a.is_zero()) return OrdKind::zero;
  return a.terms().back().exponent.is_zero() ? OrdKind::successor : OrdKind::limit;
}

Ordinal succ(const Ordinal& a) { return add(a, Ordinal::nat(Nat(1))); }

Ordinal pred(const Ordinal& a) {
  if (classify(a) != OrdKind::successor)
    fail(Errc::not_a_successor, "pred of " + to_string(a));
  std::vector<OrdTerm> out = a.terms();
  if (out.back().coefficient == 1) {
    out.pop_back();
  } else {
    out.back().coefficient -= 1;
  }
  return Ordinal::from_terms(std::move(out));
}

Ordinal fundamental_seq(const Ordinal& lam, std::uint64_t n) {
  if (classify(lam) != OrdKind::limit)
    fail(Errc::not_a_limit, "fundamental_seq of " + to_string(lam));

  // Split lam = g + w^e * c with e >= 1 the trailing exponent, then peel the
  // coefficient: lam = (g + w^e * (c-1)) + w^e and take the w^e step.
  std::vector<OrdTerm> prefix = lam.terms();
  OrdTerm last = prefix.back();
  prefix.pop_back();
  if (last.coefficient > 1) {
    prefix.push_back(OrdTerm{last.exponent, last.coefficient - 1});
  }
  Ordinal g = Ordinal::from_terms(std::move(prefix));

  const Ordinal& e = last.exponent;
  if (classify(e) == OrdKind::successor) {
    // (g + w^(b+1))[n] = g + w^b * n; zero when n = 0.
    if (n == 0) return g;
    return add(g, nat_scale(Ordinal::omega_pow(pred(e)), Nat(n)));
  }
  // e is a limit (e >= w): (g + w^e)[n] = g + w^(e[n]).
  return add(g, Ordinal::omega_pow(fundamental_seq(e, n)));
}

Ordinal least_limit_above(const Ordinal& a) {
  std::vector<OrdTerm> out = a.terms();
  if (!out.empty() && out.back().exponent.is_zero()) out.pop_back();
  return add(Ordinal::from_terms(std::move(out)), Ordinal::omega());
}

namespace {

// An exponent prints without parentheses only when re-parsing is unambiguous:
// a bare natural, or a coefficient-free tower w, w^w, w^w^w, ... ('^' parses
// right-associatively, so towers need no parentheses).
bool exponent_needs_parens(const Ordinal& e) {
  if (e.is_nat()) return false;
  if (e.terms().size() != 1) return true;
  const OrdTerm& t = e.terms()[0];
  if (t.coefficient != 1) return true;
  return exponent_needs_parens(t.exponent);
}

void print_ordinal(std::ostringstream& os, const Ordinal& a) {
  if (a.is_zero()) {
    os << "0";
    return;
  }
  bool first = true;
  for (const OrdTerm& t : a.terms()) {
    if (!first) os << " + ";
    first = false;
    if (t.exponent.is_zero()) {
      os << t.coefficient;
      continue;
    }
    os << "w";
    if (!(t.exponent == Ordinal::nat(Nat(1)))) {
      os << "^";
      if (exponent_needs_parens(t.exponent)) {
        os << "(";
        print_ordinal(os, t.exponent);
        os << ")";
      } else {
        print_ordinal(os, t.exponent);
      }
    }
    if (t.coefficient != 1) os << "*" << t.coefficient;
  }
}

struct Parser {
  std::string_view s;
  std::size_t i = 0;

  [[noreturn]] void err(const std::string& what) {
    fail(Errc::parse_error,
         what + " at column " + std::to_string(i + 1) + " in ordinal \"" + std::string(s) + "\"");
  }

  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }

  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }

  Nat parse_nat() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) err("expected a natural number");
    if (s[start] == '0' && i - start > 1) err("leading zero in natural number");
    return Nat(std::string(s.substr(start, i - start)));
  }

  // atom := nat | 'w' ('^' atom)? | '(' ordinal ')'
  // Used for unparenthesized exponents; right-associative towers only.
  Ordinal parse_exponent_atom() {
    char c = peek();
    if (c == '(') {
      ++i;
      Ordinal inner = parse_sum();
      if (!eat(')')) err("expected ')'");
      return inner;
    }
    if (c == 'w') {
      ++i;
      if (eat('^')) return Ordinal::omega_pow(parse_exponent_atom());
      return Ordinal::omega();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Ordinal::nat(parse_nat());
    err("expected an exponent");
  }

  // term := nat | 'w' ('^' atom)? ('*' nat)?
  OrdTerm parse_term() {
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Nat n = parse_nat();
      if (n == 0) err("a zero term is only valid as the whole ordinal \"0\"");
      return OrdTerm{Ordinal{}, n};
    }
    if (c != 'w') err("expected a term");
    ++i;
    Ordinal e = Ordinal::nat(Nat(1));
    if (eat('^')) e = parse_exponent_atom();
    Nat coeff(1);
    if (eat('*')) {
      coeff = parse_nat();
      if (coeff == 0) err("coefficient must be >= 1");
    }
    if (e.is_zero()) return OrdTerm{Ordinal{}, coeff};  // w^0 * c is the natural c
    return OrdTerm{e, coeff};
  }

  Ordinal parse_sum() {
    if (peek() == '0') {
      std::size_t save = i;
      ++i;
      char c = peek();
      if (c != '+' && c != ')' && c != '\0') err("unexpected character after 0");
      if (c != '+') return Ordinal{};
      i = save;  // "0 + ..." is rejected below via the zero-term rule
    }
    std::vector<OrdTerm> terms;
    terms.push_back(parse_term());
    while (eat('+')) terms.push_back(parse_term());
    for (std::size_t k = 0; k + 1 < terms.size(); ++k) {
      if (compare(terms[k].exponent, terms[k + 1].exponent) != Ordering::greater)
        err("term exponents must be strictly decreasing");
    }
    return Ordinal::from_terms(std::move(terms));
  }

  Ordinal run() {
    Ordinal r = parse_sum();
    skip_ws();
    if (i != s.size()) err("trailing characters");
    return r;
  }
};

}  // namespace

std::string to_string(const Ordinal& a) {
  std::ostringstream os;
  print_ordinal(os, a);
  return os.str();
}

Ordinal parse_ordinal(std::string_view text) {
  Parser p{text};
  return p.run();
}

}  // namespace tfx
