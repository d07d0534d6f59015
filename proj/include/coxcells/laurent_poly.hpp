#pragma once

// Sparse Laurent polynomials in v = q^{1/2} with exact integer coefficients.
//
// Exponents count powers of v, so q^k is stored at exponent 2k. Terms are kept
// in a flat vector sorted by increasing exponent and never hold a zero
// coefficient. Coefficient arithmetic is checked: overflow throws
// ArithmeticError instead of wrapping.

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace coxcells {

struct ArithmeticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <std::integral Int>
Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r))
    throw ArithmeticError("coefficient overflow in addition");
  return r;
}

template <std::integral Int>
Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r))
    throw ArithmeticError("coefficient overflow in multiplication");
  return r;
}

template <std::integral Int>
Int checked_neg(Int a) {
  Int r;
  if (__builtin_sub_overflow(Int{0}, a, &r))
    throw ArithmeticError("coefficient overflow in negation");
  return r;
}

}  // namespace detail

template <std::integral Int>
class BasicLaurentPoly {
 public:
  using coeff_type = Int;
  struct Term {
    int exp;
    Int coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  BasicLaurentPoly() = default;

  /// Constant polynomial c (zero if c == 0).
  explicit BasicLaurentPoly(Int c) {
    if (c != 0) terms_.push_back({0, c});
  }

  /// Single monomial c * v^exp.
  static BasicLaurentPoly monomial(Int c, int exp) {
    BasicLaurentPoly p;
    if (c != 0) p.terms_.push_back({exp, c});
    return p;
  }

  /// Build from (exponent, coefficient) pairs; duplicates are summed.
  static BasicLaurentPoly from_terms(std::initializer_list<std::pair<int, Int>> ts) {
    BasicLaurentPoly p;
    for (auto [e, c] : ts) p += monomial(c, e);
    return p;
  }

  /// Embed a q-polynomial given by dense coefficients c[0] + c[1] q + ...
  static BasicLaurentPoly from_q_coeffs(std::span<const Int> qcoeffs) {
    BasicLaurentPoly p;
    for (std::size_t k = 0; k < qcoeffs.size(); ++k)
      if (qcoeffs[k] != 0) p.terms_.push_back({static_cast<int>(2 * k), qcoeffs[k]});
    return p;
  }

  static BasicLaurentPoly one() { return BasicLaurentPoly(Int{1}); }
  static BasicLaurentPoly v() { return monomial(1, 1); }
  static BasicLaurentPoly q() { return monomial(1, 2); }

  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }

  Int coeff(int exp) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exp,
                               [](const Term& t, int e) { return t.exp < e; });
    return (it != terms_.end() && it->exp == exp) ? it->coeff : Int{0};
  }

  std::optional<int> degree() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.back().exp;
  }
  std::optional<int> valuation() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.front().exp;
  }
  /// Coefficient of the highest power; zero for the zero polynomial.
  Int leading_coeff() const { return terms_.empty() ? Int{0} : terms_.back().coeff; }

  BasicLaurentPoly shifted(int k) const {
    BasicLaurentPoly p = *this;
    for (auto& t : p.terms_) t.exp += k;
    return p;
  }

  /// Bar involution v -> v^{-1}.
  BasicLaurentPoly bar() const {
    BasicLaurentPoly p;
    p.terms_.reserve(terms_.size());
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) p.terms_.push_back({-it->exp, it->coeff});
    return p;
  }

  bool all_coeffs_nonnegative() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coeff >= 0; });
  }

  /// Dense q-coefficients; throws std::domain_error on odd or negative exponents.
  std::vector<Int> as_q_polynomial() const {
    if (terms_.empty()) return {};
    std::vector<Int> out(static_cast<std::size_t>(terms_.back().exp / 2 + 1), Int{0});
    for (const auto& t : terms_) {
      if (t.exp < 0 || t.exp % 2 != 0)
        throw std::domain_error("not a q-polynomial: term v^" + std::to_string(t.exp));
      out[static_cast<std::size_t>(t.exp / 2)] = t.coeff;
    }
    return out;
  }

  BasicLaurentPoly& operator+=(const BasicLaurentPoly& o) {
    if (o.terms_.empty()) return *this;
    if (terms_.empty()) {
      terms_ = o.terms_;
      return *this;
    }
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin(), b = o.terms_.begin();
    while (a != terms_.end() || b != o.terms_.end()) {
      if (b == o.terms_.end() || (a != terms_.end() && a->exp < b->exp)) {
        out.push_back(*a++);
      } else if (a == terms_.end() || b->exp < a->exp) {
        out.push_back(*b++);
      } else {
        Int c = detail::checked_add(a->coeff, b->coeff);
        if (c != 0) out.push_back({a->exp, c});
        ++a;
        ++b;
      }
    }
    terms_ = std::move(out);
    return *this;
  }

  BasicLaurentPoly operator-() const {
    BasicLaurentPoly p = *this;
    for (auto& t : p.terms_) t.coeff = detail::checked_neg(t.coeff);
    return p;
  }

  BasicLaurentPoly& operator-=(const BasicLaurentPoly& o) { return *this += -o; }

  BasicLaurentPoly& operator*=(Int c) {
    if (c == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.coeff = detail::checked_mul(t.coeff, c);
    return *this;
  }

  /// this += c * v^shift * o, without temporaries for the scaled copy.
  void add_scaled(const BasicLaurentPoly& o, Int c, int shift) {
    if (c == 0 || o.is_zero()) return;
    BasicLaurentPoly tmp;
    tmp.terms_.reserve(o.terms_.size());
    for (const auto& t : o.terms_) tmp.terms_.push_back({t.exp + shift, detail::checked_mul(t.coeff, c)});
    *this += tmp;
  }

  friend BasicLaurentPoly operator+(BasicLaurentPoly a, const BasicLaurentPoly& b) { return a += b; }
  friend BasicLaurentPoly operator-(BasicLaurentPoly a, const BasicLaurentPoly& b) { return a -= b; }
  friend BasicLaurentPoly operator*(BasicLaurentPoly a, Int c) { return a *= c; }

  friend BasicLaurentPoly operator*(const BasicLaurentPoly& a, const BasicLaurentPoly& b) {
    BasicLaurentPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    const auto& small = a.terms_.size() <= b.terms_.size() ? a : b;
    const auto& large = &small == &a ? b : a;
    for (const auto& t : small.terms_) r.add_scaled(large, t.coeff, t.exp);
    return r;
  }
  BasicLaurentPoly& operator*=(const BasicLaurentPoly& o) { return *this = *this * o; }

  friend bool operator==(const BasicLaurentPoly&, const BasicLaurentPoly&) = default;

  /// Terms "c*q^{e/2}" in decreasing exponent order; "0" for the zero polynomial.
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      Int c = it->coeff;
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      Int mag = c < 0 ? -c : c;
      first = false;
      if (it->exp == 0) {
        os << mag;
        continue;
      }
      if (mag != 1) os << mag << "*";
      os << "q^{" << it->exp << "/2}";
    }
    return os.str();
  }

  /// Compact q-polynomial rendering, e.g. "1 + 2q + q^2"; falls back to to_string().
  std::string to_q_string() const {
    std::vector<Int> qc;
    try {
      qc = as_q_polynomial();
    } catch (const std::domain_error&) {
      return to_string();
    }
    if (qc.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < qc.size(); ++k) {
      Int c = qc[k];
      if (c == 0) continue;
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      Int mag = c < 0 ? -c : c;
      first = false;
      if (k == 0) os << mag;
      else {
        if (mag != 1) os << mag;
        os << "q";
        if (k > 1) os << "^" << k;
      }
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const BasicLaurentPoly& p) { return os << p.to_string(); }

 private:
  std::vector<Term> terms_;
};

using LaurentPoly = BasicLaurentPoly<std::int64_t>;

}  // namespace coxcells
