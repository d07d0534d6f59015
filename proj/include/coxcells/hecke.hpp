#pragma once

// Hecke algebra over Z[v, v^{-1}], v = q^{1/2}.
//
// Two independent multiplication engines:
//  * T-basis: T_s T_w = T_{sw} if sw > w, else q T_{sw} + (q-1) T_w, extended
//    bilinearly; C'_w = v^{-l(w)} sum_{y<=w} P_{y,w}(q) T_y; conversion back
//    to the C' basis by triangular elimination on the longest term.
//  * W-graph: C'_s C'_w = (v + v^{-1}) C'_w if sw < w, else
//    C'_{sw} + sum_{z<w, sz<z} mu(z,w) C'_z, which never leaves the C' basis.
// Both give the structure constants h_{x,y,z} of C'_x C'_y = sum_z h_{x,y,z} C'_z.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "coxcells/kl_table.hpp"

namespace coxcells {

enum class Basis { T, Cprime };

struct HeckeElement {
  Basis basis = Basis::T;
  std::map<Element, LaurentPoly> coeffs;  // no zero entries

  static HeckeElement basis_element(Basis b, Element w) {
    HeckeElement h;
    h.basis = b;
    h.coeffs.emplace(w, LaurentPoly::one());
    return h;
  }

  LaurentPoly coeff(Element w) const {
    auto it = coeffs.find(w);
    return it == coeffs.end() ? LaurentPoly{} : it->second;
  }

  void add(Element w, const LaurentPoly& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = coeffs.try_emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) coeffs.erase(it);
    }
  }

  friend bool operator==(const HeckeElement&, const HeckeElement&) = default;
};

struct BasisMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// T-basis engine.

/// T_s * h for h in the T basis.
inline HeckeElement t_left_generator(CoxeterGroup& g, Generator s, const HeckeElement& h) {
  HeckeElement out;
  const LaurentPoly q = LaurentPoly::q(), q_minus_1 = LaurentPoly::q() - LaurentPoly::one();
  for (const auto& [w, c] : h.coeffs) {
    Element sw = g.left_mul(s, w);
    if (g.length(sw) > g.length(w)) {
      out.add(sw, c);
    } else {
      out.add(sw, c * q);
      out.add(w, c * q_minus_1);
    }
  }
  return out;
}

/// Product in the T basis.
inline HeckeElement hecke_mul(CoxeterGroup& g, const HeckeElement& a, const HeckeElement& b) {
  if (a.basis != Basis::T || b.basis != Basis::T) throw BasisMismatch("hecke_mul expects T-basis operands");
  HeckeElement out;
  for (const auto& [x, c] : a.coeffs) {
    HeckeElement cur = b;
    Word xw = g.word(x);
    for (auto it = xw.rbegin(); it != xw.rend(); ++it) cur = t_left_generator(g, *it, cur);
    for (const auto& [w, d] : cur.coeffs) out.add(w, c * d);
  }
  return out;
}

/// C'_w expanded in the T basis.
inline HeckeElement cprime_basis(KLTable& kl, Element w) {
  CoxeterGroup& g = kl.group();
  HeckeElement out;
  const int lw = g.length(w);
  for (Element y : kl.lower_interval(w)) out.add(y, kl.kl_poly(y, w).shifted(-lw));
  return out;
}

/// Rewrite a T-basis element in the C' basis.
inline HeckeElement to_cprime(KLTable& kl, HeckeElement h) {
  if (h.basis != Basis::T) throw BasisMismatch("to_cprime expects a T-basis element");
  CoxeterGroup& g = kl.group();
  HeckeElement out;
  out.basis = Basis::Cprime;
  while (!h.coeffs.empty()) {
    auto top = std::max_element(h.coeffs.begin(), h.coeffs.end(), [&g](const auto& a, const auto& b) {
      return g.shortlex_less(a.first, b.first);
    });
    Element z = top->first;
    LaurentPoly c = top->second.shifted(g.length(z));
    for (const auto& [y, p] : cprime_basis(kl, z).coeffs) h.add(y, -(c * p));
    out.add(z, c);
  }
  return out;
}

/// h_{x,y,.} via T-basis multiplication and triangular conversion.
inline std::map<Element, LaurentPoly> h_structure_tbasis(KLTable& kl, Element x, Element y) {
  auto prod = hecke_mul(kl.group(), cprime_basis(kl, x), cprime_basis(kl, y));
  return to_cprime(kl, std::move(prod)).coeffs;
}

// W-graph engine.

/// C'_s * h for h in the C' basis.
inline HeckeElement cprime_left_generator(KLTable& kl, Generator s, const HeckeElement& h) {
  if (h.basis != Basis::Cprime) throw BasisMismatch("cprime_left_generator expects a C'-basis element");
  CoxeterGroup& g = kl.group();
  HeckeElement out;
  out.basis = Basis::Cprime;
  const LaurentPoly v_plus_vinv = LaurentPoly::from_terms({{1, 1}, {-1, 1}});
  for (const auto& [w, c] : h.coeffs) {
    Element sw = g.left_mul(s, w);
    if (g.length(sw) < g.length(w)) {
      out.add(w, c * v_plus_vinv);
      continue;
    }
    out.add(sw, c);
    for (const auto& [z, m] : kl.mu_list(w))
      if (has_gen(g.left_descents(z), s)) {
        LaurentPoly t = c;
        t *= m;
        out.add(z, t);
      }
  }
  return out;
}

/// Products C'_x C'_y for a fixed right factor y, memoized over x.
class CprimeRightProducts {
 public:
  CprimeRightProducts(KLTable& kl, Element y) : kl_(kl), y_(y) {}

  Element right_factor() const { return y_; }

  const HeckeElement& product(Element x) {
    if (auto it = memo_.find(x.id); it != memo_.end()) return it->second;
    CoxeterGroup& g = kl_.group();
    HeckeElement out;
    if (g.length(x) == 0) {
      out = HeckeElement::basis_element(Basis::Cprime, y_);
    } else {
      // x = s.x' with s the first letter; C'_s C'_{x'} = C'_x + sum mu(z,x') C'_z.
      Generator s = g.word(x).front();
      Element xp = g.left_mul(s, x);
      out = cprime_left_generator(kl_, s, product(xp));
      const std::vector<MuEntry> partners = kl_.mu_list(xp);
      for (const auto& [z, m] : partners) {
        if (!has_gen(g.left_descents(z), s)) continue;
        for (const auto& [w, c] : product(z).coeffs) {
          LaurentPoly t = c;
          t *= -m;
          out.add(w, t);
        }
      }
    }
    return memo_.emplace(x.id, std::move(out)).first->second;
  }

 private:
  KLTable& kl_;
  Element y_;
  std::unordered_map<std::int32_t, HeckeElement> memo_;
};

/// h_{x,y,.} via the W-graph action.
inline std::map<Element, LaurentPoly> h_structure(KLTable& kl, Element x, Element y) {
  CprimeRightProducts prods(kl, y);
  return prods.product(x).coeffs;
}

}  // namespace coxcells
