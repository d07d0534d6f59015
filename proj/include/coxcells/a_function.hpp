#pragma once

// Lusztig's a-function, delta/pi from P_{e,z}, and the gamma/delta constants.
//
// a(z) is the largest v-degree of h_{x,y,z} over all x, y. It is exact when
// the maximization runs over a finite group containing z (the whole group, or
// a finite standard parabolic W_I with z in W_I, whose C' span is a
// subalgebra). Over a ball of an infinite group it is only a lower bound.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "coxcells/hecke.hpp"
#include "coxcells/parabolic.hpp"

namespace coxcells {

enum class AStatus { exact, lower_bound, conjectural };

inline const char* to_string(AStatus s) {
  switch (s) {
    case AStatus::exact: return "exact";
    case AStatus::lower_bound: return "lower_bound";
    case AStatus::conjectural: return "conjectural";
  }
  return "?";
}

struct AValue {
  int value = 0;
  AStatus status = AStatus::exact;
  std::string scope;
  friend bool operator==(const AValue&, const AValue&) = default;
};

/// a exceeded the configured bound N.
struct ABoundViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DeltaPi {
  int delta = 0;          // deg_q P_{e,z}
  std::int64_t pi = 1;    // leading coefficient
};

inline DeltaPi delta_pi(KLTable& kl, Element z) {
  auto p = kl.kl_poly(kl.group().identity(), z);
  return {*p.degree() / 2, p.leading_coeff()};
}

/// Default bound: twice the largest l(w0(I)) over finite parabolics.
inline int default_a_bound(const CoxeterSystem& sys) {
  int best = 0;
  for (const auto& p : finite_parabolics(sys)) best = std::max(best, *p.positive_roots);
  return 2 * best;
}

/// Elements of a finite W_I listed by BFS inside W.
inline std::vector<Element> parabolic_elements(CoxeterGroup& g, DescentMask subset) {
  std::vector<Element> out{g.identity()};
  std::unordered_map<std::int32_t, bool> seen{{g.identity().id, true}};
  for (std::size_t k = 0; k < out.size(); ++k)
    for (Generator s : mask_to_list(subset)) {
      Element x = g.right_mul(out[k], s);
      if (seen.emplace(x.id, true).second) out.push_back(x);
    }
  g.sort_shortlex(out);
  return out;
}

/// Caches a-values computed over finite groups and balls.
class AFunction {
 public:
  explicit AFunction(KLTable& kl, std::optional<int> bound = std::nullopt)
      : kl_(kl), bound_(bound.value_or(default_a_bound(kl.system()))) {}

  KLTable& kl() { return kl_; }
  int bound() const { return bound_; }

  /// Exact a(z) over the smallest finite standard parabolic containing z.
  AValue exact_in_parabolic(Element z) {
    CoxeterGroup& g = kl_.group();
    DescentMask supp = g.support(z);
    auto spec = classify_parabolic(g.system(), supp);
    if (!spec.finite) throw InputError("element " + g.format(z) + " is not in a finite standard parabolic");
    ensure_parabolic(supp);
    return {parabolic_values_.at(supp).at(z.id), AStatus::exact, "finite_parabolic(" + spec.type_label + ")"};
  }

  /// Exact a(z) with the maximization over a given finite parabolic containing z.
  AValue exact_in_parabolic(Element z, DescentMask subset) {
    CoxeterGroup& g = kl_.group();
    auto spec = classify_parabolic(g.system(), subset);
    if (!spec.finite) throw InputError("parabolic subgroup is infinite");
    if ((g.support(z) & ~subset) != 0) throw InputError("element not in the requested parabolic subgroup");
    ensure_parabolic(subset);
    return {parabolic_values_.at(subset).at(z.id), AStatus::exact, "finite_parabolic(" + spec.type_label + ")"};
  }

  /// Exact a over the whole group (must be finite).
  AValue exact_in_group(Element z) {
    const int rank = kl_.system().rank();
    DescentMask all = rank == 32 ? ~DescentMask{0} : (DescentMask{1} << rank) - 1;
    auto spec = classify_parabolic(kl_.system(), all);
    if (!spec.finite) throw InputError("finite_group scope requested for an infinite group");
    auto v = exact_in_parabolic(z, all);
    v.scope = "finite_group";
    return v;
  }

  /// True when z lies in some finite standard parabolic.
  bool has_exact(Element z) { return in_finite_parabolic(kl_.group(), z); }

  /// Lower bound: max deg h_{x,y,z} over x, y in the ball with l(x) + l(y) <= radius.
  AValue ball_lower_bound(Element z, int radius) {
    ensure_ball(radius);
    const auto& vals = ball_values_.at(radius);
    auto it = vals.find(z.id);
    int v = it == vals.end() ? 0 : it->second;
    return {v, AStatus::lower_bound, "ball(" + std::to_string(radius) + ")"};
  }

  /// Exact where available, else the ball lower bound.
  AValue best_available(Element z, int radius) {
    if (has_exact(z)) return exact_in_parabolic(z);
    return ball_lower_bound(z, radius);
  }

  /// deg_v of h_{x,y,z}, or nullopt when h_{x,y,z} = 0.
  std::optional<int> h_degree(Element x, Element y, Element z) {
    CprimeRightProducts prods(kl_, y);
    auto p = prods.product(x).coeffs;
    auto it = p.find(z);
    if (it == p.end()) return std::nullopt;
    return it->second.degree();
  }

 private:
  void check_bound(int v, Element z) {
    if (v > bound_)
      throw ABoundViolation("a(" + kl_.group().format(z) + ") >= " + std::to_string(v) + " exceeds bound N = " +
                            std::to_string(bound_) + " (possible unboundedness or a bad bound)");
  }

  void ensure_parabolic(DescentMask subset) {
    if (parabolic_values_.count(subset)) return;
    CoxeterGroup& g = kl_.group();
    auto elems = parabolic_elements(g, subset);
    std::unordered_map<std::int32_t, int> amax;
    for (Element e : elems) amax[e.id] = 0;
    for (Element y : elems) {
      CprimeRightProducts prods(kl_, y);
      for (Element x : elems)
        for (const auto& [z, c] : prods.product(x).coeffs) {
          int& cur = amax[z.id];
          cur = std::max(cur, *c.degree());
        }
    }
    for (const auto& [id, v] : amax) check_bound(v, Element{id});
    parabolic_values_.emplace(subset, std::move(amax));
  }

  void ensure_ball(int radius) {
    if (ball_values_.count(radius)) return;
    CoxeterGroup& g = kl_.group();
    auto ball = g.enumerate_ball(radius);
    std::unordered_map<std::int32_t, int> amax;
    for (Element y : ball.elements) {
      if (g.length(y) > radius) break;
      CprimeRightProducts prods(kl_, y);
      for (Element x : ball.elements) {
        if (g.length(x) + g.length(y) > radius) break;
        for (const auto& [z, c] : prods.product(x).coeffs) {
          int d = *c.degree();
          auto [it, ins] = amax.try_emplace(z.id, d);
          if (!ins) it->second = std::max(it->second, d);
        }
      }
    }
    for (const auto& [id, v] : amax) check_bound(v, Element{id});
    ball_values_.emplace(radius, std::move(amax));
  }

  KLTable& kl_;
  int bound_;
  std::map<DescentMask, std::unordered_map<std::int32_t, int>> parabolic_values_;
  std::map<int, std::unordered_map<std::int32_t, int>> ball_values_;
};

/// gamma and delta constants: the v^{a(z)} and v^{a(z)-1} coefficients of h_{x,y,z}.
inline std::pair<std::int64_t, std::int64_t> gamma_delta_consts(KLTable& kl, Element x, Element y, Element z,
                                                                 const AValue& a_of_z) {
  if (a_of_z.status != AStatus::exact)
    throw InputError("gamma/delta constants need an exact a-value (got " + std::string(to_string(a_of_z.status)) + ")");
  auto h = h_structure(kl, x, y);
  auto it = h.find(z);
  if (it == h.end()) return {0, 0};
  return {it->second.coeff(a_of_z.value), it->second.coeff(a_of_z.value - 1)};
}

}  // namespace coxcells
