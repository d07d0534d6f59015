#pragma once

// Standard parabolic subgroups W_I: finite-type recognition of the Coxeter
// diagram restricted to I, group orders, and longest elements.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coxcells/coxeter_group.hpp"

namespace coxcells {

struct ParabolicSpec {
  std::vector<Generator> subset;
  DescentMask mask = 0;
  bool finite = true;
  std::optional<std::uint64_t> order;           // set iff finite
  std::optional<int> positive_roots;            // = l(w0(I)) when finite
  std::string type_label;                       // e.g. "A2xA1"; "infinite" otherwise
};

namespace detail {

struct ComponentType {
  bool finite = false;
  std::string label;
  std::uint64_t order = 0;
  int positive_roots = 0;
};

inline std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// Recognize one connected component of the Coxeter diagram.
inline ComponentType classify_component(const CoxeterSystem& sys, const std::vector<Generator>& comp) {
  const int n = static_cast<int>(comp.size());
  ComponentType out;
  if (n == 1) return {true, "A1", 2, 1};
  std::vector<std::vector<int>> nbr(n);
  int edges = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      int m = sys.m(comp[i], comp[j]);
      if (m == kInfinity) return out;
      if (m >= 3) {
        nbr[i].push_back(j);
        if (i < j) ++edges;
      }
    }
  if (edges != n - 1) return out;  // connected with a cycle
  auto label_of = [&](int i, int j) { return sys.m(comp[i], comp[j]); };

  if (n == 2) {
    int m = label_of(0, 1);
    if (m == 3) return {true, "A2", 6, 3};
    if (m == 4) return {true, "B2", 8, 4};
    if (m == 6) return {true, "G2", 12, 6};
    return {true, "I2(" + std::to_string(m) + ")", static_cast<std::uint64_t>(2 * m), m};
  }

  int branch = -1, heavy_edges = 0;
  for (int i = 0; i < n; ++i) {
    if (nbr[i].size() > 3) return out;
    if (nbr[i].size() == 3) {
      if (branch >= 0) return out;
      branch = i;
    }
    for (int j : nbr[i])
      if (i < j && label_of(i, j) > 3) ++heavy_edges;
  }

  if (branch >= 0) {
    if (heavy_edges) return out;
    std::vector<int> arms;
    for (int start : nbr[branch]) {
      int len = 1, prev = branch, cur = start;
      while (true) {
        int next = -1;
        for (int j : nbr[cur])
          if (j != prev) next = j;
        if (next < 0) break;
        prev = cur;
        cur = next;
        ++len;
      }
      arms.push_back(len);
    }
    std::sort(arms.begin(), arms.end());
    if (arms[0] == 1 && arms[1] == 1)
      return {true, "D" + std::to_string(n), (std::uint64_t{1} << (n - 1)) * factorial(n), n * (n - 1)};
    if (arms[0] == 1 && arms[1] == 2 && arms[2] == 2) return {true, "E6", 51840, 36};
    if (arms[0] == 1 && arms[1] == 2 && arms[2] == 3) return {true, "E7", 2903040, 63};
    if (arms[0] == 1 && arms[1] == 2 && arms[2] == 4) return {true, "E8", 696729600, 120};
    return out;
  }

  // A path: walk it from one end and read the edge labels in order.
  int end = 0;
  while (nbr[end].size() != 1) ++end;
  std::vector<int> labels;
  for (int prev = -1, cur = end;;) {
    int next = -1;
    for (int j : nbr[cur])
      if (j != prev) next = j;
    if (next < 0) break;
    labels.push_back(label_of(cur, next));
    prev = cur;
    cur = next;
  }
  if (heavy_edges == 0) return {true, "A" + std::to_string(n), factorial(n + 1), n * (n + 1) / 2};
  if (heavy_edges > 1) return out;
  auto heavy = std::find_if(labels.begin(), labels.end(), [](int m) { return m > 3; });
  int pos = static_cast<int>(heavy - labels.begin());
  bool at_end = pos == 0 || pos == static_cast<int>(labels.size()) - 1;
  if (*heavy == 4 && at_end)
    return {true, "B" + std::to_string(n), (std::uint64_t{1} << n) * factorial(n), n * n};
  if (*heavy == 4 && n == 4 && pos == 1) return {true, "F4", 1152, 24};
  if (*heavy == 5 && at_end && n == 3) return {true, "H3", 120, 15};
  if (*heavy == 5 && at_end && n == 4) return {true, "H4", 14400, 60};
  return out;
}

}  // namespace detail

inline ParabolicSpec classify_parabolic(const CoxeterSystem& sys, std::vector<Generator> subset) {
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  for (auto s : subset) sys.check_letter(s);
  ParabolicSpec spec;
  spec.subset = subset;
  spec.mask = list_to_mask(subset);
  if (subset.empty()) {
    spec.order = 1;
    spec.positive_roots = 0;
    spec.type_label = "trivial";
    return spec;
  }
  // Connected components of the diagram (edges where m >= 3 or infinite).
  std::vector<int> comp_of(subset.size(), -1);
  std::vector<std::vector<Generator>> comps;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (comp_of[i] >= 0) continue;
    comps.emplace_back();
    std::vector<std::size_t> stack{i};
    comp_of[i] = static_cast<int>(comps.size() - 1);
    while (!stack.empty()) {
      auto a = stack.back();
      stack.pop_back();
      comps.back().push_back(subset[a]);
      for (std::size_t b = 0; b < subset.size(); ++b)
        if (comp_of[b] < 0 && !sys.commute(subset[a], subset[b])) {
          comp_of[b] = comp_of[i];
          stack.push_back(b);
        }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  std::uint64_t order = 1;
  int roots = 0;
  std::string label;
  for (const auto& c : comps) {
    auto t = detail::classify_component(sys, c);
    if (!t.finite) {
      spec.finite = false;
      spec.type_label = "infinite";
      return spec;
    }
    order *= t.order;
    roots += t.positive_roots;
    if (!label.empty()) label += "x";
    label += t.label;
  }
  spec.order = order;
  spec.positive_roots = roots;
  spec.type_label = label;
  return spec;
}

inline ParabolicSpec classify_parabolic(const CoxeterSystem& sys, DescentMask mask) {
  return classify_parabolic(sys, mask_to_list(mask));
}

/// Longest element of a finite W_I by greedy left ascent inside I.
inline Element longest_element(CoxeterGroup& g, DescentMask subset) {
  if (!classify_parabolic(g.system(), subset).finite)
    throw InputError("longest element requested for an infinite parabolic subgroup");
  Element w = g.identity();
  while (true) {
    DescentMask ascents = subset & ~g.left_descents(w);
    if (!ascents) return w;
    w = g.left_mul(std::countr_zero(ascents), w);
  }
}

/// All subsets I of S (including the empty set) with W_I finite, ordered by mask.
inline std::vector<ParabolicSpec> finite_parabolics(const CoxeterSystem& sys) {
  std::vector<ParabolicSpec> out;
  const DescentMask full = sys.rank() == 32 ? ~DescentMask{0} : (DescentMask{1} << sys.rank()) - 1;
  for (DescentMask m = 0;; ++m) {
    auto spec = classify_parabolic(sys, m);
    if (spec.finite) out.push_back(std::move(spec));
    if (m == full) break;
  }
  return out;
}

/// Finite parabolics not contained in a larger finite one.
inline std::vector<ParabolicSpec> maximal_finite_parabolics(const CoxeterSystem& sys) {
  auto all = finite_parabolics(sys);
  std::vector<ParabolicSpec> out;
  for (const auto& p : all) {
    bool maximal = std::none_of(all.begin(), all.end(), [&](const ParabolicSpec& q) {
      return q.mask != p.mask && (q.mask & p.mask) == p.mask;
    });
    if (maximal) out.push_back(p);
  }
  return out;
}

/// Is w contained in some finite standard parabolic subgroup?
inline bool in_finite_parabolic(const CoxeterGroup& g, Element w) {
  return classify_parabolic(g.system(), g.support(w)).finite;
}

}  // namespace coxcells
