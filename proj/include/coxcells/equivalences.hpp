#pragma once

// Right equivalences produced by the descent rule, suffix reduction and the
// two basic-equivalence rules, each backed by exact order facts.
//
// Two kinds of facts are used, both checked by recomputation:
//   mu:     lo <=_R hi because mu(lo, hi) != 0 and R(lo) is not inside R(hi);
//   prefix: lo <=_R hi because lo = hi.c is length-additive (a chain of
//           single-letter mu-edges through shorter prefixes).
// An edge from ~ to is emitted only when the two endpoints reach each other
// in the directed graph of its facts. Every fact mentions elements no longer
// than the longest endpoint of a fact, so on a ball an edge whose facts lie in
// the ball joins two elements of one ball-restricted right cell.

#include <boost/pending/disjoint_sets.hpp>
#include <json.hpp>

#include "coxcells/conjectures.hpp"

namespace coxcells {

enum class EdgeRule { descent, lemma1, conj2a, conj2b };

inline const char* to_string(EdgeRule r) {
  switch (r) {
    case EdgeRule::descent: return "descent";
    case EdgeRule::lemma1: return "lemma1";
    case EdgeRule::conj2a: return "conj2a";
    case EdgeRule::conj2b: return "conj2b";
  }
  return "?";
}

struct OrderFact {
  enum class Kind { mu, prefix } kind = Kind::prefix;
  Element lo, hi;  // lo <=_R hi
  std::int64_t mu = 0;
};

struct EquivalenceEdge {
  Element from, to;
  EdgeRule rule = EdgeRule::descent;
  std::vector<OrderFact> facts;
  nlohmann::json certificate = nlohmann::json::object();
};

inline bool check_fact(KLTable& kl, const OrderFact& f) {
  CoxeterGroup& g = kl.group();
  if (f.kind == OrderFact::Kind::prefix) {
    Element c = g.multiply(g.inverse(f.hi), f.lo);
    return g.length(f.lo) == g.length(f.hi) + g.length(c);
  }
  if ((g.right_descents(f.lo) & ~g.right_descents(f.hi)) == 0) return false;
  return f.mu != 0 && kl.mu_sym(f.lo, f.hi) == f.mu;
}

namespace detail {

/// Mutual reachability of a and b in the fact graph.
inline bool facts_join(const std::vector<OrderFact>& facts, Element a, Element b) {
  auto reach = [&](Element from, Element to) {
    std::vector<Element> stack{from};
    std::set<Element> seen{from};
    while (!stack.empty()) {
      Element cur = stack.back();
      stack.pop_back();
      if (cur == to) return true;
      for (const auto& f : facts)
        if (f.lo == cur && seen.insert(f.hi).second) stack.push_back(f.hi);
    }
    return false;
  };
  return reach(a, b) && reach(b, a);
}

inline std::optional<OrderFact> prefix_fact(CoxeterGroup& g, Element lo, Element hi) {
  OrderFact f{OrderFact::Kind::prefix, lo, hi, 0};
  Element c = g.multiply(g.inverse(hi), lo);
  if (g.length(lo) != g.length(hi) + g.length(c)) return std::nullopt;
  return f;
}

inline std::optional<OrderFact> mu_fact(KLTable& kl, Element lo, Element hi) {
  CoxeterGroup& g = kl.group();
  if (lo == hi || (g.right_descents(lo) & ~g.right_descents(hi)) == 0) return std::nullopt;
  if ((g.length(lo) + g.length(hi)) % 2 == 0) return std::nullopt;
  std::int64_t m = kl.mu_sym(lo, hi);
  if (m == 0) return std::nullopt;
  return OrderFact{OrderFact::Kind::mu, lo, hi, m};
}

/// Elements P with a <= P <= b in the right weak order, a itself excluded.
inline std::vector<Element> weak_interval(CoxeterGroup& g, Element a, Element b) {
  Element c = g.multiply(g.inverse(a), b);
  std::vector<Element> qs{c};
  std::unordered_set<std::int32_t> seen{c.id};
  for (std::size_t i = 0; i < qs.size(); ++i) {
    DescentMask d = g.right_descents(qs[i]);
    for (Generator s = 0; s < g.rank(); ++s) {
      if (!has_gen(d, s)) continue;
      Element q = g.right_mul(qs[i], s);
      if (g.length(q) > 0 && seen.insert(q.id).second) qs.push_back(q);
    }
  }
  std::vector<Element> out;
  for (Element q : qs) out.push_back(g.multiply(a, q));
  return out;
}

inline std::vector<Element> suffixes_shortest_first(CoxeterGroup& g, Element v) {
  // v = p.q with q ranging over the right-weak suffixes: q^{-1} is a prefix of v^{-1}.
  std::vector<Element> out{g.identity()};
  std::unordered_set<std::int32_t> seen{g.identity().id};
  for (std::size_t i = 0; i < out.size(); ++i) {
    Element q = out[i];
    Element p = g.multiply(v, g.inverse(q));
    DescentMask d = g.right_descents(p);
    for (Generator s = 0; s < g.rank(); ++s) {
      if (!has_gen(d, s)) continue;
      Element q2 = g.left_mul(s, q);
      if (seen.insert(q2.id).second) out.push_back(q2);
    }
  }
  std::stable_sort(out.begin(), out.end(), [&](Element a, Element b) {
    if (g.length(a) != g.length(b)) return g.length(a) < g.length(b);
    return g.shortlex_less(a, b);
  });
  return out;
}

inline nlohmann::json fact_json(const CoxeterGroup& g, const OrderFact& f) {
  nlohmann::json j;
  j["kind"] = f.kind == OrderFact::Kind::mu ? "mu" : "prefix";
  j["lo"] = g.format(f.lo);
  j["hi"] = g.format(f.hi);
  if (f.kind == OrderFact::Kind::mu) j["mu"] = f.mu;
  return j;
}

}  // namespace detail

/// Independent re-check of an edge: all facts hold and join the endpoints.
inline bool verify_edge(KLTable& kl, const EquivalenceEdge& e) {
  for (const auto& f : e.facts)
    if (!check_fact(kl, f)) return false;
  return detail::facts_join(e.facts, e.from, e.to);
}

inline int edge_max_length(const CoxeterGroup& g, const EquivalenceEdge& e) {
  int m = std::max(g.length(e.from), g.length(e.to));
  for (const auto& f : e.facts) m = std::max({m, g.length(f.lo), g.length(f.hi)});
  return m;
}

inline std::optional<EquivalenceEdge> make_edge(Element from, Element to, EdgeRule rule, std::vector<OrderFact> facts,
                                                nlohmann::json cert = nlohmann::json::object()) {
  if (from == to || !detail::facts_join(facts, from, to)) return std::nullopt;
  return EquivalenceEdge{from, to, rule, std::move(facts), std::move(cert)};
}

/// u = x.v1.x^{-1} with its factors.
struct DMember {
  Element u, x, v1;
};

inline DMember member_of(CoxeterGroup& g, const DInvRecord& r) {
  if (r.provenance.kind != Provenance::Kind::generated || !r.provenance.base)
    return {r.element, g.identity(), r.element};
  Element x = g.identity();
  for (Generator s : r.provenance.chain) x = g.left_mul(s, x);
  return {r.element, x, *r.provenance.base};
}

// Descent rule --------------------------------------------------------------

/// w ~ ws for s in R(w) when R(ws) is not inside R(w).
inline std::optional<EquivalenceEdge> descent_edge(KLTable& kl, Element w, Generator s) {
  CoxeterGroup& g = kl.group();
  if (!has_gen(g.right_descents(w), s)) return std::nullopt;
  Element ws = g.right_mul(w, s);
  auto up = detail::mu_fact(kl, ws, w);
  if (!up) return std::nullopt;
  std::vector<OrderFact> facts{*detail::prefix_fact(g, w, ws), *up};
  nlohmann::json cert{{"s", g.system().format_word({s})}};
  return make_edge(w, ws, EdgeRule::descent, std::move(facts), cert);
}

// Sandwich certificates -------------------------------------------------------

/// Certify t ~ w for w = t.c by an X = w.q (l(q) <= max_extra) with
/// mu(t, X) != 0 and R(t) not inside R(X): then X <= w <= t <= X.
inline std::optional<EquivalenceEdge> sandwich_edge(KLTable& kl, Element t, Element w, int max_extra, EdgeRule rule,
                                                    nlohmann::json cert = nlohmann::json::object()) {
  CoxeterGroup& g = kl.group();
  auto base = detail::prefix_fact(g, w, t);
  if (!base || t == w) return std::nullopt;
  std::vector<Element> level{w};
  std::unordered_set<std::int32_t> seen{w.id};
  for (int extra = 0; extra <= max_extra; ++extra) {
    for (Element X : level) {
      if ((g.length(X) - g.length(t)) % 2 == 0) continue;
      if (auto m = detail::mu_fact(kl, t, X)) {
        std::vector<OrderFact> facts{*m, *base};
        if (X != w) facts.push_back(*detail::prefix_fact(g, X, w));
        cert["X"] = g.format(X);
        return make_edge(t, w, rule, std::move(facts), cert);
      }
    }
    std::vector<Element> next;
    for (Element X : level) {
      DescentMask d = g.right_descents(X);
      for (Generator s = 0; s < g.rank(); ++s)
        if (!has_gen(d, s)) {
          Element y = g.right_mul(X, s);
          if (seen.insert(y.id).second) next.push_back(y);
        }
    }
    g.sort_shortlex(next);
    level = std::move(next);
  }
  return std::nullopt;
}

// Rule a: w ~ w.u.v01^{-1} ----------------------------------------------------

struct Conj2aOptions {
  bool require_rigidity = true;
};

/// w = y.v0 with v0 in M(w), u in D. Searches suffixes v01 of v0 (shortest
/// first) with X = w.u.v01^{-1} length-additive, R(X) a proper subset of R(w)
/// and mu(w, X) != 0. For each such X, in search order, returns edges w ~ P for
/// every P between w and X in the right weak order (X and w.u among them).
inline std::vector<EquivalenceEdge> conj2a_apply(ConjectureEngine& eng, Element w, const FactorizationWitness& wit,
                                                 const DMember& u, const Conj2aOptions& opt = {},
                                                 int max_length = std::numeric_limits<int>::max()) {
  KLTable& kl = eng.kl();
  CoxeterGroup& g = eng.group();
  std::vector<EquivalenceEdge> out;
  Element v0 = wit.v;
  if (g.length(v0) == 0 || g.multiply(wit.x, v0) != w || g.length(wit.y) != 0) return out;
  if (eng.dominator(eng.zset(w), wit)) return out;
  if (eng.a_best(u.u).value > eng.a_exact(v0)) return out;
  Element wp = g.multiply(w, u.u);
  if (g.length(wp) != g.length(w) + g.length(u.u) || g.length(wp) > max_length) return out;
  if (eng.a_best(wp).value != eng.a_best(w).value) return out;
  const DescentMask rw = g.right_descents(w);
  auto suffixes = detail::suffixes_shortest_first(g, v0);
  for (Element v01 : suffixes) {
    Element X = g.multiply(wp, g.inverse(v01));
    if (g.length(X) != g.length(wp) + g.length(v01) || g.length(X) > max_length) continue;
    DescentMask rx = g.right_descents(X);
    if ((rx & ~rw) != 0 || rx == rw) continue;
    auto m = detail::mu_fact(kl, w, X);
    if (!m) continue;
    if (opt.require_rigidity) {
      bool ok = true;
      for (Element alt : suffixes) {
        if (g.length(alt) != g.length(v01)) continue;
        Element ax = g.multiply(alt, u.x);
        if (g.length(ax) != g.length(alt) + g.length(u.x)) {
          ok = false;
          break;
        }
        if (!eng.is_rigid(ax, u.v1, g.identity()).rigid) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
    }
    nlohmann::json cert{{"v0", g.format(v0)},   {"u", g.format(u.u)}, {"x", g.format(u.x)},
                        {"v1", g.format(u.v1)}, {"v01", g.format(v01)}, {"X", g.format(X)},
                        {"mu", m->mu}};
    for (Element P : detail::weak_interval(g, w, X)) {
      std::vector<OrderFact> facts{*m, *detail::prefix_fact(g, P, w)};
      if (P != X) facts.push_back(*detail::prefix_fact(g, X, P));
      if (auto e = make_edge(w, P, EdgeRule::conj2a, std::move(facts), cert)) out.push_back(std::move(*e));
    }
  }
  return out;
}

// Rule b: moving a finite factor across --------------------------------------

/// w'' = w.v1 with v1 in D_f not maximal in w''. Searches w = p.v02.v03 with
/// v03.v1 in M(w''), shortest v02 first, such that X = w'' v02^{-1} has
/// R(X) != R(w) and mu(w, X) != 0. For every such X (search order) returns the
/// certified edges among w, X, w'' and the weak-order elements between w and w''.
inline std::vector<EquivalenceEdge> conj2b_apply(ConjectureEngine& eng, Element w, Element v1,
                                                 int max_length = std::numeric_limits<int>::max()) {
  KLTable& kl = eng.kl();
  CoxeterGroup& g = eng.group();
  std::vector<EquivalenceEdge> out;
  Element wpp = g.multiply(w, v1);
  if (g.length(v1) == 0 || g.length(wpp) != g.length(w) + g.length(v1) || g.length(wpp) > max_length) return out;
  if (!eng.in_d_f(v1)) return out;
  const ZSet& zpp = eng.zset(wpp);
  if (!eng.dominator(zpp, FactorizationWitness{w, v1, g.identity(), g.support(v1)})) return out;
  const int app = eng.a_best(wpp).value;
  bool v0_ok = false;
  for (const auto& wit : eng.maximal_set(w))
    if (g.length(wit.y) == 0 && g.length(wit.v) > 0 && eng.a_exact(wit.v) == app) v0_ok = true;
  if (!v0_ok) return out;

  struct Cand {
    Element v02, v03, X;
  };
  std::vector<Cand> cands;
  for (Element v03 : detail::suffixes_shortest_first(g, w)) {
    Element v03v1 = g.multiply(v03, v1);
    if (g.length(v03v1) != g.length(v03) + g.length(v1) || !eng.finite_mask(g.support(v03v1))) continue;
    Element p = g.multiply(w, g.inverse(v03));
    if (eng.dominator(zpp, FactorizationWitness{p, v03v1, g.identity(), g.support(v03v1)})) continue;
    for (Element v02 : detail::suffixes_shortest_first(g, p))
      cands.push_back({v02, v03, g.multiply(wpp, g.inverse(v02))});
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [&](const Cand& a, const Cand& b) { return g.length(a.v02) < g.length(b.v02); });
  const DescentMask rw = g.right_descents(w);
  std::unordered_set<std::int32_t> done;
  for (const auto& c : cands) {
    if (!done.insert(c.X.id).second) continue;
    if (c.X == w || g.length(c.X) > max_length || g.right_descents(c.X) == rw) continue;
    if ((g.length(w) + g.length(c.X)) % 2 == 0 || kl.mu_sym(w, c.X) == 0) continue;
    std::vector<OrderFact> facts{*detail::prefix_fact(g, wpp, w)};
    for (auto [a, b] : {std::pair{w, c.X}, std::pair{c.X, w}, std::pair{wpp, c.X}, std::pair{c.X, wpp}}) {
      if (auto m = detail::mu_fact(kl, a, b)) facts.push_back(*m);
      if (auto p = detail::prefix_fact(g, a, b); p && a != b) facts.push_back(*p);
    }
    if (!detail::facts_join(facts, w, c.X) || !detail::facts_join(facts, c.X, wpp)) continue;
    nlohmann::json cert{{"v1", g.format(v1)}, {"v02", g.format(c.v02)}, {"v03", g.format(c.v03)},
                        {"X", g.format(c.X)}, {"mu", kl.mu_sym(w, c.X)}};
    if (auto e = make_edge(w, c.X, EdgeRule::conj2b, facts, cert)) out.push_back(std::move(*e));
    for (Element P : detail::weak_interval(g, w, wpp)) {
      auto f = facts;
      f.push_back(*detail::prefix_fact(g, P, w));
      if (P != wpp) f.push_back(*detail::prefix_fact(g, wpp, P));
      if (P == c.X) continue;
      if (auto e = make_edge(w, P, EdgeRule::conj2b, std::move(f), cert)) out.push_back(std::move(*e));
    }
  }
  return out;
}

namespace detail {

/// Replace u by the distinguished involution of its right cell in W_{supp(u)},
/// lifting the finite cell's mu-edges through y.
inline std::optional<std::pair<EquivalenceEdge, Element>> substitute_d(ConjectureEngine& eng, Element y, Element u) {
  KLTable& kl = eng.kl();
  CoxeterGroup& g = eng.group();
  const auto& data = eng.finite_cells(g.support(u));
  auto d = data.d(u);
  if (!d) return std::nullopt;
  const std::vector<Element>* cell = nullptr;
  for (const auto& c : data.right_cells)
    if (std::find(c.begin(), c.end(), u) != c.end()) cell = &c;
  std::vector<Element> lifted;
  for (Element z : *cell) {
    Element yz = g.multiply(y, z);
    if (g.length(yz) == g.length(y) + g.length(z)) lifted.push_back(yz);
  }
  std::vector<OrderFact> facts;
  for (Element a : lifted)
    for (Element b : lifted) {
      if (a == b) continue;
      if (auto m = mu_fact(kl, a, b)) facts.push_back(*m);
      if (auto p = prefix_fact(g, a, b)) facts.push_back(*p);
    }
  Element from = g.multiply(y, u), to = g.multiply(y, *d);
  nlohmann::json cert{{"substitute", g.format(u)}, {"by", g.format(*d)}};
  auto e = make_edge(from, to, EdgeRule::lemma1, std::move(facts), cert);
  if (!e) return std::nullopt;
  return std::pair{std::move(*e), to};
}

}  // namespace detail

// Reduction to the leading suffix ------------------------------------------

struct Lemma1Result {
  std::vector<EquivalenceEdge> chain;
  Element target;  // x1 v1
  FactorizationWitness first, second;  // (x1, v1, x2 v2) and (x1 v1 x2, v2, e)
};

/// w = x1.v1.x2.v2 with v1, v2 in M(w), a(v1) >= a(v2) > a(x2) and
/// a(x2 v2) = a(v2); certifies w ~ x1 v1.
///
/// v2 is first replaced by its finite distinguished involution v2'. Then with
/// t = x1 v1 and w2 = t x2 v2', the element X = w2 x2^{-1} v01^{-1} (v01 a
/// suffix of v1, shortest first) closes the loop t <= X <= w2 <= t once
/// mu(t, X) != 0 with R(t) not inside R(X).
inline std::optional<Lemma1Result> lemma1_reduce(ConjectureEngine& eng, Element w) {
  KLTable& kl = eng.kl();
  CoxeterGroup& g = eng.group();
  auto wits = eng.maximal_set(w);
  std::vector<FactorizationWitness> tails;
  for (const auto& t : wits)
    if (g.length(t.y) == 0 && g.length(t.v) > 0) tails.push_back(t);
  for (const auto& first : wits) {
    if (g.length(first.v) == 0 || g.length(first.y) == 0) continue;
    const int a1 = eng.a_exact(first.v);
    Element t = g.multiply(first.x, first.v);
    for (const auto& second : tails) {
      const int a2 = eng.a_exact(second.v);
      if (a2 > a1) continue;
      Element x2 = g.multiply(g.inverse(t), second.x);
      if (g.length(second.x) != g.length(t) + g.length(x2)) continue;
      if (eng.a_best(x2).value >= a2) continue;
      Element x2v2 = g.multiply(x2, second.v);
      if (eng.a_best(x2v2).value != a2) continue;
      nlohmann::json cert{{"x1", g.format(first.x)}, {"v1", g.format(first.v)},
                          {"x2", g.format(x2)},      {"v2", g.format(second.v)}};
      Lemma1Result res{{}, t, first, second};
      if (a2 == 1 && g.length(x2) == 0 && g.length(second.v) == 1) {
        if (auto e = descent_edge(kl, w, g.word(second.v)[0])) {
          e->rule = EdgeRule::lemma1;
          e->certificate = cert;
          res.chain.push_back(std::move(*e));
          return res;
        }
        continue;
      }
      Element w2 = w;
      Element v2 = second.v;
      if (!eng.in_d_f(v2)) {
        auto sub = detail::substitute_d(eng, second.x, v2);
        if (!sub) continue;
        res.chain.push_back(std::move(sub->first));
        w2 = sub->second;
        v2 = g.multiply(g.inverse(second.x), w2);
      }
      Element w2x = g.multiply(w2, g.inverse(x2));
      if (g.length(w2x) != g.length(w2) + g.length(x2)) continue;
      bool done = false;
      for (Element v01 : detail::suffixes_shortest_first(g, first.v)) {
        Element X = g.multiply(w2x, g.inverse(v01));
        if (g.length(X) != g.length(w2x) + g.length(v01)) continue;
        auto m = detail::mu_fact(kl, t, X);
        if (!m) continue;
        auto c = cert;
        c["v01"] = g.format(v01);
        c["X"] = g.format(X);
        c["mu"] = m->mu;
        std::vector<OrderFact> facts{*m, *detail::prefix_fact(g, X, w2), *detail::prefix_fact(g, w2, t)};
        if (auto e = make_edge(t, w2, EdgeRule::lemma1, std::move(facts), c)) {
          res.chain.push_back(std::move(*e));
          done = true;
          break;
        }
      }
      if (done) return res;
    }
  }
  return std::nullopt;
}

// The walk to d(w) ---------------------------------------------------------

struct WalkResult {
  std::optional<Element> d;
  std::vector<EquivalenceEdge> chain;
  bool complete = false;
  std::string note;
};

inline WalkResult find_distinguished_involution(ConjectureEngine& eng, Element w, int max_steps = 200) {
  KLTable& kl = eng.kl();
  CoxeterGroup& g = eng.group();
  WalkResult res;
  std::unordered_set<std::int32_t> visited;
  // y.u rigid at u: d = y.u.y^{-1}, certified against y.u.
  auto conclude = [&](Element y) {
    Element d = g.multiply(w, g.inverse(y));
    if (g.length(d) != g.length(w) + g.length(y)) {
      res.note = "y.u.y^{-1} is not length-additive";
      return;
    }
    // A visited d is already tied to w by the chain.
    if (d != w && !visited.count(d.id)) {
      auto e = sandwich_edge(kl, w, d, g.length(y), EdgeRule::conj2a, {{"conclusion", true}});
      if (!e) {
        res.note = "d ~ y.u not certified";
        res.d = d;
        return;
      }
      res.chain.push_back(std::move(*e));
    }
    res.d = d;
    res.complete = true;
  };
  for (int step = 0; step < max_steps; ++step) {
    if (!visited.insert(w.id).second) {
      res.note = "walk revisited " + g.format(w);
      return res;
    }
    if (g.length(w) <= 1) {
      res.d = w;
      res.complete = true;
      return res;
    }
    DescentMask r = g.right_descents(w);
    if (mask_size(r) == 1) {
      auto e = descent_edge(kl, w, static_cast<Generator>(std::countr_zero(r)));
      if (!e) break;
      w = e->to;
      res.chain.push_back(std::move(*e));
      continue;
    }
    // Already of the final shape: a rigid D_f suffix carrying a(w).
    {
      const int aw = eng.a_best(w).value;
      bool found = false;
      for (const auto& wit : eng.zset(w).witnesses) {
        if (g.length(wit.y) != 0 || g.length(wit.v) == 0 || !eng.in_d_f(wit.v)) continue;
        if (eng.a_exact(wit.v) != aw || eng.a_best(wit.x).value >= aw) continue;
        if (!eng.is_rigid(w, wit).rigid) continue;
        conclude(wit.x);
        found = true;
        break;
      }
      if (found) return res;
    }
    // Suffix factor of largest a, shortest prefix.
    std::optional<FactorizationWitness> best;
    for (const auto& wit : eng.maximal_set(w)) {
      if (g.length(wit.y) != 0 || g.length(wit.v) == 0) continue;
      if (!best || eng.a_exact(wit.v) > eng.a_exact(best->v)) best = wit;
    }
    if (!best) break;
    Element y = best->x, u = best->v;
    if (g.length(y) > 0 && eng.a_best(y).value >= eng.a_exact(u)) {
      auto l1 = lemma1_reduce(eng, w);
      if (!l1) {
        res.note = "suffix reduction not certified at " + g.format(w);
        return res;
      }
      for (auto& e : l1->chain) res.chain.push_back(std::move(e));
      w = l1->target;
      continue;
    }
    if (!eng.in_d_f(u)) {
      auto sub = detail::substitute_d(eng, y, u);
      if (!sub) {
        res.note = "substitution of the finite distinguished involution not certified at " + g.format(w);
        return res;
      }
      res.chain.push_back(std::move(sub->first));
      w = sub->second;
      continue;
    }
    auto rig = eng.is_rigid(w, *best);
    if (rig.rigid) {
      conclude(y);
      return res;
    }
    // Not rigid: shift along a violating factorization w = x'.v'.y' with l(y') > 0.
    bool moved = false;
    for (const auto& viol : rig.violations) {
      if (g.length(viol.y) == 0) continue;
      Element t = g.multiply(viol.x, viol.v);
      auto e = sandwich_edge(kl, t, w, g.length(viol.y) + g.length(viol.v), EdgeRule::conj2b,
                             {{"shift", eng.format_witness(viol)}});
      if (!e) continue;
      res.chain.push_back(std::move(*e));
      w = t;
      moved = true;
      break;
    }
    if (!moved) {
      res.note = "no certified shift at " + g.format(w);
      return res;
    }
  }
  res.note = res.note.empty() ? "walk did not terminate within the step budget" : res.note;
  return res;
}

// Hypothesis check for one w ~ w.u.v01 instance -------------------------------

struct Thm2Diagnostics {
  bool preconditions = false;
  std::string failure;  // first failed precondition
  std::vector<std::pair<std::string, Thm1Diagnostics>> hypotheses;
  bool hypotheses_hold = false;
  Element w_prime;
  bool reduced = false, descent_subset = false, a_equal = false;
  std::int64_t mu = 0;
  bool all() const { return preconditions && hypotheses_hold && reduced && descent_subset && a_equal && mu != 0; }
};

/// w = x.v0 with v0 = s_l ... s_1 (the given word) the longest element of a
/// finite standard parabolic, u = y.u0.y^{-1}. Checks hypotheses (1) and (2)
/// through thm1_check, then the conclusion for w' = w.u.v01 with
/// v01 = s_1 ... s_{l-1} unless given.
inline Thm2Diagnostics thm2_check(ConjectureEngine& eng, Element x, const Word& v0_word, const DMember& u,
                                  std::optional<Element> v01 = std::nullopt) {
  KLTable& kl = eng.kl();
  CoxeterGroup& g = eng.group();
  Thm2Diagnostics d;
  const Element v0 = g.element(v0_word);
  const int l = static_cast<int>(v0_word.size());
  auto fail = [&](std::string why) {
    d.failure = std::move(why);
    return d;
  };
  if (g.length(v0) != l) return fail("v0 word is not reduced");
  DescentMask supp = g.support(v0);
  if (!eng.finite_mask(supp) || longest_element(g, supp) != v0) return fail("v0 is not a longest parabolic element");
  const Element w = g.multiply(x, v0);
  if (g.length(w) != g.length(x) + l) return fail("x.v0 is not reduced");
  if (eng.dominator(eng.zset(w), FactorizationWitness{x, v0, g.identity(), supp})) return fail("v0 is not maximal in w");
  if (eng.a_exact(v0) != l) return fail("a(v0) differs from l(v0)");
  if (g.length(u.u) != 2 * g.length(u.x) + g.length(u.v1)) return fail("y.u0.y^{-1} is not reduced");
  if (eng.a_exact(u.v1) != l || eng.a_best(u.u).value != l) return fail("a(u) = a(u0) = l fails");
  d.preconditions = true;

  // s_i is the i-th letter from the right of the v0 word.
  auto s_at = [&](int i) { return v0_word[static_cast<std::size_t>(l - i)]; };
  bool hold = true;
  const Word xw = g.word(x);
  const int n = static_cast<int>(xw.size());
  auto t_at = [&](int j) { return xw[static_cast<std::size_t>(n - j)]; };  // x = t_n ... t_1
  Element xj = g.identity();
  for (int j = 0; j < n; ++j) {
    auto diag = eng.thm1_check(xj, v0, t_at(j + 1));
    bool ok = diag.all();
    std::string label = "(1) j=" + std::to_string(j) + " t=" + g.system().format_word({t_at(j + 1)});
    if (!ok && j >= 2) {
      Element vj = g.multiply(g.multiply(xj, v0), g.inverse(xj));
      Generator alt = t_at(j - 1);
      if (!has_gen(g.right_descents(vj), alt)) {
        auto d2 = eng.thm1_check(xj, v0, alt);
        if (d2.all()) {
          diag = d2;
          ok = true;
          label = "(1) j=" + std::to_string(j) + " t=" + g.system().format_word({alt});
        }
      }
    }
    hold = hold && ok;
    d.hypotheses.emplace_back(label, diag);
    xj = g.left_mul(t_at(j + 1), xj);
  }
  Element xu = u.x;
  for (int j = 1; j <= l - 1; ++j) {
    auto diag = eng.thm1_check(xu, u.v1, s_at(j));
    hold = hold && diag.all();
    d.hypotheses.emplace_back("(2) j=" + std::to_string(j) + " s=" + g.system().format_word({s_at(j)}), diag);
    xu = g.left_mul(s_at(j), xu);
  }
  d.hypotheses_hold = hold;

  Element tail = g.identity();
  if (v01) {
    tail = *v01;
  } else {
    for (int i = 1; i <= l - 1; ++i) tail = g.right_mul(tail, s_at(i));
  }
  Element wu = g.multiply(w, u.u);
  d.w_prime = g.multiply(wu, tail);
  d.reduced = g.length(wu) == g.length(w) + g.length(u.u) && g.length(d.w_prime) == g.length(wu) + g.length(tail);
  DescentMask rw = g.right_descents(w), rp = g.right_descents(d.w_prime);
  d.descent_subset = (rp & ~rw) == 0 && rp != rw;
  d.a_equal = eng.a_best(d.w_prime).value == eng.a_best(w).value;
  d.mu = kl.mu_sym(w, d.w_prime);
  return d;
}

// Reconstruction -------------------------------------------------------------

struct CellComparison {
  std::size_t certified_blocks = 0;     // brute-force blocks with certified members
  std::size_t agreeing_blocks = 0;      // reproduced exactly on the certified region
  std::vector<std::string> refinements;  // brute-force block split by the reconstruction
  std::vector<std::string> conflicts;    // reconstruction joins different brute-force blocks
  std::size_t edge_conflicts = 0;        // edges whose endpoints sit in different brute-force blocks
  bool agrees() const { return refinements.empty() && conflicts.empty() && edge_conflicts == 0; }
};

struct Reconstruction {
  CellPartition partition;
  std::vector<EquivalenceEdge> edges;
  std::map<EdgeRule, std::size_t> rule_counts;
  CellComparison comparison;
};

struct ReconstructOptions {
  bool descent = true, conj2a = true, conj2b = true, lemma1 = true;
  Conj2aOptions conj2a_options;
};

inline CellComparison compare_partitions(const CoxeterGroup& g, const CellPartition& reference,
                                         const CellPartition& candidate) {
  CellComparison cmp;
  const Ball& ball = *reference.ball;
  std::map<int, std::set<int>> ref_to_cand, cand_to_ref;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (!reference.certified[i]) continue;
    ref_to_cand[reference.block_of[i]].insert(candidate.block_of[i]);
    cand_to_ref[candidate.block_of[i]].insert(reference.block_of[i]);
  }
  cmp.certified_blocks = ref_to_cand.size();
  for (const auto& [rb, cbs] : ref_to_cand) {
    bool clean = cbs.size() == 1 && cand_to_ref[*cbs.begin()].size() == 1;
    if (clean) ++cmp.agreeing_blocks;
    if (cbs.size() > 1)
      cmp.refinements.push_back("block of " + g.format(reference.blocks[rb].front()) + " split into " +
                                std::to_string(cbs.size()) + " parts");
  }
  for (const auto& [cb, rbs] : cand_to_ref)
    if (rbs.size() > 1)
      cmp.conflicts.push_back("reconstructed block of " + g.format(candidate.blocks[cb].front()) + " meets " +
                              std::to_string(rbs.size()) + " brute-force blocks");
  return cmp;
}

/// Union-find closure of all certified edges whose facts stay inside the ball,
/// compared against the brute-force right partition on its certified region.
inline Reconstruction reconstruct_cells(ConjectureEngine& eng, const Ball& ball, const CellPartition& reference,
                                        const std::vector<DInvRecord>& d_candidates,
                                        const ReconstructOptions& opt = {}) {
  KLTable& kl = eng.kl();
  CoxeterGroup& g = eng.group();
  const int R = ball.radius;
  Reconstruction rec;
  auto keep = [&](EquivalenceEdge e) {
    if (!ball.contains(e.from) || !ball.contains(e.to) || edge_max_length(g, e) > R) return;
    rec.edges.push_back(std::move(e));
  };
  std::vector<DMember> members;
  for (const auto& r : eng.d_f(false)) members.push_back(member_of(g, r));
  for (const auto& r : d_candidates)
    if (r.length <= R) members.push_back(member_of(g, r));
  std::vector<Element> d_f_elems;
  for (const auto& r : eng.d_f(false)) d_f_elems.push_back(r.element);

  for (Element w : ball.elements) {
    const int lw = g.length(w);
    if (lw == 0) continue;
    if (opt.descent)
      for (Generator s = 0; s < g.rank(); ++s)
        if (auto e = descent_edge(kl, w, s)) keep(std::move(*e));
    if (opt.conj2a) {
      for (const auto& wit : eng.maximal_set(w)) {
        if (g.length(wit.y) != 0 || g.length(wit.v) == 0) continue;
        for (const auto& u : members) {
          if (lw + g.length(u.u) > R) continue;
          for (auto& e : conj2a_apply(eng, w, wit, u, opt.conj2a_options, R)) keep(std::move(e));
        }
      }
    }
    if (opt.conj2b)
      for (Element v1 : d_f_elems)
        if (lw + g.length(v1) <= R)
          for (auto& e : conj2b_apply(eng, w, v1, R)) keep(std::move(e));
    if (opt.lemma1 && mask_size(g.right_descents(w)) > 1)
      if (auto l1 = lemma1_reduce(eng, w))
        for (auto& e : l1->chain) keep(std::move(e));
  }

  const std::size_t n = ball.size();
  std::vector<std::size_t> rank(n), parent(n);
  auto id = boost::typed_identity_property_map<std::size_t>();
  boost::disjoint_sets ds(boost::make_iterator_property_map(rank.begin(), id),
                          boost::make_iterator_property_map(parent.begin(), id));
  for (std::size_t i = 0; i < n; ++i) ds.make_set(i);
  for (const auto& e : rec.edges) {
    ds.union_set(ball.ordinal(e.from), ball.ordinal(e.to));
    ++rec.rule_counts[e.rule];
  }
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(ds.find_set(i));
  rec.partition = detail::partition_from_labels(ball, labels, CellSide::right, reference.margin, reference.certified);
  rec.comparison = compare_partitions(g, reference, rec.partition);
  for (const auto& e : rec.edges)
    if (reference.block_index(e.from) != reference.block_index(e.to)) ++rec.comparison.edge_conflicts;
  return rec;
}

inline nlohmann::json to_json(const CoxeterGroup& g, const EquivalenceEdge& e) {
  nlohmann::json j;
  j["from"] = g.format(e.from);
  j["to"] = g.format(e.to);
  j["rule"] = to_string(e.rule);
  j["certificate"] = e.certificate;
  j["facts"] = nlohmann::json::array();
  for (const auto& f : e.facts) j["facts"].push_back(detail::fact_json(g, f));
  return j;
}

}  // namespace coxcells
