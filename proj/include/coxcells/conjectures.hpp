#pragma once

// Factorization sets Z(w) and M(w), the a'-function, combinatorial rigidity,
// generation of distinguished involutions and the equivalence rules that
// rebuild right cells.
//
// Z(w) is enumerated through weak-order prefixes: w = x.v.y with v in a finite
// W_I holds exactly when x is a prefix of w and v is a prefix of the W_I-part
// of x^{-1}w. This covers every contiguous finite-parabolic segment of every
// reduced word without listing the words themselves.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "coxcells/cells.hpp"

namespace coxcells {

struct FactorizationWitness {
  Element x, v, y;
  DescentMask parabolic = 0;  // support of v
  friend bool operator==(const FactorizationWitness& a, const FactorizationWitness& b) {
    return a.x == b.x && a.v == b.v && a.y == b.y;
  }
};

struct ZSet {
  Element w;
  std::vector<FactorizationWitness> witnesses;
  bool truncated = false;
};

struct RigidityReport {
  FactorizationWitness witness;
  bool rigid = false;
  bool exhaustive = true;
  bool in_d_f = false;
  bool maximal = false;
  std::optional<FactorizationWitness> violation;  // flank lengths differ, a(v') >= a(v)
  std::vector<FactorizationWitness> violations;   // all of them, primary first
  std::optional<FactorizationWitness> dominating;  // witness of non-maximality
  std::string reason;
};

struct Rejection {
  Element state_x, seed;
  Generator s = 0;
  std::string reason;
  std::optional<RigidityReport> rigidity;
};

struct GenerationResult {
  std::vector<DInvRecord> records;  // generated only, in discovery order
  std::vector<Rejection> rejections;
  std::vector<std::string> warnings;
  bool closed = true;  // no accepted extension was cut off by max_len
};

enum class GenerationMode { conj1, thm1 };

/// Which factors may challenge a witness in the rigidity test: only those in
/// D_f, or every finite-parabolic factor.
enum class ChallengerScope { d_f, all };

struct Thm1Diagnostics {
  bool v_in_d = false, a_equal = false, descent_difference = false, rigid = false;
  bool reduced = false;
  AValue a_v, a_vs;
  std::optional<RigidityReport> rigidity;
  bool all() const { return v_in_d && a_equal && descent_difference && rigid && reduced; }
};

class ConjectureEngine {
 public:
  explicit ConjectureEngine(AFunction& af, ChallengerScope scope = ChallengerScope::d_f,
                            std::size_t witness_budget = 200'000)
      : af_(af), kl_(af.kl()), g_(kl_.group()), scope_(scope), budget_(witness_budget) {
    for (const auto& p : maximal_finite_parabolics(g_.system())) max_finite_.push_back(p.mask);
  }

  AFunction& a_function() { return af_; }
  KLTable& kl() { return kl_; }
  CoxeterGroup& group() { return g_; }
  ChallengerScope scope() const { return scope_; }

  bool finite_mask(DescentMask m) {
    auto it = finite_cache_.find(m);
    if (it != finite_cache_.end()) return it->second;
    bool f = classify_parabolic(g_.system(), m).finite;
    finite_cache_.emplace(m, f);
    return f;
  }

  /// Exact a of an element of a finite standard parabolic.
  int a_exact(Element v) { return af_.exact_in_parabolic(v).value; }

  // Z(w) --------------------------------------------------------------------

  const ZSet& zset(Element w) {
    if (auto it = zcache_.find(w.id); it != zcache_.end()) return it->second;
    ZSet z;
    z.w = w;
    std::set<std::pair<std::int32_t, std::int32_t>> seen;
    for (const auto& [x, r] : prefix_pairs(w)) {
      if (!seen.count({x.id, g_.identity().id})) {
        seen.insert({x.id, g_.identity().id});
        z.witnesses.push_back({x, g_.identity(), r, 0});
      }
      for (DescentMask I : max_finite_) {
        Element vi = g_.left_parabolic_split(r, I).first;
        if (g_.length(vi) == 0) continue;
        for (const auto& [v, rest] : prefix_pairs(vi)) {
          if (g_.length(v) == 0) continue;
          if (!seen.insert({x.id, v.id}).second) continue;
          Element y = g_.multiply(rest, g_.multiply(g_.inverse(vi), r));
          z.witnesses.push_back({x, v, y, g_.support(v)});
          if (z.witnesses.size() > budget_) {
            z.truncated = true;
            break;
          }
        }
        if (z.truncated) break;
      }
      if (z.truncated) break;
    }
    std::sort(z.witnesses.begin(), z.witnesses.end(), [&](const auto& a, const auto& b) {
      if (a.x != b.x) return g_.shortlex_less(a.x, b.x);
      return g_.shortlex_less(a.v, b.v);
    });
    return zcache_.emplace(w.id, std::move(z)).first->second;
  }

  /// The surviving witnesses: no (x', v', y') with v < v' in Bruhat order, x' <= x, y' <= y.
  std::vector<FactorizationWitness> maximal_set(Element w) {
    const ZSet& z = zset(w);
    std::vector<FactorizationWitness> out;
    for (const auto& wit : z.witnesses)
      if (!dominator(z, wit)) out.push_back(wit);
    return out;
  }

  /// Distinct v-values of M(w), shortlex order.
  std::vector<Element> maximal_values(Element w) {
    if (auto it = mcache_.find(w.id); it != mcache_.end()) return it->second;
    std::vector<Element> vs;
    for (const auto& wit : maximal_set(w))
      if (std::find(vs.begin(), vs.end(), wit.v) == vs.end()) vs.push_back(wit.v);
    g_.sort_shortlex(vs);
    return mcache_.emplace(w.id, vs).first->second;
  }

  std::optional<FactorizationWitness> dominator(const ZSet& z, const FactorizationWitness& wit,
                                               bool d_f_only = false) {
    const int lv = g_.length(wit.v), lx = g_.length(wit.x), ly = g_.length(wit.y);
    for (const auto& c : z.witnesses) {
      if (g_.length(c.v) <= lv || g_.length(c.x) > lx || g_.length(c.y) > ly) continue;
      if ((wit.parabolic & ~c.parabolic) != 0) continue;
      if (d_f_only && !in_d_f(c.v)) continue;
      if (g_.bruhat_leq(wit.v, c.v) && g_.bruhat_leq(c.x, wit.x) && g_.bruhat_leq(c.y, wit.y)) return c;
    }
    return std::nullopt;
  }

  /// a'(w) = max of a(v) over M(w); exact when w itself lies in a finite parabolic.
  AValue a_prime(Element w) {
    if (auto it = acache_.find(w.id); it != acache_.end()) return it->second;
    AValue out;
    if (finite_mask(g_.support(w))) {
      out = af_.exact_in_parabolic(w);
    } else {
      int best = 0;
      for (Element v : maximal_values(w)) best = std::max(best, a_exact(v));
      out = AValue{best, AStatus::conjectural, zset(w).truncated ? "a_prime(truncated)" : "a_prime"};
    }
    return acache_.emplace(w.id, out).first->second;
  }

  /// Exact a where available, else a' (conjectural).
  AValue a_best(Element w) { return finite_mask(g_.support(w)) ? af_.exact_in_parabolic(w) : a_prime(w); }

  // D_f ---------------------------------------------------------------------

  bool in_d_f(Element v) {
    if (auto it = dfcache_.find(v.id); it != dfcache_.end()) return it->second;
    bool r = false;
    if (finite_mask(g_.support(v)) && g_.inverse(v) == v)
      r = g_.length(v) - a_exact(v) - 2 * delta_pi(kl_, v).delta == 0;
    dfcache_.emplace(v.id, r);
    return r;
  }

  /// Cell data of a finite standard parabolic, memoized.
  const FiniteCellData& finite_cells(DescentMask I) {
    auto it = fcd_cache_.find(I);
    if (it == fcd_cache_.end()) it = fcd_cache_.emplace(I, finite_cell_data(af_, I)).first;
    return it->second;
  }

  /// Distinguished involutions of the maximal finite parabolics, identity excluded;
  /// strict also drops the generators.
  std::vector<DInvRecord> d_f(bool strict) {
    std::vector<Element> elems;
    for (DescentMask I : max_finite_) {
      const auto& data = finite_cells(I);
      for (Element d : data.d_set) {
        if (g_.length(d) == 0 || (strict && g_.length(d) == 1)) continue;
        if (std::find(elems.begin(), elems.end(), d) == elems.end()) elems.push_back(d);
      }
    }
    g_.sort_shortlex(elems);
    std::vector<DInvRecord> out;
    for (Element d : elems) {
      DInvRecord r = evaluate_dinv(af_, d, {}, nullptr);
      r.provenance.kind = Provenance::Kind::finite_parabolic;
      out.push_back(r);
    }
    return out;
  }

  // Rigidity ----------------------------------------------------------------

  RigidityReport is_rigid(Element w, const FactorizationWitness& wit) {
    RigidityReport rep;
    rep.witness = wit;
    const ZSet& z = zset(w);
    rep.exhaustive = !z.truncated;
    rep.in_d_f = g_.length(wit.v) > 0 && in_d_f(wit.v);
    if (std::find(z.witnesses.begin(), z.witnesses.end(), wit) == z.witnesses.end()) {
      rep.reason = "not a length-additive factorization of w";
      return rep;
    }
    const bool d_f_only = scope_ == ChallengerScope::d_f;
    rep.dominating = dominator(z, wit, d_f_only);
    rep.maximal = !rep.dominating.has_value();
    const int av = rep.in_d_f ? a_exact(wit.v) : 0;
    const int lx = g_.length(wit.x), ly = g_.length(wit.y);
    for (const auto& c : z.witnesses) {
      if (g_.length(c.x) == lx && g_.length(c.y) == ly) continue;
      if (g_.length(c.v) == 0 && av > 0) continue;
      if (d_f_only && !in_d_f(c.v)) continue;
      if (a_exact(c.v) < av) continue;
      rep.violations.push_back(c);
    }
    std::stable_sort(rep.violations.begin(), rep.violations.end(),
                     [&](const auto& a, const auto& b) { return better_violation(a, b); });
    if (!rep.violations.empty()) rep.violation = rep.violations.front();
    if (!rep.in_d_f)
      rep.reason = "v is not in D_f";
    else if (!rep.maximal)
      rep.reason = "v is not maximal in w";
    else if (rep.violation)
      rep.reason = "flank lengths change at " + format_witness(*rep.violation);
    else if (!rep.exhaustive)
      rep.reason = "factorization scan truncated";
    rep.rigid = rep.in_d_f && rep.maximal && !rep.violation && rep.exhaustive;
    return rep;
  }

  /// Rigidity of w = x.v.y at v given by its three factors.
  RigidityReport is_rigid(Element x, Element v, Element y) {
    Element w = g_.multiply(g_.multiply(x, v), y);
    return is_rigid(w, FactorizationWitness{x, v, y, g_.support(v)});
  }

  std::string format_witness(const FactorizationWitness& f) const {
    return "(" + g_.format(f.x) + " | " + g_.format(f.v) + " | " + g_.format(f.y) + ")";
  }

  // Lower bounds for a ------------------------------------------------------

  /// max deg h_{x.v, v.y, z} over maximal witnesses (x, v, y) of z. Any such
  /// degree bounds a(z) from below; the scan stops once a'(z) is reached.
  AValue overlap_lower_bound(Element z) {
    if (auto it = olcache_.find(z.id); it != olcache_.end()) return it->second;
    auto wits = maximal_set(z);
    std::stable_sort(wits.begin(), wits.end(), [&](const auto& a, const auto& b) {
      int aa = a_exact(a.v), ab = a_exact(b.v);
      if (aa != ab) return aa > ab;
      return g_.length(a.v) > g_.length(b.v);
    });
    const int target = a_prime(z).value;
    int best = 0;
    std::set<std::pair<std::int32_t, std::int32_t>> tried;
    for (const auto& wit : wits) {
      if (best >= target) break;
      Element left = g_.multiply(wit.x, wit.v), right = g_.multiply(wit.v, wit.y);
      if (!tried.insert({left.id, right.id}).second) continue;
      if (auto d = af_.h_degree(left, right, z)) best = std::max(best, *d);
    }
    AValue out{best, AStatus::lower_bound, "overlap"};
    return olcache_.emplace(z.id, out).first->second;
  }

  /// Record for z with the engine's a-plumbing: exact where possible, else the
  /// best lower bound together with a'.
  DInvRecord evaluate(Element z, int ball_radius = 0) {
    DInvOptions opt;
    opt.ball_radius = ball_radius;
    opt.a_prime = [this](Element e) -> std::optional<AValue> { return a_prime(e); };
    opt.extra_lower_bound = [this](Element e) -> std::optional<AValue> { return overlap_lower_bound(e); };
    return evaluate_dinv(af_, z, opt, &data_bugs_);
  }

  const std::vector<std::string>& data_bugs() const { return data_bugs_; }

  // Generation --------------------------------------------------------------

  /// Hypotheses of the conjugation step v = x.v1.x^{-1} -> v' = s.v.s.
  Thm1Diagnostics thm1_check(Element x, Element v1, Generator s, std::optional<bool> v_in_d = std::nullopt) {
    Thm1Diagnostics d;
    Element v = g_.multiply(g_.multiply(x, v1), g_.inverse(x));
    Element vs = g_.right_mul(v, s);
    Element sx = g_.left_mul(s, x);
    Element vp = g_.left_mul(s, vs);
    d.reduced = g_.length(v) == 2 * g_.length(x) + g_.length(v1) && g_.length(vp) == g_.length(v) + 2;
    if (v_in_d) {
      d.v_in_d = *v_in_d;
    } else {
      d.v_in_d = is_member(evaluate(v).verdict);
    }
    d.a_v = a_best(v);
    d.a_vs = a_best(vs);
    d.a_equal = d.a_v.value == d.a_vs.value;
    d.descent_difference = (g_.left_descents(vs) & ~g_.right_descents(vs)) != 0;
    if (d.reduced) {
      d.rigidity = is_rigid(sx, v1, g_.inverse(sx));
      d.rigid = d.rigidity->rigid;
    }
    return d;
  }

  /// Breadth-first closure from the seeds (default: D_f without S and e).
  GenerationResult generate(int max_len, GenerationMode mode, std::vector<Element> seeds = {}) {
    if (seeds.empty())
      for (const auto& r : d_f(true)) seeds.push_back(r.element);
    GenerationResult out;
    struct State {
      Element x, v1;
      Word chain;
    };
    std::deque<State> queue;
    std::set<std::pair<std::int32_t, std::int32_t>> seen_states;
    std::unordered_set<std::int32_t> emitted;
    for (Element v1 : seeds) {
      emitted.insert(v1.id);
      queue.push_back({g_.identity(), v1, {}});
      seen_states.insert({g_.identity().id, v1.id});
    }
    while (!queue.empty()) {
      State st = queue.front();
      queue.pop_front();
      const int av1 = a_exact(st.v1);
      Element v = g_.multiply(g_.multiply(st.x, st.v1), g_.inverse(st.x));
      for (Generator s = 0; s < g_.rank(); ++s) {
        Element sx = g_.left_mul(s, st.x);
        if (g_.length(sx) < g_.length(st.x)) continue;
        Element sxv1 = g_.multiply(sx, st.v1);
        if (g_.length(sxv1) != g_.length(sx) + g_.length(st.v1)) continue;
        Element vp = g_.left_mul(s, g_.right_mul(v, s));
        Rejection rej{st.x, st.v1, s, "", std::nullopt};
        if (g_.length(vp) != g_.length(v) + 2) {
          rej.reason = "s.v.s is not length-additive";
          out.rejections.push_back(rej);
          continue;
        }
        RigidityReport rig = is_rigid(sxv1, FactorizationWitness{sx, st.v1, g_.identity(), g_.support(st.v1)});
        if (!rig.exhaustive) out.warnings.push_back("rigidity scan truncated at " + g_.format(sxv1));
        bool ok = rig.rigid;
        if (ok && mode == GenerationMode::thm1) {
          auto d = thm1_check(st.x, st.v1, s, true);
          if (!d.all()) {
            ok = false;
            rej.reason = !d.a_equal ? "a(vs) != a(v)" : !d.descent_difference ? "L(vs) \\ R(vs) is empty"
                                                                              : "s.v.s is not rigid at v1";
            rej.rigidity = d.rigidity;
          }
        } else if (!ok) {
          rej.reason = rig.reason;
          rej.rigidity = rig;
        }
        if (ok && a_prime(vp).value != av1) {
          ok = false;
          rej.reason = "a'(s.v.s) != a(v1)";
        }
        if (!ok) {
          out.rejections.push_back(rej);
          continue;
        }
        if (g_.length(vp) > max_len) {
          out.closed = false;
          continue;
        }
        Word chain = st.chain;
        chain.push_back(s);
        if (seen_states.insert({sx.id, st.v1.id}).second) queue.push_back({sx, st.v1, chain});
        if (!emitted.insert(vp.id).second) continue;
        DInvRecord rec = evaluate(vp);
        rec.provenance.kind = Provenance::Kind::generated;
        rec.provenance.base = st.v1;
        rec.provenance.chain = chain;
        out.records.push_back(rec);
      }
    }
    return out;
  }

 private:
  /// All (x, x^{-1} w) with x a prefix of w in the right weak order.
  std::vector<std::pair<Element, Element>> prefix_pairs(Element w) {
    std::vector<std::pair<Element, Element>> out{{w, g_.identity()}};
    std::unordered_set<std::int32_t> seen{w.id};
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto [x, r] = out[i];
      DescentMask d = g_.right_descents(x);
      for (Generator s = 0; s < g_.rank(); ++s) {
        if (!has_gen(d, s)) continue;
        Element xs = g_.right_mul(x, s);
        if (seen.insert(xs.id).second) out.push_back({xs, g_.left_mul(s, r)});
      }
    }
    return out;
  }

  bool better_violation(const FactorizationWitness& a, const FactorizationWitness& b) {
    // Smallest a(v') first, then shortest v', then shortlex.
    int aa = a_exact(a.v), ab = a_exact(b.v);
    if (aa != ab) return aa < ab;
    if (a.v != b.v) return g_.shortlex_less(a.v, b.v);
    return g_.shortlex_less(a.x, b.x);
  }

  AFunction& af_;
  KLTable& kl_;
  CoxeterGroup& g_;
  ChallengerScope scope_;
  std::size_t budget_;
  std::vector<DescentMask> max_finite_;
  std::unordered_map<DescentMask, bool> finite_cache_;
  std::unordered_map<std::int32_t, ZSet> zcache_;
  std::unordered_map<std::int32_t, std::vector<Element>> mcache_;
  std::unordered_map<std::int32_t, AValue> acache_;
  std::unordered_map<std::int32_t, bool> dfcache_;
  std::unordered_map<std::int32_t, AValue> olcache_;
  std::vector<std::string> data_bugs_;
  std::map<DescentMask, FiniteCellData> fcd_cache_;
};

}  // namespace coxcells
