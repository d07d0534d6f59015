#pragma once

// Aggregate checks over a ball: a versus a', positivity of P and h, and
// agreement of the brute-force distinguished involutions with D_f plus the
// generated set.

#include <json.hpp>

#include "coxcells/conjectures.hpp"

namespace coxcells {

struct VerifyOptions {
  int radius = 8;
  int margin = 2;
  bool conj3 = true;
  bool positivity = true;
  bool d_agreement = true;
  GenerationMode mode = GenerationMode::conj1;
};

struct AMismatch {
  Element element;
  int ball_bound = 0;
  AValue a_prime;
};

struct VerifyReport {
  int radius = 0;
  // a versus a'
  std::size_t conj3_checked = 0, conj3_tight = 0;
  std::vector<AMismatch> conj3_violations;  // ball lower bound above a', or exact a != a'
  // positivity
  std::size_t kl_polys_scanned = 0, h_polys_scanned = 0;
  std::vector<std::string> negative_coefficients;
  // distinguished involutions
  int certified_length = 0;
  std::vector<Element> d_bruteforce, d_predicted, d_undetermined;
  std::vector<Element> only_bruteforce, only_predicted;
  std::vector<std::string> data_bugs;

  bool conj3_ok() const { return conj3_violations.empty(); }
  bool positivity_ok() const { return negative_coefficients.empty(); }
  bool d_ok() const { return only_bruteforce.empty() && only_predicted.empty(); }
  bool ok() const { return conj3_ok() && positivity_ok() && d_ok() && data_bugs.empty(); }
};

inline VerifyReport verify_suite(ConjectureEngine& eng, const VerifyOptions& opt) {
  KLTable& kl = eng.kl();
  CoxeterGroup& g = eng.group();
  AFunction& af = eng.a_function();
  VerifyReport rep;
  rep.radius = opt.radius;
  Ball ball = g.enumerate_ball(opt.radius);
  const bool finite_group = eng.finite_mask(full_mask(g.rank()));

  if (opt.conj3) {
    for (Element z : ball.elements) {
      AValue ap = eng.a_prime(z);
      int bound = finite_group ? af.exact_in_group(z).value : af.ball_lower_bound(z, opt.radius).value;
      ++rep.conj3_checked;
      if (bound == ap.value) ++rep.conj3_tight;
      if (finite_group ? bound != ap.value : bound > ap.value) rep.conj3_violations.push_back({z, bound, ap});
    }
  }

  if (opt.positivity) {
    for (Element w : ball.elements)
      for (Element y : kl.lower_interval(w)) {
        auto p = kl.kl_poly(y, w);
        ++rep.kl_polys_scanned;
        if (!p.all_coeffs_nonnegative())
          rep.negative_coefficients.push_back("P(" + g.format(y) + ", " + g.format(w) + ") = " + p.to_q_string());
      }
    for (Element y : ball.elements) {
      if (g.length(y) > opt.radius) break;
      CprimeRightProducts prods(kl, y);
      for (Element x : ball.elements) {
        if (g.length(x) + g.length(y) > opt.radius) break;
        for (const auto& [z, c] : prods.product(x).coeffs) {
          ++rep.h_polys_scanned;
          if (!c.all_coeffs_nonnegative())
            rep.negative_coefficients.push_back("h(" + g.format(x) + ", " + g.format(y) + ", " + g.format(z) +
                                                ") = " + c.to_string());
        }
      }
    }
  }

  if (opt.d_agreement) {
    rep.certified_length = finite_group ? opt.radius : opt.radius - opt.margin - 1;
    std::vector<Element> predicted{g.identity()};
    for (const auto& r : eng.d_f(false)) predicted.push_back(r.element);
    auto gen = eng.generate(rep.certified_length, opt.mode);
    for (const auto& r : gen.records) predicted.push_back(r.element);
    for (Element d : predicted)
      if (g.length(d) <= rep.certified_length) rep.d_predicted.push_back(d);
    g.sort_shortlex(rep.d_predicted);
    rep.d_predicted.erase(std::unique(rep.d_predicted.begin(), rep.d_predicted.end()), rep.d_predicted.end());

    for (Element z : ball.elements) {
      if (g.length(z) > rep.certified_length || g.inverse(z) != z) continue;
      auto r = eng.evaluate(z, finite_group ? 0 : opt.radius);
      if (is_member(r.verdict)) rep.d_bruteforce.push_back(z);
      if (r.verdict == Verdict::undetermined) rep.d_undetermined.push_back(z);
    }
    for (const auto& b : eng.data_bugs()) rep.data_bugs.push_back(b);
    std::set_difference(rep.d_bruteforce.begin(), rep.d_bruteforce.end(), rep.d_predicted.begin(),
                        rep.d_predicted.end(), std::back_inserter(rep.only_bruteforce),
                        [&](Element a, Element b) { return g.shortlex_less(a, b); });
    std::set_difference(rep.d_predicted.begin(), rep.d_predicted.end(), rep.d_bruteforce.begin(),
                        rep.d_bruteforce.end(), std::back_inserter(rep.only_predicted),
                        [&](Element a, Element b) { return g.shortlex_less(a, b); });
  }
  return rep;
}

inline nlohmann::json to_json(const CoxeterGroup& g, const VerifyReport& r) {
  nlohmann::json j;
  j["radius"] = r.radius;
  j["ok"] = r.ok();
  auto& c3 = j["conj3"];
  c3["checked"] = r.conj3_checked;
  c3["tight"] = r.conj3_tight;
  c3["violations"] = nlohmann::json::array();
  for (const auto& m : r.conj3_violations)
    c3["violations"].push_back({{"word", g.format(m.element)}, {"bound", m.ball_bound}, {"a_prime", to_json(g, m.a_prime)}});
  auto& pos = j["positivity"];
  pos["kl_polys"] = r.kl_polys_scanned;
  pos["h_polys"] = r.h_polys_scanned;
  pos["negative"] = r.negative_coefficients;
  auto& d = j["distinguished_involutions"];
  d["certified_length"] = r.certified_length;
  d["bruteforce"] = words_json(g, r.d_bruteforce);
  d["predicted"] = words_json(g, r.d_predicted);
  d["undetermined"] = words_json(g, r.d_undetermined);
  d["only_bruteforce"] = words_json(g, r.only_bruteforce);
  d["only_predicted"] = words_json(g, r.only_predicted);
  j["data_bugs"] = r.data_bugs;
  return j;
}

}  // namespace coxcells
