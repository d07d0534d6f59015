// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "coxcells/equivalences.hpp"
#include "coxcells/group_file.hpp"
#include "coxcells/verification.hpp"

using namespace coxcells;

namespace {

struct Ctx {
  CoxeterGroup g;
  KLTable kl;
  AFunction af;
  ConjectureEngine eng;
  explicit Ctx(const std::string& name) : g(fixture(name)), kl(g), af(kl), eng(af) {}
  Generator gen(const char* label) { return g.system().parse_word(label)[0]; }
};

struct Check {
  bool ok = true;
  std::ostringstream log;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      log << " [failed: " << what << "]";
    }
  }
};

const std::vector<std::string> kFinite{"i2_2", "i2_3", "i2_4", "i2_6", "i2_7", "a3", "b3", "h3", "d4"};
const std::vector<std::string> kCrystallographic{"a2_affine", "a4_affine", "d4", "i2_2", "i2_3", "i2_4", "i2_6"};

// Ball radius used for infinite fixtures in the property sweep.
int sweep_radius(const std::string& name) {
  if (name == "a2_affine" || name == "triangle_237" || name == "star_t1t2s") return 8;
  return 6;
}

void criterion1(Check& c) {
  Ctx x("d4");
  Element v = x.g.parse("2 4 1 3 2 1 3 2 4 2 1");
  auto a = x.af.exact_in_group(v);
  auto dp = delta_pi(x.kl, v);
  auto r = x.eng.evaluate(v);
  const int l = x.g.length(v);
  c.log << "l=" << l << " a=" << a.value << " (" << to_string(a.status) << ") delta=" << dp.delta << " pi=" << dp.pi
        << " l-a-2delta=" << l - a.value - 2 * dp.delta << " verdict=" << to_string(r.verdict);
  c.require(x.g.size() >= 192 && x.g.enumerate_ball(100).size() == 192, "group order 192");
  c.require(l == 11, "l = 11");
  c.require(a.value == 7 && a.status == AStatus::exact, "a = 7 exact");
  c.require(dp.delta == 2 && dp.pi >= 1, "delta = 2, pi >= 1");
  c.require(l - a.value - 2 * dp.delta == 0, "11 - 7 - 4 = 0");
  c.require(r.verdict == Verdict::member_exact, "member_exact");
}

void criterion2(Check& c) {
  Ctx x("a2_affine");
  Ball ball = x.g.enumerate_ball(12);
  auto left = cell_partition(x.kl, ball, CellSide::left, 2);
  auto right = cell_partition(x.kl, ball, CellSide::right, 2);
  std::size_t nontrivial = 0;
  bool identity_block = false;
  for (auto b : left.certified_blocks()) {
    if (left.blocks[b].front() == x.g.identity()) identity_block = left.blocks[b].size() == 1;
    else ++nontrivial;
  }
  auto gen = x.eng.generate(12, GenerationMode::conj1);
  auto rec = reconstruct_cells(x.eng, ball, right, gen.records);
  // Left cells are inverses of right cells: compare the inverted reconstruction too.
  std::vector<int> inv_labels(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i)
    inv_labels[i] = rec.partition.block_of[ball.ordinal(x.g.inverse(ball.elements[i]))];
  auto inv = detail::partition_from_labels(ball, inv_labels, CellSide::left, 2, left.certified);
  auto cmp_left = compare_partitions(x.g, left, inv);
  c.log << "left: " << nontrivial << " certified non-trivial blocks + identity; reconstruction " << rec.edges.size()
        << " edges, right " << rec.comparison.agreeing_blocks << "/" << rec.comparison.certified_blocks
        << " blocks agree, left " << cmp_left.agreeing_blocks << "/" << cmp_left.certified_blocks;
  c.require(nontrivial == 9 && identity_block, "9 non-trivial certified left blocks plus {e}");
  c.require(rec.comparison.agrees(), "right reconstruction agrees");
  c.require(cmp_left.agreeing_blocks == cmp_left.certified_blocks && cmp_left.conflicts.empty() &&
                cmp_left.refinements.empty(),
            "left reconstruction agrees");
}

void criterion3(Check& c) {
  Ctx x("a2_affine");
  auto res = x.eng.generate(40, GenerationMode::conj1);
  std::set<std::string> words;
  for (const auto& r : res.records) words.insert(x.g.format(r.element));
  Element v1 = x.g.parse("1 2 1");
  std::set<Generator> refused;
  for (const auto& rj : res.rejections)
    if (rj.seed == v1 && rj.state_x == x.g.parse("3") && rj.rigidity && rj.rigidity->violation) refused.insert(rj.s);
  c.log << "D_f " << x.eng.d_f(false).size() << " + generated " << words.size() << (res.closed ? ", closed" : "")
        << "; refused after s3.s1s2s1.s3: " << refused.size();
  c.require(x.eng.d_f(false).size() == 6, "|D_f| = 6");
  c.require(words.size() == 3 && words.count(x.g.format(x.g.parse("3 1 2 1 3"))), "3 generated incl. s3s1s2s1s3");
  c.require(res.closed, "closure terminates");
  c.require(refused == std::set<Generator>{x.gen("1"), x.gen("2")}, "s2 and s1 extensions refused as non-rigid");
}

void criterion4(Check& c) {
  Ctx x("a4_affine");
  auto res = x.eng.generate(14, GenerationMode::conj1, {x.g.parse("4 0 4 2")});
  const Word chain{x.gen("1"), x.gen("3"), x.gen("2")};
  const char* expected[] = {"1 4 0 4 2 1", "3 1 4 0 4 2 1 3", "2 3 1 4 0 4 2 1 3 2"};
  for (std::size_t k = 0; k < 3; ++k) {
    Word prefix(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(k + 1));
    auto it = std::find_if(res.records.begin(), res.records.end(),
                           [&](const DInvRecord& r) { return r.provenance.chain == prefix; });
    bool found = it != res.records.end() && it->element == x.g.parse(expected[k]);
    c.require(found, std::string("accepts ") + expected[k]);
    if (found) {
      auto dp = delta_pi(x.kl, it->element);
      c.require(dp.delta == it->delta && it->length - x.eng.a_prime(it->element).value - 2 * dp.delta == 0,
                std::string("delta exact for ") + expected[k]);
    }
  }
  bool refused = false;
  for (const auto& rj : res.rejections)
    if (rj.state_x == x.g.parse("2 3 1") && rj.s == x.gen("0") && rj.rigidity && rj.rigidity->violation &&
        rj.rigidity->violation->v == x.g.parse("3 0 1 0"))
      refused = true;
  c.require(refused, "s0 extension refused with v' = s3s0s1s0");
  Element z = x.g.parse("0 2 3 1 4 0 4 2 1 3 2 0");
  auto r = x.eng.evaluate(z, 14);
  c.log << "chain s1,s3,s2 accepted; s0 refused (v' = " << x.g.format(x.g.parse("3 0 1 0")) << "); rejected z: l="
        << r.length << " a>=" << r.a.value << " a'=" << (r.a_prime ? r.a_prime->value : -1) << " delta=" << r.delta
        << " verdict=" << to_string(r.verdict);
  c.require(r.delta == delta_pi(x.kl, z).delta, "delta exact for the rejected element");
  c.require(!is_member(r.verdict), "rejected element is not a member");
}

void criterion5(Check& c) {
  Ctx x("p5");
  const auto& sys = x.g.system();
  auto inf = [&](Generator a, Generator b) { return sys.m(a, b) == kInfinity; };
  std::set<std::string> expect;
  std::function<void(Word, Generator, Generator)> extend = [&](Word ts, Generator si, Generator sj) {
    if (!ts.empty()) {
      Word w = ts;
      w.push_back(si);
      w.push_back(sj);
      w.insert(w.end(), ts.rbegin(), ts.rend());
      expect.insert(x.g.format(x.g.element(w)));
    }
    if (2 * static_cast<int>(ts.size()) + 4 > 9) return;
    for (Generator t = 0; t < x.g.rank(); ++t)
      if (ts.empty() ? inf(t, si) && inf(t, sj) : inf(t, ts.front())) {
        Word next{t};
        next.insert(next.end(), ts.begin(), ts.end());
        extend(next, si, sj);
      }
  };
  for (const auto& r : x.eng.d_f(true)) {
    Word p = x.g.word(r.element);
    extend({}, p[0], p[1]);
  }
  auto gen = x.eng.generate(9, GenerationMode::conj1);
  std::set<std::string> got;
  for (const auto& r : gen.records) got.insert(x.g.format(r.element));
  Ball ball = x.g.enumerate_ball(10);
  auto ref = cell_partition(x.kl, ball, CellSide::right, 2);
  auto rec = reconstruct_cells(x.eng, ball, ref, x.eng.generate(10, GenerationMode::conj1).records);
  c.log << "generated " << got.size() << " vs closed form " << expect.size() << "; reconstruction "
        << rec.edges.size() << " edges, " << rec.comparison.agreeing_blocks << "/" << rec.comparison.certified_blocks
        << " blocks agree";
  c.require(got == expect, "generated D matches the closed form up to length 9");
  c.require(rec.comparison.agrees(), "reconstruction agrees at radius 10");
}

void criterion6(Check& c) {
  Ctx x("triangle_237");
  auto res = x.eng.generate(80, GenerationMode::thm1);
  int longest = 0;
  for (const auto& r : res.records) longest = std::max(longest, r.length);
  c.log << "(2,3,7): " << res.records.size() << " generated, longest " << longest
        << (res.closed ? ", closed below 80" : ", cut at 80");
  c.require(res.closed, "closure is finite");

  // Star group: the generated set keeps growing through length 20.
  Ctx star("star_t1t2s");
  auto sg = star.eng.generate(20, GenerationMode::conj1);
  std::map<int, int> by_len;
  for (const auto& r : sg.records) ++by_len[r.length];
  std::vector<int> totals;
  int total = 0;
  for (int len = 0; len <= 20; ++len)
    if (by_len.count(len)) totals.push_back(total += by_len[len]);
  bool strict = totals.size() >= 6 && std::adjacent_find(totals.begin(), totals.end(), std::greater_equal<>()) == totals.end();
  c.log << "; star group cumulative counts:";
  for (int t : totals) c.log << " " << t;
  c.require(strict && !sg.closed, "strict growth through length 20");
}

void criterion7(Check& c) {
  std::size_t polys = 0, h = 0, involutions = 0, cells = 0;
  std::vector<std::string> bad;
  auto note = [&](const std::string& what) {
    if (bad.size() < 5) bad.push_back(what);
  };
  auto is_fin = [](const std::string& n) { return std::find(kFinite.begin(), kFinite.end(), n) != kFinite.end(); };
  auto is_cryst = [](const std::string& n) {
    return std::find(kCrystallographic.begin(), kCrystallographic.end(), n) != kCrystallographic.end();
  };
  std::vector<std::string> all = kFinite;
  for (const char* n : {"a2_affine", "a4_affine", "p5", "p6", "triangle_237", "star_t1t2s"}) all.push_back(n);
  for (const auto& name : all) {
    Ctx x(name);
    const bool fin = is_fin(name);
    const int R = fin ? 100 : sweep_radius(name);
    Ball ball = x.g.enumerate_ball(R);
    for (Element w : ball.elements) {
      if (x.kl.kl_poly(w, w) != LaurentPoly::one()) note(name + ": P_{w,w} != 1");
      for (Element y : x.kl.lower_interval(w)) {
        auto p = x.kl.kl_poly(y, w);
        auto qc = p.as_q_polynomial();
        ++polys;
        if (qc.empty() || qc[0] != 1) note(name + ": constant term of P(" + x.g.format(y) + "," + x.g.format(w) + ")");
        if (y != w && 2 * (static_cast<int>(qc.size()) - 1) > x.g.length(w) - x.g.length(y) - 1)
          note(name + ": degree bound at P(" + x.g.format(y) + "," + x.g.format(w) + ")");
        if (is_cryst(name) && !p.all_coeffs_nonnegative()) note(name + ": negative coefficient in P");
      }
    }
    if (is_cryst(name)) {
      VerifyOptions opt;
      opt.radius = fin ? 2 * x.g.length(ball.elements.back()) : R;
      opt.conj3 = opt.d_agreement = false;
      auto rep = verify_suite(x.eng, opt);
      h += rep.h_polys_scanned;
      if (!rep.positivity_ok()) note(name + ": " + rep.negative_coefficients.front());
    }
    if (!fin) continue;
    for (Element z : ball.elements) {
      auto a = x.af.exact_in_group(z);
      if (x.eng.a_prime(z).value != a.value) note(name + ": a' != a at " + x.g.format(z));
      if (x.g.inverse(z) != z) continue;
      ++involutions;
      if (x.g.length(z) - a.value - 2 * delta_pi(x.kl, z).delta < 0) note(name + ": l - a - 2delta < 0");
    }
    for (CellSide side : {CellSide::left, CellSide::right}) {
      auto part = cell_partition(x.kl, ball, side, 0);
      for (const auto& blk : part.blocks) {
        ++cells;
        int members = 0;
        for (Element z : blk)
          if (x.g.inverse(z) == z) {
            auto a = x.af.exact_in_group(z);
            members += x.g.length(z) - a.value - 2 * delta_pi(x.kl, z).delta == 0;
          }
        if (members != 1) note(name + ": cell of " + x.g.format(blk.front()) + " has " + std::to_string(members));
      }
    }
  }
  c.log << all.size() << " fixtures, " << polys << " P, " << h << " h, " << involutions << " finite involutions, "
        << cells << " finite one-sided cells";
  for (const auto& b : bad) c.require(false, b);
}

void criterion8(Check& c) {
  struct Job {
    std::string name;
    int radius;
  };
  std::vector<Job> jobs{{"a2_affine", 12}, {"p5", 10}};
  for (const auto& n : kFinite) jobs.push_back({n, 100});
  std::size_t edges = 0;
  for (const auto& j : jobs) {
    Ctx x(j.name);
    Ball ball = x.g.enumerate_ball(j.radius);
    auto ref = cell_partition(x.kl, ball, CellSide::right, 2);
    auto rec = reconstruct_cells(x.eng, ball, ref, x.eng.generate(j.radius, GenerationMode::conj1).records);
    edges += rec.edges.size();
    std::size_t split = 0;
    for (const auto& e : rec.edges) split += !ref.same_block(e.from, e.to);
    c.require(split == 0 && rec.comparison.conflicts.empty(), j.name + ": " + std::to_string(split) + " conflicts");
  }
  c.log << edges << " edges over " << jobs.size() << " groups";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"D4 exact distinguished involution", criterion1},
      {"affine A2 cells at radius 12", criterion2},
      {"affine A2 distinguished involutions", criterion3},
      {"affine A4 chain and rejection", criterion4},
      {"pentagon D and cells", criterion5},
      {"(2,3,7) finite closure", criterion6},
      {"property suite", criterion7},
      {"edge oracle equivalence", criterion8},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.log << " [exception: " << e.what() << "]";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !c.ok;
    std::cout << (c.ok ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first << ": " << c.log.str() << " ("
              << std::fixed << std::setprecision(1) << secs << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
