#pragma once

// Memoized Kazhdan-Lusztig polynomials P_{y,w} and mu(y,w).
//
// Polynomials are stored as LaurentPoly in v = q^{1/2}, so q^k sits at
// exponent 2k. The recursion peels the last letter s of the normal form of w
// (ws < w) and first moves y up to an element with L(y) >= L(w) and
// R(y) >= R(w), where P_{y,w} is unchanged:
//
//   P_{y,w} = P_{ys,ws} + q P_{y,ws}
//             - sum_{y <= z < ws, zs < z} mu(z,ws) q^{(l(w)-l(z))/2} P_{y,z}
//
// The persistent cache file is text:
//   COXCELLS-KL v1
//   fingerprint <hex>
//   records <n>
//   <y word>;<w word>;<q-coefficients>     (one per line, canonical order)

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "coxcells/coxeter_group.hpp"
#include "coxcells/laurent_poly.hpp"

namespace coxcells {

struct MuEntry {
  Element z;
  std::int64_t mu;
};

struct KLStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t size = 0;
};

class KLTable {
 public:
  explicit KLTable(CoxeterGroup& g) : g_(g) {}

  CoxeterGroup& group() { return g_; }
  const CoxeterSystem& system() const { return g_.system(); }

  KLStats stats() const { return {hits_, misses_, memo_.size()}; }

  /// P_{y,w}; zero unless y <= w in Bruhat order.
  LaurentPoly kl_poly(Element y, Element w) {
    if (g_.length(y) > g_.length(w) || !g_.bruhat_leq(y, w)) return {};
    return kl_poly_leq(y, w);
  }

  /// Coefficient of q^{(l(w)-l(y)-1)/2} in P_{y,w} for y < w; 0 otherwise.
  std::int64_t mu(Element y, Element w) {
    int gap = g_.length(w) - g_.length(y);
    if (gap <= 0 || gap % 2 == 0) return 0;
    if (!g_.bruhat_leq(y, w)) return 0;
    if (gap == 1) return 1;
    return kl_poly_leq(y, w).coeff(gap - 1);
  }

  /// mu(y,w) + mu(w,y): nonzero exactly when y and w are joined by a mu-edge.
  std::int64_t mu_sym(Element a, Element b) {
    return g_.length(a) < g_.length(b) ? mu(a, b) : mu(b, a);
  }

  /// All z < w with mu(z,w) != 0, sorted by (length, id).
  const std::vector<MuEntry>& mu_list(Element w) {
    if (auto it = mu_lists_.find(w.id); it != mu_lists_.end()) return it->second;
    std::vector<MuEntry> out;
    const int lw = g_.length(w);
    const DescentMask lw_desc = g_.left_descents(w), rw_desc = g_.right_descents(w);
    for (Element z : lower_interval(w)) {
      int gap = lw - g_.length(z);
      if (gap % 2 == 0) continue;
      if (gap == 1) {
        out.push_back({z, 1});
        continue;
      }
      // mu(z,w) != 0 with s in L(w) \ L(z) forces z = sw (gap 1); same on the right.
      if ((g_.right_descents(z) & rw_desc) != rw_desc) continue;
      if ((g_.left_descents(z) & lw_desc) != lw_desc) continue;
      std::int64_t m = kl_poly_leq(z, w).coeff(gap - 1);
      if (m != 0) out.push_back({z, m});
    }
    std::sort(out.begin(), out.end(), [this](const MuEntry& a, const MuEntry& b) {
      int la = g_.length(a.z), lb = g_.length(b.z);
      return la != lb ? la < lb : a.z.id < b.z.id;
    });
    return mu_lists_.emplace(w.id, std::move(out)).first->second;
  }

  /// The Bruhat interval [e, w].
  std::vector<Element> lower_interval(Element w) {
    std::vector<Element> cur{g_.identity()};
    std::unordered_set<std::int32_t> seen{g_.identity().id};
    for (Generator s : g_.word(w)) {
      std::size_t n = cur.size();
      for (std::size_t i = 0; i < n; ++i) {
        Element x = g_.right_mul(cur[i], s);
        if (seen.insert(x.id).second) cur.push_back(x);
      }
    }
    return cur;
  }

  void clear() {
    memo_.clear();
    mu_lists_.clear();
    hits_ = misses_ = 0;
  }

  // Persistence.

  void save(const std::filesystem::path& path) const {
    struct Rec {
      Word y, w;
      const LaurentPoly* p;
    };
    std::vector<Rec> recs;
    recs.reserve(memo_.size());
    for (const auto& [key, p] : memo_) {
      Element y{static_cast<std::int32_t>(key >> 32)}, w{static_cast<std::int32_t>(key & 0xffffffffu)};
      recs.push_back({g_.word(y), g_.word(w), &p});
    }
    auto sl = [](const Word& a, const Word& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; };
    std::sort(recs.begin(), recs.end(), [&](const Rec& a, const Rec& b) {
      if (a.w != b.w) return sl(a.w, b.w);
      return sl(a.y, b.y);
    });
    std::ofstream out(path);
    if (!out) throw InputError("cannot write KL cache " + path.string());
    out << kHeader << "\nfingerprint " << system().fingerprint() << "\nrecords " << recs.size() << "\n";
    for (const auto& r : recs) {
      out << system().format_word(r.y) << ";" << system().format_word(r.w) << ";";
      auto qc = r.p->as_q_polynomial();
      for (std::size_t i = 0; i < qc.size(); ++i) out << (i ? " " : "") << qc[i];
      out << "\n";
    }
  }

  /// Merge a saved cache into the memo; returns the number of records read.
  std::size_t load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open KL cache " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw InputError("KL cache: bad or missing version header");
    if (!std::getline(in, line) || line != "fingerprint " + system().fingerprint())
      throw InputError("KL cache: group fingerprint mismatch");
    std::size_t n = 0;
    if (!std::getline(in, line) || line.rfind("records ", 0) != 0) throw InputError("KL cache: missing record count");
    try {
      n = std::stoull(line.substr(8));
    } catch (const std::exception&) {
      throw InputError("KL cache: bad record count");
    }
    std::unordered_map<std::uint64_t, LaurentPoly> incoming;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw InputError("KL cache: truncated");
      auto a = line.find(';'), b = line.find(';', a + 1);
      if (a == std::string::npos || b == std::string::npos) throw InputError("KL cache: malformed record");
      Element y = g_.parse(line.substr(0, a)), w = g_.parse(line.substr(a + 1, b - a - 1));
      std::vector<std::int64_t> qc;
      std::istringstream cs(line.substr(b + 1));
      std::int64_t c;
      while (cs >> c) qc.push_back(c);
      incoming.emplace(key(y, w), LaurentPoly::from_q_coeffs(qc));
    }
    for (auto& [k, p] : incoming) memo_.insert_or_assign(k, std::move(p));
    return n;
  }

  static constexpr const char* kHeader = "COXCELLS-KL v1";

 private:
  static std::uint64_t key(Element y, Element w) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(y.id)) << 32) |
           static_cast<std::uint32_t>(w.id);
  }

  // Requires y <= w.
  LaurentPoly kl_poly_leq(Element y, Element w) {
    const int lw = g_.length(w);
    while (true) {
      if (lw - g_.length(y) <= 2) return LaurentPoly::one();
      if (DescentMask d = g_.right_descents(w) & ~g_.right_descents(y)) {
        y = g_.right_mul(y, std::countr_zero(d));
        continue;
      }
      if (DescentMask d = g_.left_descents(w) & ~g_.left_descents(y)) {
        y = g_.left_mul(std::countr_zero(d), y);
        continue;
      }
      break;
    }
    const std::uint64_t k = key(y, w);
    if (auto it = memo_.find(k); it != memo_.end()) {
      ++hits_;
      return it->second;
    }
    ++misses_;
    const Generator s = g_.word(w).back();
    const Element ws = g_.right_mul(w, s);
    const Element ys = g_.right_mul(y, s);  // s is a right descent of y here
    LaurentPoly p = kl_poly_leq(ys, ws);
    if (g_.bruhat_leq(y, ws)) p += kl_poly_leq(y, ws).shifted(2);
    const int ly = g_.length(y);
    // Copy: mu_list may rehash while the recursion below fills other lists.
    const std::vector<MuEntry> partners = mu_list(ws);
    for (const auto& [z, m] : partners) {
      if (g_.length(z) < ly) continue;
      if (!has_gen(g_.right_descents(z), s)) continue;
      if (!g_.bruhat_leq(y, z)) continue;
      p.add_scaled(kl_poly_leq(y, z), -m, lw - g_.length(z));
    }
    memo_.emplace(k, p);
    return p;
  }

  CoxeterGroup& g_;
  std::unordered_map<std::uint64_t, LaurentPoly> memo_;
  std::unordered_map<std::int32_t, std::vector<MuEntry>> mu_lists_;
  std::size_t hits_ = 0, misses_ = 0;
};

}  // namespace coxcells
