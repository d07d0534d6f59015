#pragma once

// Lazily grown element store for a Coxeter group.
//
// Every element that has been touched gets a dense id (`Element`). An element
// is stored as (prefix, last letter) where prefix * last is its ShortLex
// normal form, so ids compare equal exactly when normal forms do. Right
// descent sets and right multiplication links are memoized per element.
//
// New elements are discovered one letter at a time. For v = w*s with s not a
// right descent of w, a generator t != s is a right descent of v exactly when
// v = u * x with x the longest element of the rank-2 parabolic <s,t>, i.e.
// when m(s,t) letters s, t, s, ... can be stripped from the right of v one
// descent at a time. That test only touches strictly shorter elements, so the
// whole construction is a well-founded recursion on length.
//
// The store is not thread-safe; share one instance per thread.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "coxcells/coxeter_system.hpp"

namespace coxcells {

struct Element {
  std::int32_t id = 0;
  friend auto operator<=>(const Element&, const Element&) = default;
};

using DescentMask = std::uint32_t;

inline bool has_gen(DescentMask m, Generator s) { return (m >> s) & 1u; }
inline DescentMask gen_bit(Generator s) { return DescentMask{1} << s; }
inline int mask_size(DescentMask m) { return std::popcount(m); }
inline DescentMask full_mask(int rank) { return rank >= 32 ? ~DescentMask{0} : (DescentMask{1} << rank) - 1; }

inline std::vector<Generator> mask_to_list(DescentMask m) {
  std::vector<Generator> out;
  for (Generator s = 0; m; ++s, m >>= 1)
    if (m & 1u) out.push_back(s);
  return out;
}

inline DescentMask list_to_mask(const std::vector<Generator>& gens) {
  DescentMask m = 0;
  for (auto s : gens) m |= gen_bit(s);
  return m;
}

enum class Side { left, right };

struct ReducedWords {
  std::vector<Word> words;  // sorted lexicographically
  bool truncated = false;
};

/// All elements of length <= radius, sorted by (length, ShortLex).
struct Ball {
  int radius = 0;
  std::vector<Element> elements;
  std::unordered_map<std::int32_t, std::size_t> index;

  bool contains(Element w) const { return index.count(w.id) != 0; }
  std::size_t ordinal(Element w) const { return index.at(w.id); }
  std::size_t size() const { return elements.size(); }
};

class CoxeterGroup {
 public:
  static constexpr std::size_t kDefaultElementBudget = 20'000'000;

  explicit CoxeterGroup(CoxeterSystem sys, std::size_t element_budget = kDefaultElementBudget)
      : sys_(std::move(sys)), rank_(sys_.rank()), budget_(element_budget) {
    if (rank_ > 32) throw InputError("rank above 32 is not supported");
    nodes_.push_back(Node{0, 0, -1, -1, 0});
    links_.assign(static_cast<std::size_t>(rank_), -1);
  }

  CoxeterGroup(const CoxeterGroup&) = delete;
  CoxeterGroup& operator=(const CoxeterGroup&) = delete;

  const CoxeterSystem& system() const { return sys_; }
  int rank() const { return rank_; }
  std::size_t size() const { return nodes_.size(); }

  Element identity() const { return Element{0}; }
  Element generator(Generator s) {
    sys_.check_letter(s);
    return right_mul(identity(), s);
  }

  int length(Element w) const { return nodes_[w.id].length; }

  DescentMask right_descents(Element w) const { return nodes_[w.id].rdesc; }
  DescentMask left_descents(Element w) { return right_descents(inverse(w)); }
  DescentMask descents(Element w, Side side) {
    return side == Side::right ? right_descents(w) : left_descents(w);
  }

  /// w * s.
  Element right_mul(Element w, Generator s) {
    std::int32_t cached = link(w.id, s);
    if (cached >= 0) return Element{cached};
    Element r = has_gen(nodes_[w.id].rdesc, s) ? descend(w, s) : ascend(w, s);
    set_link(w.id, s, r.id);
    set_link(r.id, s, w.id);
    return r;
  }

  /// s * w.
  Element left_mul(Generator s, Element w) { return inverse(right_mul(inverse(w), s)); }

  Element multiply(Element x, Element y) {
    Element r = x;
    for (Generator s : word(y)) r = right_mul(r, s);
    return r;
  }

  /// Product x*y with the letters of y applied on the right.
  Element multiply(Element x, const Word& y) {
    Element r = x;
    for (Generator s : y) r = right_mul(r, s);
    return r;
  }

  bool length_additive(Element x, Element y) {
    return length(multiply(x, y)) == length(x) + length(y);
  }

  Element inverse(Element w) {
    std::int32_t& cached = nodes_[w.id].inverse;
    if (cached >= 0) return Element{cached};
    Word letters = word(w);
    Element r = identity();
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) r = right_mul(r, *it);
    nodes_[w.id].inverse = r.id;
    nodes_[r.id].inverse = w.id;
    return r;
  }

  /// ShortLex-minimal reduced word.
  Word word(Element w) const {
    Word out(static_cast<std::size_t>(nodes_[w.id].length));
    std::int32_t cur = w.id;
    for (std::size_t i = out.size(); i-- > 0;) {
      out[i] = nodes_[cur].last;
      cur = nodes_[cur].prefix;
    }
    return out;
  }

  std::string format(Element w) const { return sys_.format_word(word(w)); }

  Element element(const Word& letters) {
    for (Generator s : letters) sys_.check_letter(s);
    return multiply(identity(), letters);
  }
  Element parse(std::string_view text) { return element(sys_.parse_word(text)); }

  Word normal_form(const Word& letters) { return word(element(letters)); }

  int word_length(const Word& letters) { return length(element(letters)); }

  /// (length, lexicographic) order on normal forms.
  bool shortlex_less(Element a, Element b) const {
    if (a == b) return false;
    int la = length(a), lb = length(b);
    if (la != lb) return la < lb;
    return word(a) < word(b);
  }

  void sort_shortlex(std::vector<Element>& v) const {
    std::vector<std::pair<Word, Element>> keyed;
    keyed.reserve(v.size());
    for (auto e : v) keyed.emplace_back(word(e), e);
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
      if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
      return a.first < b.first;
    });
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = keyed[i].second;
  }

  /// Bruhat order via the lifting property along the normal form of w.
  bool bruhat_leq(Element y, Element w) {
    while (true) {
      int ly = length(y), lw = length(w);
      if (ly > lw) return false;
      if (ly == lw) return y == w;
      if (ly == 0) return true;
      Generator s = nodes_[w.id].last;
      if (has_gen(right_descents(y), s)) y = right_mul(y, s);
      w = right_mul(w, s);
    }
  }

  /// Split w = x . v with v in W_I and x minimal in its coset x W_I.
  std::pair<Element, Element> right_parabolic_split(Element w, DescentMask subset) {
    Element x = w;
    Word v_rev;
    while (DescentMask d = right_descents(x) & subset) {
      Generator s = std::countr_zero(d);
      v_rev.push_back(s);
      x = right_mul(x, s);
    }
    Element v = identity();
    for (auto it = v_rev.rbegin(); it != v_rev.rend(); ++it) v = right_mul(v, *it);
    return {x, v};
  }

  /// Split w = v . y with v in W_I and y minimal in its coset W_I y.
  std::pair<Element, Element> left_parabolic_split(Element w, DescentMask subset) {
    auto [x, v] = right_parabolic_split(inverse(w), subset);
    return {inverse(v), inverse(x)};
  }

  /// Generators occurring in the normal form (the support; independent of the reduced word).
  DescentMask support(Element w) const {
    DescentMask m = 0;
    for (Generator s : word(w)) m |= gen_bit(s);
    return m;
  }

  /// Closure of the normal form under braid moves.
  ReducedWords reduced_words(Element w, std::size_t limit = 1'000'000) {
    ReducedWords out;
    std::set<Word> seen;
    std::queue<Word> todo;
    Word start = word(w);
    seen.insert(start);
    todo.push(start);
    while (!todo.empty()) {
      Word cur = std::move(todo.front());
      todo.pop();
      for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
        Generator a = cur[i], b = cur[i + 1];
        if (a == b) continue;
        int m = sys_.m(a, b);
        if (m == kInfinity || i + m > cur.size()) continue;
        bool alt = true;
        for (int k = 0; k < m && alt; ++k) alt = cur[i + k] == (k % 2 == 0 ? a : b);
        if (!alt) continue;
        Word next = cur;
        for (int k = 0; k < m; ++k) next[i + k] = (k % 2 == 0 ? b : a);
        if (seen.insert(next).second) {
          if (seen.size() > limit) {
            out.truncated = true;
            break;
          }
          todo.push(std::move(next));
        }
      }
      if (out.truncated) break;
    }
    out.words.assign(seen.begin(), seen.end());
    if (out.words.size() > limit) out.words.resize(limit);
    return out;
  }

  Ball enumerate_ball(int radius) {
    if (radius < 0) throw InputError("ball radius must be nonnegative");
    Ball ball;
    ball.radius = radius;
    std::vector<Element> level{identity()};
    std::vector<Element> all{identity()};
    for (int l = 0; l < radius; ++l) {
      std::unordered_set<std::int32_t> next_ids;
      std::vector<Element> next;
      for (Element w : level) {
        DescentMask rd = right_descents(w);
        for (Generator s = 0; s < rank_; ++s) {
          if (has_gen(rd, s)) continue;
          Element v = right_mul(w, s);
          if (next_ids.insert(v.id).second) next.push_back(v);
        }
      }
      if (next.empty()) break;
      all.insert(all.end(), next.begin(), next.end());
      level = std::move(next);
    }
    sort_shortlex(all);
    ball.elements = std::move(all);
    for (std::size_t i = 0; i < ball.elements.size(); ++i) ball.index.emplace(ball.elements[i].id, i);
    return ball;
  }

 private:
  struct Node {
    std::int32_t length;
    DescentMask rdesc;
    std::int32_t prefix;  // normal form of this element minus its last letter
    std::int32_t inverse;
    Generator last;
  };

  std::int32_t link(std::int32_t id, Generator s) const {
    return links_[static_cast<std::size_t>(id) * rank_ + s];
  }
  void set_link(std::int32_t id, Generator s, std::int32_t to) {
    links_[static_cast<std::size_t>(id) * rank_ + s] = to;
  }

  Element ascend_word(Element u, const Word& letters) {
    for (Generator a : letters) u = right_mul(u, a);
    return u;
  }

  /// Alternating word in {a, b} of length n whose last letter is `last`.
  static Word alternating_ending(Generator a, Generator b, int n, Generator last) {
    Word w(static_cast<std::size_t>(n));
    Generator other = last == a ? b : a;
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(n - 1 - i)] = (i % 2 == 0 ? last : other);
    return w;
  }

  /// w*s where s is a right descent of w.
  Element descend(Element w, Generator s) {
    Generator t = nodes_[w.id].last;
    if (t == s) return Element{nodes_[w.id].prefix};
    int m = sys_.m(s, t);
    // Both s and t are descents, so <s,t> is finite and w = u . w0(s,t).
    Element u = w;
    Generator a = t;
    for (int k = 0; k < m; ++k) {
      u = right_mul(u, a);
      a = (a == t) ? s : t;
    }
    return ascend_word(u, alternating_ending(s, t, m - 1, t));
  }

  /// w*s where s is not a right descent of w: find or create the element.
  Element ascend(Element w, Generator s) {
    const std::int32_t len = nodes_[w.id].length + 1;
    DescentMask rd = gen_bit(s);
    std::vector<std::pair<Generator, Element>> parents{{s, w}};
    for (Generator t = 0; t < rank_; ++t) {
      if (t == s) continue;
      int m = sys_.m(s, t);
      if (m == kInfinity) continue;
      Element cur = w;
      Generator a = t;
      int k = 1;
      while (k < m && has_gen(nodes_[cur.id].rdesc, a)) {
        cur = right_mul(cur, a);
        a = (a == t) ? s : t;
        ++k;
      }
      if (k < m) continue;
      rd |= gen_bit(t);
      parents.emplace_back(t, ascend_word(cur, alternating_ending(s, t, m - 1, s)));
    }
    // ShortLex normal form: the least prefix word wins among all possible last letters.
    std::size_t best = 0;
    if (parents.size() > 1) {
      Word best_word = word(parents[0].second);
      for (std::size_t i = 1; i < parents.size(); ++i) {
        Word cand = word(parents[i].second);
        if (cand < best_word || (cand == best_word && parents[i].first < parents[best].first)) {
          best = i;
          best_word = std::move(cand);
        }
      }
    }
    auto [last, prefix] = parents[best];
    std::uint64_t key = static_cast<std::uint64_t>(prefix.id) * static_cast<std::uint64_t>(rank_) +
                        static_cast<std::uint64_t>(last);
    if (auto it = by_key_.find(key); it != by_key_.end()) return Element{it->second};
    if (nodes_.size() >= budget_)
      throw ResourceError("element budget of " + std::to_string(budget_) + " exceeded (" +
                          std::to_string(nodes_.size()) + " elements stored)");
    auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{len, rd, prefix.id, -1, last});
    links_.resize(links_.size() + static_cast<std::size_t>(rank_), -1);
    by_key_.emplace(key, id);
    for (auto& [t, p] : parents) {
      set_link(id, t, p.id);
      set_link(p.id, t, id);
    }
    return Element{id};
  }

  CoxeterSystem sys_;
  int rank_;
  std::size_t budget_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> links_;
  std::unordered_map<std::uint64_t, std::int32_t> by_key_;
};

}  // namespace coxcells

template <>
struct std::hash<coxcells::Element> {
  std::size_t operator()(const coxcells::Element& e) const noexcept {
    return std::hash<std::int32_t>{}(e.id);
  }
};
