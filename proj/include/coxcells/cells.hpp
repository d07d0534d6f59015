#pragma once

// Kazhdan-Lusztig cells on balls and on finite parabolic subgroups.
//
// Directed mu-graph (right version): an edge z -> w records z <=_R w and is
// present when z, w are joined (mu(z,w) or mu(w,z) nonzero) and R(z) is not
// contained in R(w). Right cells are the strongly connected components; they
// have constant left descent sets. Left data is obtained through inversion.
//
// On a ball the SCCs only see chains that stay inside the ball, so the blocks
// refine the true cells. Certification looks at the window B_{R-margin-1}: an
// element x of the window is certified when its block, cut down to the window,
// is the same at radius R - margin and at radius R. The window sits one level
// below the smaller radius because elements of top length never have room to
// connect upwards.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/property_map/property_map.hpp>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>
#include <boost/pending/disjoint_sets.hpp>
#include <json.hpp>

#include "coxcells/a_function.hpp"

namespace coxcells {

enum class CellSide { left, right, two_sided };

inline const char* to_string(CellSide s) {
  switch (s) {
    case CellSide::left: return "left";
    case CellSide::right: return "right";
    case CellSide::two_sided: return "two-sided";
  }
  return "?";
}

/// A ball-like container for an arbitrary finite, inverse-closed element set.
inline Ball make_ball(CoxeterGroup& g, std::vector<Element> elems) {
  g.sort_shortlex(elems);
  Ball b;
  for (Element e : elems) b.radius = std::max(b.radius, g.length(e));
  b.elements = std::move(elems);
  for (std::size_t i = 0; i < b.elements.size(); ++i) b.index.emplace(b.elements[i].id, i);
  return b;
}

struct MuGraph {
  const Ball* ball = nullptr;
  Side side = Side::right;
  std::vector<std::vector<std::uint32_t>> out;  // i -> j : elements[i] <= elements[j]

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& o : out) n += o.size();
    return n;
  }
  bool has_edge(std::size_t i, std::size_t j) const {
    return std::binary_search(out[i].begin(), out[i].end(), static_cast<std::uint32_t>(j));
  }
};

inline MuGraph build_mu_graph(KLTable& kl, const Ball& ball, Side side) {
  CoxeterGroup& g = kl.group();
  MuGraph right;
  right.ball = &ball;
  right.side = Side::right;
  right.out.resize(ball.size());
  for (std::size_t j = 0; j < ball.size(); ++j) {
    Element w = ball.elements[j];
    const DescentMask rw = g.right_descents(w);
    for (const auto& [z, m] : kl.mu_list(w)) {
      auto i = static_cast<std::uint32_t>(ball.ordinal(z));
      const DescentMask rz = g.right_descents(z);
      if (rz & ~rw) right.out[i].push_back(static_cast<std::uint32_t>(j));
      if (rw & ~rz) right.out[j].push_back(i);
    }
  }
  for (auto& o : right.out) std::sort(o.begin(), o.end());
  if (side == Side::right) return right;

  MuGraph left;
  left.ball = &ball;
  left.side = Side::left;
  left.out.resize(ball.size());
  std::vector<std::uint32_t> inv(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i)
    inv[i] = static_cast<std::uint32_t>(ball.ordinal(g.inverse(ball.elements[i])));
  for (std::size_t i = 0; i < ball.size(); ++i)
    for (auto j : right.out[i]) left.out[inv[i]].push_back(inv[j]);
  for (auto& o : left.out) std::sort(o.begin(), o.end());
  return left;
}

namespace detail {

// SCC labels of the subgraph induced on vertices [0, n).
inline std::vector<int> scc_labels(const MuGraph& graph, std::size_t n) {
  using G = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
  G bg(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : graph.out[i])
      if (j < n) boost::add_edge(i, j, bg);
  std::vector<int> comp(n);
  if (n) boost::strong_components(bg, boost::make_iterator_property_map(comp.begin(), boost::get(boost::vertex_index, bg)));
  return comp;
}

// Relabel so that blocks are numbered by their first (smallest-ordinal) member.
inline std::vector<int> canonical_labels(const std::vector<int>& raw) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, ins] = remap.try_emplace(raw[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

}  // namespace detail

struct CellPartition {
  CellSide side = CellSide::right;
  int radius = 0;
  int margin = 0;
  const Ball* ball = nullptr;
  std::vector<std::vector<Element>> blocks;  // ordered by smallest member
  std::vector<int> block_of;                 // per ball ordinal
  std::vector<char> certified;               // per ball ordinal

  std::size_t block_index(Element w) const { return static_cast<std::size_t>(block_of[ball->ordinal(w)]); }
  bool is_certified(Element w) const { return certified[ball->ordinal(w)] != 0; }
  bool same_block(Element a, Element b) const { return block_index(a) == block_index(b); }

  /// Blocks containing at least one certified element.
  std::vector<std::size_t> certified_blocks() const {
    std::vector<char> seen(blocks.size(), 0);
    for (std::size_t i = 0; i < certified.size(); ++i)
      if (certified[i]) seen[block_of[i]] = 1;
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      if (seen[b]) out.push_back(b);
    return out;
  }
};

namespace detail {

inline CellPartition partition_from_labels(const Ball& ball, const std::vector<int>& labels, CellSide side,
                                           int margin, std::vector<char> certified) {
  CellPartition p;
  p.side = side;
  p.radius = ball.radius;
  p.margin = margin;
  p.ball = &ball;
  p.block_of = canonical_labels(labels);
  int nblocks = p.block_of.empty() ? 0 : *std::max_element(p.block_of.begin(), p.block_of.end()) + 1;
  p.blocks.resize(static_cast<std::size_t>(nblocks));
  for (std::size_t i = 0; i < ball.size(); ++i) p.blocks[p.block_of[i]].push_back(ball.elements[i]);
  p.certified = std::move(certified);
  return p;
}

}  // namespace detail

/// SCC partition of a one-sided mu-graph with margin certification.
inline CellPartition cell_partition(CoxeterGroup& g, const MuGraph& graph, int margin = 2) {
  const Ball& ball = *graph.ball;
  if (margin < 0 || margin > ball.radius) throw InputError("margin must satisfy 0 <= margin <= radius");
  const std::size_t n = ball.size();
  auto full = detail::scc_labels(graph, n);
  const CellSide side = graph.side == Side::right ? CellSide::right : CellSide::left;
  const DescentMask all = (DescentMask{1} << g.rank()) - 1;
  // A ball holding the longest element is the whole (finite) group: nothing is truncated.
  if (n && g.right_descents(ball.elements.back()) == all)
    return detail::partition_from_labels(ball, full, side, margin, std::vector<char>(n, 1));
  auto prefix = [&](int len) {
    std::size_t k = 0;
    while (k < n && g.length(ball.elements[k]) <= len) ++k;
    return k;
  };
  const std::size_t n_small = prefix(ball.radius - margin), n_window = prefix(ball.radius - margin - 1);
  auto small = detail::scc_labels(graph, n_small);
  // Blocks only merge as the radius grows, so equal counts inside the window mean equal sets.
  std::unordered_map<int, std::size_t> full_count, small_count;
  for (std::size_t i = 0; i < n_window; ++i) {
    ++full_count[full[i]];
    ++small_count[small[i]];
  }
  std::vector<char> cert(n, 0);
  for (std::size_t i = 0; i < n_window; ++i) cert[i] = full_count[full[i]] == small_count[small[i]];
  return detail::partition_from_labels(ball, full, side, margin, std::move(cert));
}

/// Two-sided partition: the join of a left and a right partition of the same ball.
inline CellPartition two_sided_partition(const CellPartition& left, const CellPartition& right) {
  const Ball& ball = *left.ball;
  const std::size_t n = ball.size();
  std::vector<std::size_t> rank(n), parent(n);
  auto id = boost::typed_identity_property_map<std::size_t>();
  boost::disjoint_sets ds(boost::make_iterator_property_map(rank.begin(), id),
                          boost::make_iterator_property_map(parent.begin(), id));
  for (std::size_t i = 0; i < n; ++i) ds.make_set(i);
  for (const auto* p : {&left, &right})
    for (const auto& blk : p->blocks)
      for (std::size_t k = 1; k < blk.size(); ++k) ds.union_set(ball.ordinal(blk[0]), ball.ordinal(blk[k]));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(ds.find_set(i));
  std::vector<char> cert(n);
  for (std::size_t i = 0; i < n; ++i) cert[i] = left.certified[i] && right.certified[i];
  return detail::partition_from_labels(ball, labels, CellSide::two_sided, left.margin, std::move(cert));
}

/// Convenience: build the graph(s) and partition in one call.
inline CellPartition cell_partition(KLTable& kl, const Ball& ball, CellSide side, int margin = 2) {
  CoxeterGroup& g = kl.group();
  if (side != CellSide::two_sided)
    return cell_partition(g, build_mu_graph(kl, ball, side == CellSide::left ? Side::left : Side::right), margin);
  auto l = cell_partition(g, build_mu_graph(kl, ball, Side::left), margin);
  auto r = cell_partition(g, build_mu_graph(kl, ball, Side::right), margin);
  return two_sided_partition(l, r);
}

// Distinguished involutions.

enum class Verdict { member_exact, member_conjectural, non_member, undetermined };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::member_exact: return "member_exact";
    case Verdict::member_conjectural: return "member_conjectural";
    case Verdict::non_member: return "non_member";
    case Verdict::undetermined: return "undetermined";
  }
  return "?";
}

inline bool is_member(Verdict v) { return v == Verdict::member_exact || v == Verdict::member_conjectural; }

struct Provenance {
  enum class Kind { bruteforce, finite_parabolic, generated } kind = Kind::bruteforce;
  std::optional<Element> base;  // seed v1 for generated records
  Word chain;                   // conjugating generators, first applied first
};

inline const char* to_string(Provenance::Kind k) {
  switch (k) {
    case Provenance::Kind::bruteforce: return "bruteforce";
    case Provenance::Kind::finite_parabolic: return "finite_parabolic";
    case Provenance::Kind::generated: return "generated";
  }
  return "?";
}

struct DInvRecord {
  Element element;
  int length = 0;
  AValue a;
  std::optional<AValue> a_prime;
  int delta = 0;
  std::int64_t pi = 1;
  Verdict verdict = Verdict::undetermined;
  Provenance provenance;
};

struct VerdictResult {
  Verdict verdict = Verdict::undetermined;
  std::optional<std::string> data_bug;  // l - a - 2 delta < 0 against a trusted a
};

/// Verdict policy for l - a - 2 delta = 0 given an a-value of known status.
inline VerdictResult classify_verdict(int length, const AValue& a, int delta, const std::optional<AValue>& a_prime) {
  const int diff = length - a.value - 2 * delta;
  if (diff < 0)
    return {Verdict::undetermined, "l - a - 2delta = " + std::to_string(diff) + " < 0 with a = " +
                                       std::to_string(a.value) + " (" + to_string(a.status) + ")"};
  if (a.status == AStatus::exact) return {diff == 0 ? Verdict::member_exact : Verdict::non_member, std::nullopt};
  // Lower bound: the true a may be larger, which only lowers l - a - 2 delta.
  if (a_prime && a_prime->value == a.value)
    return {diff == 0 ? Verdict::member_conjectural : Verdict::non_member, std::nullopt};
  return {Verdict::undetermined, std::nullopt};
}

struct DInvOptions {
  int ball_radius = 0;  // radius for ball lower bounds on elements outside finite parabolics
  std::function<std::optional<AValue>(Element)> a_prime;
  std::function<std::optional<AValue>(Element)> extra_lower_bound;
};

struct DInvReport {
  std::vector<DInvRecord> records;
  std::vector<std::string> data_bugs;
};

/// Fill a, delta, pi and the verdict for one element.
inline DInvRecord evaluate_dinv(AFunction& af, Element z, const DInvOptions& opt, std::vector<std::string>* bugs) {
  KLTable& kl = af.kl();
  CoxeterGroup& g = kl.group();
  DInvRecord r;
  r.element = z;
  r.length = g.length(z);
  auto dp = delta_pi(kl, z);
  r.delta = dp.delta;
  r.pi = dp.pi;
  if (af.has_exact(z)) {
    r.a = af.exact_in_parabolic(z);
  } else {
    r.a = AValue{0, AStatus::lower_bound, "none"};
    if (opt.ball_radius > 0) r.a = af.ball_lower_bound(z, opt.ball_radius);
    if (opt.extra_lower_bound)
      if (auto extra = opt.extra_lower_bound(z); extra && extra->value > r.a.value) r.a = *extra;
  }
  if (opt.a_prime) r.a_prime = opt.a_prime(z);
  auto v = classify_verdict(r.length, r.a, r.delta, r.a_prime);
  r.verdict = v.verdict;
  if (v.data_bug && bugs) bugs->push_back(g.format(z) + ": " + *v.data_bug);
  return r;
}

/// Every involution of the ball with its verdict.
inline DInvReport dinv_bruteforce(AFunction& af, const Ball& ball, const DInvOptions& opt = {}) {
  CoxeterGroup& g = af.kl().group();
  DInvReport rep;
  for (Element z : ball.elements) {
    if (g.inverse(z) != z) continue;
    rep.records.push_back(evaluate_dinv(af, z, opt, &rep.data_bugs));
  }
  return rep;
}

// Exact cell data of a finite standard parabolic subgroup.

struct FiniteCellData {
  ParabolicSpec parabolic;
  Ball elements;  // all of W_I
  std::vector<std::vector<Element>> left_cells, right_cells, two_sided_cells;
  std::vector<Element> d_set;                    // sorted by id
  std::unordered_map<std::int32_t, Element> d_of;  // right cell -> its distinguished involution
  std::vector<std::string> violations;           // cells without exactly one member of d_set

  std::optional<Element> d(Element w) const {
    auto it = d_of.find(w.id);
    if (it == d_of.end()) return std::nullopt;
    return it->second;
  }
  bool in_d_set(Element w) const { return std::binary_search(d_set.begin(), d_set.end(), w); }
};

inline FiniteCellData finite_cell_data(AFunction& af, DescentMask subset) {
  KLTable& kl = af.kl();
  CoxeterGroup& g = kl.group();
  FiniteCellData out;
  out.parabolic = classify_parabolic(g.system(), subset);
  if (!out.parabolic.finite) throw InputError("finite_cell_data needs a finite parabolic subgroup");
  out.elements = make_ball(g, parabolic_elements(g, subset));
  const Ball& b = out.elements;
  auto left = cell_partition(g, build_mu_graph(kl, b, Side::left), 0);
  auto right = cell_partition(g, build_mu_graph(kl, b, Side::right), 0);
  auto both = two_sided_partition(left, right);
  out.left_cells = left.blocks;
  out.right_cells = right.blocks;
  out.two_sided_cells = both.blocks;
  for (Element z : b.elements) {
    if (g.inverse(z) != z) continue;
    int a = af.exact_in_parabolic(z, subset).value;
    if (g.length(z) - a - 2 * delta_pi(kl, z).delta == 0) out.d_set.push_back(z);
  }
  std::sort(out.d_set.begin(), out.d_set.end());
  for (const auto& cell : out.right_cells) {
    std::vector<Element> ds;
    for (Element w : cell)
      if (out.in_d_set(w)) ds.push_back(w);
    if (ds.size() != 1) {
      out.violations.push_back("right cell of " + g.format(cell.front()) + " contains " + std::to_string(ds.size()) +
                               " distinguished involutions");
      continue;
    }
    for (Element w : cell) out.d_of.emplace(w.id, ds.front());
  }
  for (const auto& cell : out.left_cells) {
    std::size_t k = std::count_if(cell.begin(), cell.end(), [&](Element w) { return out.in_d_set(w); });
    if (k != 1)
      out.violations.push_back("left cell of " + g.format(cell.front()) + " contains " + std::to_string(k) +
                               " distinguished involutions");
  }
  return out;
}

// Exports.

inline nlohmann::json words_json(const CoxeterGroup& g, const std::vector<Element>& elems) {
  auto j = nlohmann::json::array();
  for (Element e : elems) j.push_back(g.format(e));
  return j;
}

inline nlohmann::json to_json(const CoxeterGroup& g, const CellPartition& p) {
  nlohmann::json j;
  j["side"] = to_string(p.side);
  j["radius"] = p.radius;
  j["margin"] = p.margin;
  auto blocks = nlohmann::json::array();
  for (const auto& b : p.blocks) blocks.push_back(words_json(g, b));
  j["blocks"] = blocks;
  std::vector<Element> cert;
  for (std::size_t i = 0; i < p.certified.size(); ++i)
    if (p.certified[i]) cert.push_back(p.ball->elements[i]);
  j["certified"] = words_json(g, cert);
  return j;
}

inline nlohmann::json to_json(const CoxeterGroup& g, const AValue& a) {
  return {{"value", a.value}, {"status", to_string(a.status)}, {"scope", a.scope}};
}

inline nlohmann::json to_json(const CoxeterGroup& g, const DInvRecord& r) {
  nlohmann::json j;
  j["word"] = g.format(r.element);
  j["l"] = r.length;
  j["a"] = to_json(g, r.a);
  if (r.a_prime) j["a_prime"] = to_json(g, *r.a_prime);
  j["delta"] = r.delta;
  j["pi"] = r.pi;
  j["verdict"] = to_string(r.verdict);
  nlohmann::json prov{{"kind", to_string(r.provenance.kind)}};
  if (r.provenance.base) prov["base"] = g.format(*r.provenance.base);
  if (r.provenance.kind == Provenance::Kind::generated) prov["chain"] = g.system().format_word(r.provenance.chain);
  j["provenance"] = prov;
  return j;
}

/// Graphviz rendering: vertices labelled by normal forms, blocks as clusters.
inline std::string to_dot(const CoxeterGroup& g, const MuGraph& graph, const CellPartition& p) {
  const Ball& ball = *graph.ball;
  std::string out = "digraph mu_graph {\n  rankdir=BT;\n";
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    out += "  subgraph cluster_" + std::to_string(b) + " {\n";
    for (Element e : p.blocks[b]) {
      std::size_t i = ball.ordinal(e);
      out += "    n" + std::to_string(i) + " [label=\"" + g.format(e) + "\"" +
             (p.certified[i] ? "" : ", style=dashed") + "];\n";
    }
    out += "  }\n";
  }
  for (std::size_t i = 0; i < graph.out.size(); ++i)
    for (auto j : graph.out[i]) out += "  n" + std::to_string(i) + " -> n" + std::to_string(j) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace coxcells
