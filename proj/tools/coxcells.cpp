// Command-line front end: KL polynomials, cells, distinguished involutions and
// the conjecture checks on a group description file.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <thread>

#include "coxcells/equivalences.hpp"
#include "coxcells/group_file.hpp"
#include "coxcells/verification.hpp"

using namespace coxcells;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0, kExitViolation = 1, kExitInput = 2, kExitAbstain = 3;

struct JobConfig {
  std::string group_file;
  int radius = 8;
  int margin = 2;
  int max_len = 12;
  std::string cache_path;
  std::optional<int> a_bound;
  std::string format = "json";
  std::string output;
  unsigned workers = 0;

  void validate() const {
    if (margin < 0 || radius < margin) throw InputError("need radius >= margin >= 0");
    if (max_len < 0) throw InputError("max-len must be non-negative");
  }
  json to_json() const {
    json j{{"group_file", group_file}, {"radius", radius}, {"margin", margin}, {"max_len", max_len},
           {"format", format},         {"workers", workers}};
    j["cache"] = cache_path.empty() ? json() : json(cache_path);
    j["a_bound"] = a_bound ? json(*a_bound) : json();
    return j;
  }
};

// Everything a command needs, built once from the config.
struct Session {
  GroupFile file;
  CoxeterGroup g;
  KLTable kl;
  AFunction af;
  ConjectureEngine eng;
  std::size_t cache_loaded = 0;

  explicit Session(const JobConfig& cfg)
      : file(load_group_file(cfg.group_file)),
        g(file.system),
        kl(g),
        af(kl, cfg.a_bound ? cfg.a_bound : file.a_bound),
        eng(af) {
    if (!cfg.cache_path.empty() && std::filesystem::exists(cfg.cache_path)) cache_loaded = kl.load(cfg.cache_path);
  }
  bool finite() { return eng.finite_mask(full_mask(g.rank())); }
};

struct Outcome {
  json data;
  std::string text;  // used for --format text (and dot)
  int code = kExitOk;
};

json records_json(const CoxeterGroup& g, const std::vector<DInvRecord>& recs) {
  auto a = json::array();
  for (const auto& r : recs) a.push_back(to_json(g, r));
  return a;
}

json rejection_json(ConjectureEngine& eng, const Rejection& r) {
  CoxeterGroup& g = eng.group();
  json j{{"x", g.format(r.state_x)}, {"seed", g.format(r.seed)}, {"s", g.system().format_word({r.s})},
         {"reason", r.reason}};
  if (r.rigidity && r.rigidity->violation) j["violation"] = eng.format_witness(*r.rigidity->violation);
  return j;
}

std::string records_text(const CoxeterGroup& g, const std::vector<DInvRecord>& recs) {
  std::string out;
  for (const auto& r : recs)
    out += g.format(r.element) + "  l=" + std::to_string(r.length) + " a=" + std::to_string(r.a.value) + " (" +
           to_string(r.a.status) + ") delta=" + std::to_string(r.delta) + " pi=" + std::to_string(r.pi) + "  " +
           to_string(r.verdict) + "\n";
  return out;
}

// Commands ----------------------------------------------------------------------

Outcome cmd_info(Session& s) {
  Outcome o;
  const auto& sys = s.g.system();
  o.data["system"] = to_json(sys);
  auto whole = classify_parabolic(sys, full_mask(s.g.rank()));
  o.data["finite"] = whole.finite;
  o.data["order"] = whole.order ? json(*whole.order) : json();
  o.data["type"] = whole.type_label;
  o.data["a_bound"] = s.af.bound();
  auto paras = json::array();
  for (const auto& p : finite_parabolics(sys)) {
    if (p.subset.empty()) continue;
    paras.push_back({{"generators", sys.format_word(p.subset)}, {"type", p.type_label}, {"order", *p.order}});
  }
  o.data["finite_parabolics"] = paras;
  o.data["d_f"] = records_json(s.g, s.eng.d_f(false));
  o.data["d_f_strict"] = records_json(s.g, s.eng.d_f(true));

  o.text = sys.name() + ": rank " + std::to_string(s.g.rank()) +
           (whole.finite ? ", finite of order " + std::to_string(*whole.order) : ", infinite") + "\n" +
           "finite parabolics: " + std::to_string(paras.size()) + "\n";
  for (const auto& p : paras)
    o.text += "  {" + p["generators"].get<std::string>() + "} " + p["type"].get<std::string>() + " order " +
              std::to_string(p["order"].get<std::uint64_t>()) + "\n";
  o.text += "D_f (" + std::to_string(s.eng.d_f(false).size()) + "):\n" + records_text(s.g, s.eng.d_f(false));
  return o;
}

Outcome cmd_kl(Session& s, const std::string& ys, const std::string& ws, bool mu_only) {
  Outcome o;
  Element y = s.g.parse(ys), w = s.g.parse(ws);
  o.data = {{"y", s.g.format(y)}, {"w", s.g.format(w)}};
  if (mu_only) {
    auto m = s.kl.mu(y, w);
    o.data["mu"] = m;
    o.text = std::to_string(m) + "\n";
  } else {
    auto p = s.kl.kl_poly(y, w);
    o.data["q_coefficients"] = p.as_q_polynomial();
    o.data["polynomial"] = p.to_q_string();
    o.text = p.to_q_string() + "\n";
  }
  return o;
}

Outcome cmd_cells(Session& s, const JobConfig& cfg, const std::string& side_name) {
  Outcome o;
  CellSide side = side_name == "left" ? CellSide::left : side_name == "two-sided" ? CellSide::two_sided : CellSide::right;
  if (side == CellSide::two_sided && cfg.format == "dot") throw InputError("dot output needs a one-sided partition");
  Ball ball = s.g.enumerate_ball(cfg.radius);
  CellPartition p;
  std::optional<MuGraph> graph;
  if (side == CellSide::two_sided) {
    p = cell_partition(s.kl, ball, side, cfg.margin);
  } else {
    graph = build_mu_graph(s.kl, ball, side == CellSide::left ? Side::left : Side::right);
    p = cell_partition(s.g, *graph, cfg.margin);
  }
  std::size_t nontrivial = 0;
  for (auto b : p.certified_blocks())
    if (p.blocks[b].front() != s.g.identity()) ++nontrivial;
  o.data = to_json(s.g, p);
  o.data["ball_size"] = ball.size();
  o.data["certified_nontrivial_blocks"] = nontrivial;
  if (cfg.format == "dot") {
    o.text = to_dot(s.g, *graph, p);
  } else {
    o.text = std::string(to_string(side)) + " cells, radius " + std::to_string(cfg.radius) + ", margin " +
             std::to_string(cfg.margin) + ": " + std::to_string(p.blocks.size()) + " blocks, " +
             std::to_string(nontrivial) + " certified non-trivial\n";
    for (auto b : p.certified_blocks()) {
      o.text += "  [" + std::to_string(p.blocks[b].size()) + "]";
      for (std::size_t k = 0; k < std::min<std::size_t>(p.blocks[b].size(), 6); ++k)
        o.text += " " + s.g.format(p.blocks[b][k]);
      o.text += p.blocks[b].size() > 6 ? " ...\n" : "\n";
    }
  }
  return o;
}

GenerationResult run_generate(Session& s, const JobConfig& cfg, GenerationMode mode,
                              const std::vector<std::string>& seed_words) {
  std::vector<Element> seeds;
  for (const auto& w : seed_words) {
    Element e = s.g.parse(w);
    if (s.g.inverse(e) != e || !s.eng.in_d_f(e)) throw InputError("seed " + w + " is not in D_f");
    seeds.push_back(e);
  }
  return s.eng.generate(cfg.max_len, mode, seeds);
}

json generation_json(Session& s, const GenerationResult& gen) {
  json j;
  j["records"] = records_json(s.g, gen.records);
  j["closed"] = gen.closed;
  j["warnings"] = gen.warnings;
  auto rj = json::array();
  for (const auto& r : gen.rejections) rj.push_back(rejection_json(s.eng, r));
  j["rejections"] = rj;
  return j;
}

VerifyOptions verify_options(const JobConfig& cfg, bool conj3, bool positivity, bool d) {
  VerifyOptions v;
  v.radius = cfg.radius;
  v.margin = cfg.margin;
  v.conj3 = conj3;
  v.positivity = positivity;
  v.d_agreement = d;
  return v;
}

Outcome cmd_dinv(Session& s, const JobConfig& cfg, const std::string& mode, bool thm1,
                 const std::vector<std::string>& seeds) {
  Outcome o;
  if (mode == "bruteforce") {
    Ball ball = s.g.enumerate_ball(cfg.radius);
    std::vector<DInvRecord> recs;
    const bool fin = s.finite();
    for (Element z : ball.elements)
      if (s.g.inverse(z) == z) recs.push_back(s.eng.evaluate(z, fin ? 0 : cfg.radius));
    std::vector<DInvRecord> members;
    for (const auto& r : recs)
      if (is_member(r.verdict)) members.push_back(r);
    o.data["involutions"] = records_json(s.g, recs);
    o.data["members"] = words_json(s.g, [&] {
      std::vector<Element> m;
      for (const auto& r : members) m.push_back(r.element);
      return m;
    }());
    o.data["data_bugs"] = s.eng.data_bugs();
    o.text = records_text(s.g, members);
    if (!s.eng.data_bugs().empty()) o.code = kExitViolation;
  } else if (mode == "generate") {
    auto gen = run_generate(s, cfg, thm1 ? GenerationMode::thm1 : GenerationMode::conj1, seeds);
    o.data = generation_json(s, gen);
    o.data["d_f"] = records_json(s.g, s.eng.d_f(false));
    o.text = "D_f: " + std::to_string(s.eng.d_f(false).size()) + ", generated: " + std::to_string(gen.records.size()) +
             (gen.closed ? " (closed)" : " (cut at max-len)") + "\n" + records_text(s.g, gen.records);
    for (const auto& r : gen.rejections)
      if (r.rigidity && r.rigidity->violation)
        o.text += "rejected " + s.g.system().format_word({r.s}) + " at x = " + s.g.format(r.state_x) + ": " +
                  r.reason + "\n";
  } else {
    auto opt = verify_options(cfg, false, false, true);
    opt.mode = thm1 ? GenerationMode::thm1 : GenerationMode::conj1;
    auto rep = verify_suite(s.eng, opt);
    o.data = to_json(s.g, rep)["distinguished_involutions"];
    o.data["agree"] = rep.d_ok();
    o.text = std::string(rep.d_ok() ? "agree" : "DISAGREE") + ": " + std::to_string(rep.d_bruteforce.size()) +
             " brute-force, " + std::to_string(rep.d_predicted.size()) + " predicted up to length " +
             std::to_string(rep.certified_length) + "\n";
    if (!rep.d_ok() || !rep.data_bugs.empty()) o.code = kExitViolation;
  }
  return o;
}

json conj1_block(Session& s, const JobConfig& cfg, bool& violation) {
  json j;
  for (auto [name, mode] : {std::pair{"conj1", GenerationMode::conj1}, {"thm1", GenerationMode::thm1}}) {
    auto gen = s.eng.generate(cfg.max_len, mode);
    j[name] = {{"generated", gen.records.size()}, {"closed", gen.closed}, {"rejections", gen.rejections.size()}};
  }
  auto rep = verify_suite(s.eng, verify_options(cfg, false, false, true));
  j["agreement"] = to_json(s.g, rep)["distinguished_involutions"];
  j["agree"] = rep.d_ok();
  violation = violation || !rep.d_ok() || !rep.data_bugs.empty();
  return j;
}

json conj2_block(Session& s, const JobConfig& cfg, bool with_edges, bool& violation) {
  Ball ball = s.g.enumerate_ball(cfg.radius);
  auto ref = cell_partition(s.kl, ball, CellSide::right, cfg.margin);
  auto gen = s.eng.generate(cfg.radius, GenerationMode::conj1);
  auto rec = reconstruct_cells(s.eng, ball, ref, gen.records);
  std::size_t unverified = 0;
  for (const auto& e : rec.edges) unverified += !verify_edge(s.kl, e);
  const auto& c = rec.comparison;
  json j{{"edges", rec.edges.size()},
         {"unverified_edges", unverified},
         {"certified_blocks", c.certified_blocks},
         {"agreeing_blocks", c.agreeing_blocks},
         {"refinements", c.refinements},
         {"conflicts", c.conflicts},
         {"edge_conflicts", c.edge_conflicts},
         {"agrees", c.agrees()}};
  for (const auto& [rule, n] : rec.rule_counts) j["rules"][to_string(rule)] = n;
  if (with_edges) {
    auto ej = json::array();
    for (const auto& e : rec.edges) ej.push_back(to_json(s.g, e));
    j["edge_list"] = ej;
  }
  violation = violation || unverified != 0 || !c.conflicts.empty() || c.edge_conflicts != 0;
  return j;
}

Outcome cmd_verify(Session& s, const JobConfig& cfg, const std::string& which, bool with_edges) {
  Outcome o;
  bool violation = false;
  const bool all = which == "all";
  if (all || which == "conj1") o.data["conj1"] = conj1_block(s, cfg, violation);
  if (all || which == "conj2") o.data["conj2"] = conj2_block(s, cfg, with_edges, violation);
  if (all || which == "conj3" || which == "positivity") {
    bool c3 = all || which == "conj3", pos = all || which == "positivity";
    auto rep = verify_suite(s.eng, verify_options(cfg, c3, pos, false));
    auto rj = to_json(s.g, rep);
    if (c3) o.data["conj3"] = rj["conj3"];
    if (pos) o.data["positivity"] = rj["positivity"];
    violation = violation || !rep.conj3_ok() || !rep.positivity_ok();
  }
  o.data["violation"] = violation;
  o.code = violation ? kExitViolation : kExitOk;
  o.text = o.data.dump(2) + "\n";
  return o;
}

void emit(const Outcome& o, const JobConfig& cfg, const std::string& command, double seconds, const KLStats& st,
          std::size_t cache_loaded) {
  std::string body = cfg.format == "json" ? o.data.dump(2) + "\n" : o.text;
  if (cfg.output.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw InputError("cannot write " + cfg.output);
  out << body;
  json manifest{{"command", command},
                {"config", cfg.to_json()},
                {"exit_code", o.code},
                {"timings", {{"total_seconds", seconds}}},
                {"cache", {{"hits", st.hits}, {"misses", st.misses}, {"entries", st.size}, {"loaded", cache_loaded}}}};
  std::ofstream(cfg.output + ".manifest.json") << manifest.dump(2) << "\n";
}

void add_common(CLI::App* sub, JobConfig& cfg) {
  sub->add_option("group", cfg.group_file, "group description file (JSON)")->required();
  sub->add_option("--radius", cfg.radius, "ball radius")->capture_default_str();
  sub->add_option("--margin", cfg.margin, "certification margin")->capture_default_str();
  sub->add_option("--max-len", cfg.max_len, "length cap for generated involutions")->capture_default_str();
  sub->add_option("--cache", cfg.cache_path, "KL cache file, read if present and rewritten afterwards");
  sub->add_option("--a-bound", cfg.a_bound, "override the a-function bound");
  sub->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"json", "text", "dot"}))
      ->capture_default_str();
  sub->add_option("-o,--output", cfg.output, "write output here (plus a .manifest.json beside it)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kazhdan-Lusztig cells and distinguished involutions in Coxeter groups"};
  app.require_subcommand(1);
  JobConfig cfg;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--workers", cfg.workers, "worker cap (computations currently run on one thread)")
      ->check(CLI::PositiveNumber);

  auto* info = app.add_subcommand("info", "rank, finite parabolics and D_f");
  add_common(info, cfg);

  std::string y_word, w_word;
  auto* kl = app.add_subcommand("kl", "Kazhdan-Lusztig polynomial P_{y,w}");
  add_common(kl, cfg);
  kl->add_option("y", y_word, "word for y ('e' for the identity)")->required();
  kl->add_option("w", w_word, "word for w")->required();
  auto* mu = app.add_subcommand("mu", "leading coefficient mu(y, w)");
  add_common(mu, cfg);
  mu->add_option("y", y_word)->required();
  mu->add_option("w", w_word)->required();

  std::string side = "right";
  auto* cells = app.add_subcommand("cells", "brute-force cell partition of a ball");
  add_common(cells, cfg);
  cells->add_option("--side", side)->check(CLI::IsMember({"left", "right", "two-sided"}))->capture_default_str();

  std::string dinv_mode;
  bool thm1 = false;
  std::vector<std::string> seeds;
  auto* dinv = app.add_subcommand("dinv", "distinguished involutions");
  dinv->add_option("mode", dinv_mode)->required()->check(CLI::IsMember({"bruteforce", "generate", "compare"}));
  add_common(dinv, cfg);
  dinv->add_flag("--thm1", thm1, "also require a(vs) = a(v) and L(vs) not inside R(vs) at each step");
  dinv->add_option("--seed", seeds, "seed words from D_f (default: D_f without generators)");

  std::string which;
  bool with_edges = false;
  auto* verify = app.add_subcommand("verify", "conjecture checks");
  verify->add_option("which", which)->required()->check(
      CLI::IsMember({"conj1", "conj2", "conj3", "positivity", "all"}));
  add_common(verify, cfg);
  verify->add_flag("--edges", with_edges, "include every equivalence edge in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    cfg.validate();
    Session s(cfg);
    Outcome o;
    std::string command;
    if (info->parsed()) {
      command = "info";
      o = cmd_info(s);
    } else if (kl->parsed() || mu->parsed()) {
      command = kl->parsed() ? "kl" : "mu";
      o = cmd_kl(s, y_word, w_word, mu->parsed());
    } else if (cells->parsed()) {
      command = "cells";
      o = cmd_cells(s, cfg, side);
    } else if (dinv->parsed()) {
      command = "dinv " + dinv_mode;
      o = cmd_dinv(s, cfg, dinv_mode, thm1, seeds);
    } else {
      command = "verify " + which;
      o = cmd_verify(s, cfg, which, with_edges);
    }
    if (cfg.format == "dot" && command != "cells") throw InputError("dot output is only available for cells");
    if (!cfg.cache_path.empty()) s.kl.save(cfg.cache_path);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(o, cfg, command, secs, s.kl.stats(), s.cache_loaded);
    return o.code;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ResourceError& e) {
    std::cerr << "abstained: " << e.what() << "\n";
    return kExitAbstain;
  } catch (const ABoundViolation& e) {
    std::cerr << "violation: " << e.what() << "\n";
    return kExitViolation;
  }
}
