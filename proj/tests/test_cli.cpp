#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = COXCELLS_FIXTURE_DIR;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  fs::path out = fs::temp_directory_path() / ("coxcells_cli_" + std::to_string(::getpid()) + ".out");
  std::string cmd = std::string(COXCELLS_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  fs::remove(out);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string group(const std::string& stem) { return kFixtures + "/" + stem + ".json"; }

}  // namespace

TEST(Cli, InfoListsDf) {
  auto r = run("info " + group("a2_affine"));
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["d_f"].size(), 6u);
  EXPECT_EQ(j["d_f_strict"].size(), 3u);
  EXPECT_FALSE(j["finite"].get<bool>());
  auto d4 = nlohmann::json::parse(run("info " + group("d4")).out);
  EXPECT_EQ(d4["order"], 192);
}

TEST(Cli, KlAndMu) {
  EXPECT_EQ(run("kl " + group("d4") + " --format text \"1 2\" \"1 2\"").out, "1\n");
  EXPECT_EQ(run("kl " + group("i2_7") + " --format text e \"1 2 1 2\"").out, "1\n");
  auto j = nlohmann::json::parse(run("kl " + group("d4") + " e \"2 4 1 3 2 1 3 2 4 2 1\"").out);
  EXPECT_EQ(j["q_coefficients"].size(), 3u);
  EXPECT_EQ(run("mu " + group("i2_3") + " --format text 1 \"1 2\"").out, "1\n");
}

TEST(Cli, CellsCountsAndDot) {
  auto j = nlohmann::json::parse(run("cells " + group("a2_affine") + " --radius 12 --side left").out);
  EXPECT_EQ(j["certified_nontrivial_blocks"], 9);
  auto i27 = nlohmann::json::parse(run("cells " + group("i2_7")).out);
  EXPECT_EQ(i27["blocks"].size(), 4u);
  auto dot = run("cells " + group("i2_3") + " --format dot");
  EXPECT_EQ(dot.code, 0);
  EXPECT_EQ(dot.out.rfind("digraph", 0), 0u);
}

TEST(Cli, DinvModes) {
  auto gen = nlohmann::json::parse(run("dinv generate " + group("a2_affine")).out);
  EXPECT_EQ(gen["records"].size(), 3u);
  EXPECT_TRUE(gen["closed"].get<bool>());
  auto a4 = run("dinv generate " + group("a4_affine") + " --seed \"4 0 4 2\" --max-len 12");
  ASSERT_EQ(a4.code, 0);
  EXPECT_EQ(nlohmann::json::parse(a4.out)["records"].size(), 6u);
  auto cmp = run("dinv compare " + group("d4") + " --radius 12");
  EXPECT_EQ(cmp.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(cmp.out)["agree"].get<bool>());
}

TEST(Cli, VerifyPassesAndIsDeterministic) {
  auto a = run("verify all " + group("a2_affine") + " --radius 9");
  auto b = run("verify all " + group("a2_affine") + " --radius 9");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(nlohmann::json::parse(a.out)["violation"].get<bool>());
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("cells " + group("a2_affine") + " --radius 2 --margin 3").code, 2);
  EXPECT_EQ(run("info /nonexistent.json").code, 2);
  EXPECT_EQ(run("kl " + group("a2_affine") + " 1 \"1 9\"").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  fs::path bad = fs::temp_directory_path() / "coxcells_bad_group.json";
  std::ofstream(bad) << R"({"coxeter_matrix": [[1, 3], [2, 1]]})";
  EXPECT_EQ(run("info " + bad.string()).code, 2);
  fs::remove(bad);
}

TEST(Cli, CacheRoundTripAndManifest) {
  fs::path dir = fs::temp_directory_path() / ("coxcells_cache_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string cache = (dir / "kl.cache").string();
  std::string o1 = (dir / "a.json").string(), o2 = (dir / "b.json").string();
  ASSERT_EQ(run("verify all " + group("a2_affine") + " --radius 8 --cache " + cache + " -o " + o1).code, 0);
  ASSERT_EQ(run("verify all " + group("a2_affine") + " --radius 8 --cache " + cache + " -o " + o2).code, 0);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(slurp(o1), slurp(o2));
  auto manifest = nlohmann::json::parse(slurp(o2 + ".manifest.json"));
  EXPECT_EQ(manifest["command"], "verify all");
  EXPECT_GT(manifest["cache"]["loaded"].get<int>(), 0);
  EXPECT_EQ(run("info " + group("d4") + " --cache " + cache).code, 2);
  fs::remove_all(dir);
}
