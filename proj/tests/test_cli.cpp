#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using navseg::cli::run_cli;

namespace {

const fs::path kRoot = NAVSEG_SOURCE_DIR;
const std::string kCorpus = (kRoot / "data" / "synthetic").string();
const std::string kProse = (kRoot / "data" / "synthetic-prose").string();
const std::string kModel = (kRoot / "data" / "model.navseg").string();

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("navseg_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"cluster"}).code, 2);
  auto bad_algo = invoke({"eval", "--corpus", kCorpus, "--algo", "spectral"});
  EXPECT_EQ(bad_algo.code, 2);
  EXPECT_NE(bad_algo.err.find("spectral"), std::string::npos);
  EXPECT_EQ(invoke({"eval", "--corpus", kCorpus, "--beta", "-1"}).code, 2);
}

TEST(Cli, MissingModelNamesThePath) {
  auto r = invoke({"extract", "--model", "/nonexistent/model.navseg", "--page",
                   kCorpus + "/pages/page-002.html"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE((r.out + r.err).find("/nonexistent/model.navseg"), std::string::npos);
}

TEST(Cli, MalformedModelIsAUsageError) {
  auto bad = scratch("bad_model");
  fs::create_directories(bad);
  std::ofstream(bad / "m.navseg") << "{\"format\": \"navseg-svm\"";
  auto r = invoke({"extract", "--model", (bad / "m.navseg").string(), "--page", kCorpus + "/pages/page-002.html"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("invalid document"), std::string::npos);
  fs::remove_all(bad);
}

TEST(Cli, ParsePrintsIndexedTree) {
  auto dir = scratch("parse");
  fs::create_directories(dir);
  std::ofstream(dir / "p.html") << "<body><a href=/x>x</a><a href=/y>y z</a></body>";
  auto r = invoke({"parse", "--page", (dir / "p.html").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "# nodes=7 hyperlinks=2 gt=0 hdt=1.000000");
  EXPECT_NE(r.out.find("4\t5\t    a href=\"/x\""), std::string::npos) << r.out;
  auto links = invoke({"parse", "--links", "--page", (dir / "p.html").string()});
  EXPECT_NE(links.out.find("6\t2\t/y\ty z"), std::string::npos) << links.out;
  fs::remove_all(dir);
}

TEST(Cli, ClusterAndFeatures) {
  const std::string page = kCorpus + "/pages/page-002.html";
  auto c = invoke({"cluster", "--page", page});
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(std::count(c.out.begin(), c.out.end(), '\n'), 7);
  auto dir = scratch("features");
  fs::create_directories(dir);
  auto f = invoke({"features", "--page", page, "--dump-partition", (dir / "part.txt").string()});
  ASSERT_EQ(f.code, 0);
  EXPECT_EQ(f.out.substr(0, f.out.find('\n')), "block_id,count,text_mean,text_var");
  EXPECT_EQ(std::count(f.out.begin(), f.out.end(), '\n'), 8);
  EXPECT_EQ(slurp(dir / "part.txt"), c.out);
  fs::remove_all(dir);
}

TEST(Cli, ExtractMatchesGolden) {
  auto r = invoke({"extract", "--model", kModel, "--page", kCorpus + "/pages/page-002.html"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(kRoot / "tests" / "golden" / "extract-page-002.json"));
}

TEST(Cli, ExtractFromPageWithoutAnchors) {
  auto dir = scratch("no_anchors");
  fs::create_directories(dir);
  std::ofstream(dir / "plain.html") << "<html><body><p>Nothing to follow here.</p></body></html>";
  auto r = invoke({"extract", "--model", kModel, "--page", (dir / "plain.html").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["hyperlinks"], 0);
  EXPECT_TRUE(doc["navigation_blocks"].empty());
  fs::remove_all(dir);
}

TEST(Cli, EvalMatchesGoldens) {
  auto json = invoke({"eval", "--corpus", kCorpus, "--algo", "chd-hd", "--seed", "7", "--report", "-"});
  ASSERT_EQ(json.code, 0) << json.err;
  EXPECT_EQ(json.out, slurp(kRoot / "tests" / "golden" / "eval-chd-hd-seed7.json"));
  auto table = invoke({"eval", "--corpus", kCorpus});
  EXPECT_EQ(table.out, slurp(kRoot / "tests" / "golden" / "eval-chd-hd-seed7.txt"));
}

TEST(Cli, EvalWithBundledModelAddsModelMetadata) {
  auto r = invoke({"eval", "--corpus", kCorpus, "--model", kModel, "--report", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto got = nlohmann::json::parse(r.out);
  auto golden = nlohmann::json::parse(slurp(kRoot / "tests" / "golden" / "eval-chd-hd-seed7.json"));
  EXPECT_EQ(got["metadata"]["model"], "model.navseg");
  got["metadata"].erase("model");
  EXPECT_EQ(got, golden);
}

TEST(Cli, EvalDumpsStages) {
  auto dir = scratch("dumps");
  auto r = invoke({"eval", "--corpus", kCorpus, "--report", (dir / "r.json").string(), "--dump-partition",
                   (dir / "parts").string(), "--dump-features", (dir / "feats").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "parts" / "page-002.partition"));
  EXPECT_TRUE(fs::exists(dir / "feats" / "page-002.features.csv"));
  auto cluster = invoke({"cluster", "--page", kCorpus + "/pages/page-002.html"});
  EXPECT_EQ(slurp(dir / "parts" / "page-002.partition"), cluster.out);
  fs::remove_all(dir);
}

TEST(Cli, ChdHdAtLeastChdOnProseCorpus) {
  auto score = [&](const char* algo) {
    auto r = invoke({"eval", "--corpus", kProse, "--algo", algo, "--report", "-"});
    EXPECT_EQ(r.code, 0) << r.err;
    return nlohmann::json::parse(r.out)["averages"]["ari"].get<double>();
  };
  EXPECT_GE(score("chd-hd"), score("chd"));
}

TEST(Cli, LearningCurveGoldenAndGrid) {
  auto r = invoke({"learning-curve", "--corpus", kCorpus, "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(kRoot / "tests" / "golden" / "learning-curve-seed7.csv"));
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 20);  // header + 19 rows

  auto eval = nlohmann::json::parse(invoke({"eval", "--corpus", kCorpus, "--report", "-"}).out);
  char expected[64];
  std::snprintf(expected, sizeof expected, "1.00,%.6f,", eval["averages"]["f1"].get<double>());
  EXPECT_NE(r.out.find(expected), std::string::npos) << expected;

  auto custom = invoke({"learning-curve", "--corpus", kCorpus, "--fractions", "0.5,1", "--repetitions", "1"});
  EXPECT_EQ(std::count(custom.out.begin(), custom.out.end(), '\n'), 3);
  EXPECT_EQ(invoke({"learning-curve", "--corpus", kCorpus, "--fractions", "half"}).code, 2);
}

TEST(Cli, TrainReproducesBundledModel) {
  auto dir = scratch("train");
  fs::create_directories(dir);
  auto t = invoke({"train", "--corpus", kCorpus, "--out", (dir / "m.navseg").string(), "--dump-features",
                   (dir / "train.csv").string()});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(slurp(dir / "m.navseg"), slurp(kModel));
  EXPECT_EQ(slurp(dir / "train.csv").substr(0, 20), "page_id,first_index,");
  fs::remove_all(dir);
}

TEST(Cli, GenCorpusIsDeterministic) {
  auto a = scratch("gen_a"), b = scratch("gen_b");
  ASSERT_EQ(invoke({"gen-corpus", "--out", a.string(), "--pages", "3", "--seed", "5", "--menus", "1", "1"}).code, 0);
  ASSERT_EQ(invoke({"gen-corpus", "--out", b.string(), "--pages", "3", "--seed", "5", "--menus", "1", "1"}).code, 0);
  EXPECT_EQ(slurp(a / "manifest"), slurp(b / "manifest"));
  EXPECT_EQ(invoke({"eval", "--corpus", a.string()}).code, 0);
  EXPECT_EQ(invoke({"gen-corpus", "--out", a.string(), "--menus", "3", "1"}).code, 2);
  EXPECT_EQ(invoke({"gen-corpus", "--out", a.string(), "--variant", "poetry"}).code, 2);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, BundledCorporaMatchTheGenerator) {
  auto a = scratch("regen"), b = scratch("regen_prose");
  ASSERT_EQ(invoke({"gen-corpus", "--out", a.string(), "--seed", "7"}).code, 0);
  ASSERT_EQ(invoke({"gen-corpus", "--out", b.string(), "--seed", "7", "--variant", "prose"}).code, 0);
  EXPECT_EQ(slurp(a / "manifest"), slurp(fs::path(kCorpus) / "manifest"));
  EXPECT_EQ(slurp(b / "manifest"), slurp(fs::path(kProse) / "manifest"));
  fs::remove_all(a);
  fs::remove_all(b);
}
