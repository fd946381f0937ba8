#include "cli/cli.hpp"
#include "cli/run_config.hpp"

#include <tdacloud/tdacloud.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tdacloud;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args, const std::map<std::string, std::string>& env = {}) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err, env);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("tdacloud_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Ten small spheres and tori under db/.
  void make_database() {
    fs::create_directories(dir_ / "db");
    for (int i = 0; i < 10; ++i) {
      const std::string shape = i % 2 ? "torus" : "sphere";
      const auto r = run_cli({"synth", shape, path("db/" + shape + std::to_string(i) + ".xyz"), "-n", "120", "--seed",
                              std::to_string(10 + i), i % 2 ? "--minor" : "--radius",
                              std::to_string(i % 2 ? 0.3 + 0.05 * i : 0.5 + 0.1 * i)});
      ASSERT_EQ(r.code, 0) << r.err;
    }
  }

  fs::path dir_;
};

}  // namespace

TEST(CliHelpers, ParseNList) {
  EXPECT_EQ(cli::parse_n_list("1,5,10"), (std::vector<std::size_t>{1, 5, 10}));
  EXPECT_EQ(cli::parse_n_list("1..3,7"), (std::vector<std::size_t>{1, 2, 3, 7}));
  EXPECT_EQ(cli::parse_n_list("1..25").size(), 25u);
  EXPECT_THROW(cli::parse_n_list("0"), ArgumentError);
  EXPECT_THROW(cli::parse_n_list("5..2"), ArgumentError);
  EXPECT_THROW(cli::parse_n_list("x"), ArgumentError);
  EXPECT_THROW(cli::parse_n_list(""), ArgumentError);
}

TEST(CliHelpers, PerturbationTokens) {
  const auto rot = cli::parse_perturbation_tokens({"kind=rotate", "degrees=90", "axis=1,0,0"});
  EXPECT_EQ(rot.kind, PerturbationKind::rotate);
  EXPECT_EQ(rot.degrees, 90.0);
  EXPECT_EQ(rot.axis, (Point3{1, 0, 0}));
  const auto jit = cli::parse_perturbation_tokens({"kind=jitter", "fraction=0.05", "sigma=0.001", "seed=1"});
  EXPECT_EQ(jit.fraction, 0.05);
  EXPECT_EQ(jit.sigma, 0.001);
  EXPECT_EQ(jit.seed, 1u);
  EXPECT_THROW(cli::parse_perturbation_tokens({"degrees=90"}), ArgumentError);
  EXPECT_THROW(cli::parse_perturbation_tokens({"kind=melt"}), ArgumentError);
  EXPECT_THROW(cli::parse_perturbation_tokens({"kind=rotate", "axis=1,0"}), ArgumentError);
  EXPECT_THROW(cli::parse_perturbation_tokens({"kind=rotate", "colour=red"}), ArgumentError);
}

TEST(CliHelpers, FormatRecall) {
  EXPECT_EQ(cli::format_recall(100.0), "100.0");
  EXPECT_EQ(cli::format_recall(50.0), "50.0");
  EXPECT_EQ(cli::format_recall(12.5), "12.5");
}

TEST(CliHelpers, ExitCodes) {
  EXPECT_EQ(cli::exit_code_for(ArgumentError("x")), 2);
  EXPECT_EQ(cli::exit_code_for(DataError("x")), 3);
  EXPECT_EQ(cli::exit_code_for(ContractViolation("x")), 4);
  EXPECT_EQ(cli::exit_code_for(std::runtime_error("x")), 4);
}

TEST(RunConfigTest, Defaults) {
  const auto rc = cli::resolve_config({}, {}, {{"TDACLOUD_THREADS", "3"}});
  EXPECT_EQ(rc.pipeline, PipelineConfig{});
  EXPECT_EQ(rc.pipeline.backend, Backend::alpha);
  EXPECT_EQ(rc.pipeline.budget, 10u);
  EXPECT_EQ(rc.pipeline.seed, 42u);
  EXPECT_EQ(rc.pipeline.downsample, 10000u);
  EXPECT_TRUE(rc.pipeline.normalize);
  EXPECT_EQ(rc.threads, 3u);
  EXPECT_FALSE(rc.pipeline_explicit);
  EXPECT_GE(cli::resolve_config({}, {}, {}).threads, 1u);
}

TEST(RunConfigTest, Precedence) {
  const auto file = cli::parse_config_text("# comment\nbackend=rips\nb = 20\nseed=7\nthreads=2\nnormalize=off\n", "cfg");
  cli::ConfigOverrides flags;
  flags.budget = 30;
  flags.threads = 5;
  const auto rc = cli::resolve_config(flags, file, {{"TDACLOUD_THREADS", "9"}});
  EXPECT_EQ(rc.pipeline.backend, Backend::rips);
  EXPECT_EQ(rc.pipeline.budget, 30u);
  EXPECT_EQ(rc.pipeline.seed, 7u);
  EXPECT_FALSE(rc.pipeline.normalize);
  EXPECT_EQ(rc.threads, 5u);
  EXPECT_TRUE(rc.pipeline_explicit);
  EXPECT_EQ(cli::resolve_config({}, file, {{"TDACLOUD_THREADS", "9"}}).threads, 2u);
}

TEST(RunConfigTest, BadConfigNamesLine) {
  try {
    cli::parse_config_text("seed=1\ncolour=blue\n", "my.cfg");
    FAIL() << "expected ArgumentError";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("my.cfg:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(cli::parse_config_text("b=zero\n", "c"), ArgumentError);
  EXPECT_THROW(cli::parse_config_text("novalue\n", "c"), ArgumentError);
  EXPECT_THROW(cli::resolve_config({}, {}, {{"TDACLOUD_THREADS", "0"}}), ArgumentError);
  EXPECT_THROW(cli::resolve_config({}, {}, {{"TDACLOUD_THREADS", "many"}}), ArgumentError);
}

TEST_F(CliTest, ArgumentErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"query"}).code, 2);
  EXPECT_EQ(run_cli({"synth", "sphere", path("a.xyz"), "--budget", "zero"}).code, 2);
  EXPECT_EQ(run_cli({"synth", "blob", path("a.xyz")}).code, 2);
  EXPECT_EQ(run_cli({"synth", "sphere", path("a.unknown")}).code, 2);
  EXPECT_EQ(run_cli({"synth", "sphere", path("a.xyz"), "--threads", "0"}).code, 2);
  EXPECT_EQ(run_cli({"synth", "sphere", path("a.xyz"), "--config", path("missing.cfg")}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, SynthIsDeterministic) {
  ASSERT_EQ(run_cli({"synth", "sphere", path("a.xyz"), "-n", "100", "--seed", "5"}).code, 0);
  ASSERT_EQ(run_cli({"synth", "sphere", path("b.xyz"), "-n", "100", "--seed", "5"}).code, 0);
  ASSERT_EQ(run_cli({"synth", "sphere", path("c.ply"), "-n", "100", "--seed", "6"}).code, 0);
  EXPECT_EQ(slurp(path("a.xyz")), slurp(path("b.xyz")));
  EXPECT_EQ(load_cloud(path("a.xyz")).size(), 100u);
  EXPECT_EQ(load_cloud(path("c.ply")).size(), 100u);
  ASSERT_EQ(run_cli({"synth", "cube_corners", path("cube.bin")}).code, 0);
  EXPECT_EQ(load_cloud(path("cube.bin")).size(), 8u);
}

TEST_F(CliTest, IndexAndQuery) {
  make_database();
  const auto built = run_cli({"index", path("db"), path("db.idx"), "--threads", "2"});
  ASSERT_EQ(built.code, 0) << built.err;
  const auto report = lines_of(built.out);
  ASSERT_EQ(report.size(), 11u);
  EXPECT_EQ(report[0], "id,status,selected_dim,pairs,points,seconds,reason");
  EXPECT_EQ(load_index(path("db.idx")).entries.size(), 10u);

  ASSERT_EQ(run_cli({"index", path("db"), path("again.idx")}, {{"TDACLOUD_THREADS", "3"}}).code, 0);
  EXPECT_EQ(slurp(path("db.idx")), slurp(path("again.idx")));

  const auto q = run_cli({"query", path("db.idx"), path("db/torus3.xyz"), "--top", "5"});
  ASSERT_EQ(q.code, 0) << q.err;
  const auto rows = lines_of(q.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "rank,id,distance");
  EXPECT_EQ(rows[1], "1,torus3,0");
  EXPECT_NE(q.err.find("timing: persistence "), std::string::npos);
  EXPECT_NE(q.err.find("persistence share"), std::string::npos);

  const auto to_file = run_cli({"query", path("db.idx"), path("db/torus3.xyz"), "--out", path("q.csv")});
  ASSERT_EQ(to_file.code, 0);
  EXPECT_TRUE(to_file.out.empty());
  EXPECT_EQ(lines_of(slurp(path("q.csv"))).size(), 11u);

  const auto warned = run_cli({"query", path("db.idx"), path("db/torus3.xyz"), "--budget", "20"});
  EXPECT_EQ(warned.code, 0);
  EXPECT_NE(warned.err.find("warning:"), std::string::npos);
  EXPECT_EQ(lines_of(warned.out)[1], "1,torus3,0");
}

TEST_F(CliTest, IndexErrors) {
  fs::create_directories(dir_ / "one");
  ASSERT_EQ(run_cli({"synth", "sphere", path("one/s.xyz"), "-n", "50"}).code, 0);
  EXPECT_EQ(run_cli({"index", path("one"), path("x.idx")}).code, 2);
  EXPECT_EQ(run_cli({"index", path("nowhere"), path("x.idx")}).code, 2);
  ASSERT_EQ(run_cli({"synth", "sphere", path("one/t.xyz"), "-n", "50"}).code, 0);
  std::ofstream(path("one/bad.xyz")) << "1 2\n";
  EXPECT_EQ(run_cli({"index", path("one"), path("x.idx")}).code, 3);
}

TEST_F(CliTest, QueryDataErrors) {
  std::ofstream(path("broken.idx")) << "TDACLOUD-INDEX v1\nbackend=alpha\n";
  ASSERT_EQ(run_cli({"synth", "sphere", path("s.xyz"), "-n", "50"}).code, 0);
  EXPECT_EQ(run_cli({"query", path("broken.idx"), path("s.xyz")}).code, 3);
  EXPECT_EQ(run_cli({"query", path("missing.idx"), path("s.xyz")}).code, 3);
}

TEST_F(CliTest, Perturb) {
  ASSERT_EQ(run_cli({"synth", "torus", path("t.xyz"), "-n", "200"}).code, 0);
  const auto rot = run_cli({"perturb", path("t.xyz"), path("r.xyz"), "kind=rotate", "degrees=90"});
  ASSERT_EQ(rot.code, 0) << rot.err;
  EXPECT_EQ(rot.out, "kind=rotate axis=0,0,1 degrees=90\n");
  const auto original = load_cloud(path("t.xyz"));
  const auto rotated = load_cloud(path("r.xyz"));
  ASSERT_EQ(rotated.size(), original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    EXPECT_NEAR(rotated.points[i].x, -original.points[i].y, 1e-12);
    EXPECT_NEAR(rotated.points[i].y, original.points[i].x, 1e-12);
    EXPECT_NEAR(rotated.points[i].z, original.points[i].z, 1e-12);
  }

  ASSERT_EQ(run_cli({"perturb", path("t.xyz"), path("s.xyz"), "kind=scale", "factor=1.05"}).code, 0);
  const auto scaled = load_cloud(path("s.xyz"));
  EXPECT_NEAR(scaled.points[7].x, 1.05 * original.points[7].x, 1e-12);

  ASSERT_EQ(run_cli({"perturb", path("t.xyz"), path("j1.xyz"), "kind=jitter", "fraction=0.05", "sigma=0.001",
                     "seed=1"}).code, 0);
  ASSERT_EQ(run_cli({"perturb", path("t.xyz"), path("j2.xyz"), "kind=jitter", "fraction=0.05", "sigma=0.001",
                     "seed=1"}).code, 0);
  EXPECT_EQ(slurp(path("j1.xyz")), slurp(path("j2.xyz")));

  const std::string before = slurp(path("t.xyz"));
  EXPECT_EQ(run_cli({"perturb", path("t.xyz"), path("t.xyz"), "kind=scale", "factor=2"}).code, 2);
  EXPECT_EQ(run_cli({"perturb", path("t.xyz"), path("x.xyz"), "kind=scale", "factor=0"}).code, 2);
  EXPECT_EQ(run_cli({"perturb", path("t.xyz"), path("x.xyz"), "kind=jitter", "fraction=2"}).code, 2);
  EXPECT_EQ(slurp(path("t.xyz")), before);
}

TEST_F(CliTest, Eval) {
  make_database();
  ASSERT_EQ(run_cli({"index", path("db"), path("db.idx")}).code, 0);
  fs::create_directories(dir_ / "queries");
  std::ofstream gt(path("gt.csv"));
  gt << "query_id,positive_id\n";
  for (const auto& entry : fs::directory_iterator(dir_ / "db")) {
    const std::string id = entry.path().stem().string();
    fs::copy_file(entry.path(), dir_ / "queries" / entry.path().filename());
    gt << id << ',' << id << '\n';
  }
  gt.close();

  const auto single = run_cli({"eval", path("db.idx"), path("queries"), path("gt.csv"), "--n", "1"});
  ASSERT_EQ(single.code, 0) << single.err;
  EXPECT_EQ(single.out, "N,recall\n1,100.0\n1%,100.0\n");

  const auto curve = run_cli({"eval", path("db.idx"), path("queries"), path("gt.csv"), "--n", "1..10"});
  ASSERT_EQ(curve.code, 0) << curve.err;
  const auto rows = lines_of(curve.out);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[11].rfind("1%,", 0), 0u);
  double last = 0.0;
  for (std::size_t i = 1; i <= 10; ++i) {
    const double r = std::stod(rows[i].substr(rows[i].find(',') + 1));
    EXPECT_GE(r, last);
    last = r;
  }

  EXPECT_EQ(run_cli({"eval", path("db.idx"), path("queries"), path("gt.csv"), "--n", "11"}).code, 2);
  fs::create_directories(dir_ / "empty");
  EXPECT_EQ(run_cli({"eval", path("db.idx"), path("empty"), path("gt.csv")}).code, 2);

  std::ofstream(path("partial.csv")) << "sphere0,sphere0\n";
  const auto missing = run_cli({"eval", path("db.idx"), path("queries"), path("partial.csv"), "--n", "1"});
  EXPECT_EQ(missing.code, 3);
  EXPECT_NE(missing.err.find("torus1"), std::string::npos);
}

TEST_F(CliTest, DiagramOfUnitSquare) {
  std::ofstream(path("square.xyz")) << "0 0 0\n1 0 0\n1 1 0\n0 1 0\n";
  const auto r = run_cli({"diagram", path("square.xyz"), "--backend", "rips", "--no-normalize"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines_of(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "dim,birth,death");
  EXPECT_NE(r.out.find("0,0,inf"), std::string::npos);
  EXPECT_NE(r.out.find("1,1,1.4142135623730951"), std::string::npos);
}

TEST_F(CliTest, ConfigFileDrivesPipeline) {
  std::ofstream(path("square.xyz")) << "0 0 0\n1 0 0\n1 1 0\n0 1 0\n";
  std::ofstream(path("rips.cfg")) << "backend=rips\nnormalize=false\n";
  const auto from_file = run_cli({"diagram", path("square.xyz"), "--config", path("rips.cfg")});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_NE(from_file.out.find("1,1,1.4142135623730951"), std::string::npos);

  std::ofstream(path("pyramid.xyz")) << "0 0 0\n1 0 0\n1 1 0\n0 1 0\n0.5 0.5 1\n";
  const auto alpha = run_cli({"diagram", path("pyramid.xyz"), "--no-normalize"});
  const auto rips = run_cli({"diagram", path("pyramid.xyz"), "--config", path("rips.cfg")});
  const auto flag_wins = run_cli({"diagram", path("pyramid.xyz"), "--config", path("rips.cfg"), "--backend", "alpha"});
  ASSERT_EQ(alpha.code, 0) << alpha.err;
  ASSERT_EQ(rips.code, 0) << rips.err;
  ASSERT_EQ(flag_wins.code, 0) << flag_wins.err;
  EXPECT_NE(alpha.out, rips.out);
  EXPECT_EQ(flag_wins.out, alpha.out);
}
