#include <gtest/gtest.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "perisem/cli/app.hpp"
#include "perisem/cli/config.hpp"
#include "perisem/errors.hpp"
#include "perisem/estimator.hpp"

namespace perisem::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() /
            ("perisem_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write_config(const std::string& text, const std::string& name = "run.cfg") {
    const fs::path p = root_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  fs::path root_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

ExperimentConfig parse(const std::string& text, const fs::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

TEST(ConfigTest, ListsAndDefaults) {
  const auto cfg = parse(
      "# sweep\nsignal = sine\nn = 200\nn = 1000\nrho = 0.05\nrho = 0.2  # trailing\n"
      "sigma_mode = known\nsigma_mode = estimated\njump_law = gaussian\nseed = 42\n");
  EXPECT_EQ(cfg.n, (std::vector<std::size_t>{200, 1000}));
  EXPECT_EQ(cfg.rho, (std::vector<double>{0.05, 0.2}));
  ASSERT_EQ(cfg.sigma_modes.size(), 2u);
  EXPECT_EQ(cfg.noise.jump_law(), JumpLaw::kStandardGaussian);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.replicates, 1000u);
  ASSERT_TRUE(cfg.signal);
  EXPECT_EQ(cfg.signal->name(), "sine");

  const auto d = parse("n = 10\n");
  EXPECT_EQ(d.rho, (std::vector<double>{0.1}));
  EXPECT_EQ(d.sigma_modes, (std::vector<SigmaMode>{SigmaMode::kEstimated}));
  EXPECT_FALSE(d.signal);
}

TEST(ConfigTest, KnownSigmaDefaultsToSigmaStar) {
  const auto cfg = parse("n = 10\nrho1 = 0.5\nrho2 = 2\nlambda = 0.25\n");
  EXPECT_EQ(cfg.selection(0.1, SigmaMode::kKnown).known_sigma(), 1.25);
  const auto set = parse("n = 10\nsigma = 3\n");
  EXPECT_EQ(set.selection(0.1, SigmaMode::kKnown).known_sigma(), 3.0);
}

TEST(ConfigTest, Rejections) {
  for (const char* text :
       {"n = 10\nrho = 0.4\n", "n = 10\nbogus = 1\n", "n = 10\nseed = 1\nseed = 2\n", "rho = 0.1\n",
        "n = 10\nrho1 = 0\nrho2 = 0\n", "n = 10\nlambda = -1\n", "n = 10\nepsilon = 0\n",
        "n = 3\n", "n = ten\n", "n = 10\nsignal = no-such-signal\n", "n = 10\njump_law = cauchy\n",
        "n = 10\nepsilon = 0.0001\n", "n\n", "n = 10\npath_steps_per_unit = 4\n"}) {
    try {
      parse(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig) << text;
    }
  }
  // Known mode alone allows tiny horizons.
  EXPECT_NO_THROW(parse("n = 3\nsigma_mode = known\n"));
}

TEST_F(CliTest, CoefficientFileResolvesAgainstConfigDir) {
  std::ofstream(root_ / "coef.txt") << "# j value\n2 1.0\n5 0.3\n";
  const auto cfg = load_config(write_config("signal = coef.txt\nn = 10\n"));
  ASSERT_TRUE(cfg.signal);
  EXPECT_TRUE(cfg.signal->is_coefficient_form());
  EXPECT_EQ(cfg.signal->as_coefficients()->theta[4], 0.3);
}

TEST_F(CliTest, SimulateWritesOneFilePerReplicate) {
  const auto cfg = write_config("signal = two-mode\nn = 10\nreplicates = 1\nseed = 7\n");
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (root_ / "a").string()}), kExitOk)
      << err_.str();
  EXPECT_EQ(line_count(root_ / "a" / "estimates_r0.csv"), 11u);
  EXPECT_TRUE(fs::exists(root_ / "a" / "jumps_r0.csv"));
  EXPECT_FALSE(fs::exists(root_ / "a" / "estimates_r1.csv"));

  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (root_ / "b").string()}), kExitOk);
  EXPECT_EQ(slurp(root_ / "a" / "estimates_r0.csv"), slurp(root_ / "b" / "estimates_r0.csv"));
  EXPECT_EQ(slurp(root_ / "a" / "jumps_r0.csv"), slurp(root_ / "b" / "jumps_r0.csv"));

  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (root_ / "c").string(), "--seed",
                 "8"}),
            kExitOk);
  EXPECT_NE(slurp(root_ / "a" / "estimates_r0.csv"), slurp(root_ / "c" / "estimates_r0.csv"));
}

TEST_F(CliTest, SimulateSeveralHorizonsUsesSubdirectories) {
  const auto cfg = write_config("signal = sine\nn = 6\nn = 8\nreplicates = 2\n");
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (root_ / "o").string()}), kExitOk);
  EXPECT_EQ(line_count(root_ / "o" / "n6" / "estimates_r1.csv"), 7u);
  EXPECT_EQ(line_count(root_ / "o" / "n8" / "estimates_r0.csv"), 9u);
}

TEST_F(CliTest, InvalidConfigWritesNothing) {
  const auto cfg = write_config("signal = sine\nn = 10\nrho = 0.5\n");
  const fs::path out = root_ / "never";
  EXPECT_EQ(run({"simulate", "--config", cfg.string(), "--out", out.string()}), kExitError);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(err_.str().find("rho"), std::string::npos);

  EXPECT_EQ(run({"verify", "--config", (root_ / "missing.cfg").string()}), kExitError);
  EXPECT_EQ(run({"frobnicate"}), kExitError);
  EXPECT_EQ(run({"simulate"}), kExitError);
}

TEST_F(CliTest, SelectSingleMemberGridAndRhoSweep) {
  const auto cfg = write_config(
      "signal = single-mode\nn = 40\nk_star = 1\nepsilon = 1\nreplicates = 1\n"
      "rho = 0.05\nrho = 0.1\nrho = 0.2\n");
  ASSERT_EQ(run({"select", "--config", cfg.string(), "--out", (root_ / "s").string()}), kExitOk)
      << err_.str();
  const fs::path summary = root_ / "s" / "selection_summary.csv";
  EXPECT_EQ(line_count(summary), 4u);
  std::istringstream lines(slurp(summary));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "n,rho,sigma_mode,replicate,beta,t,support,sigma_used,cost");
  while (std::getline(lines, line)) EXPECT_NE(line.find(",estimated,0,1,1,"), std::string::npos) << line;
  EXPECT_TRUE(fs::exists(root_ / "s" / "selection" / "n40_rho0.1_estimated_r0.json"));

  ASSERT_EQ(run({"select", "--config", cfg.string(), "--out", (root_ / "t").string()}), kExitOk);
  EXPECT_EQ(slurp(summary), slurp(root_ / "t" / "selection_summary.csv"));
}

TEST_F(CliTest, VerifyWritesReportsAndSeries) {
  const auto cfg = write_config(
      "signal = sine\nn = 50\nn = 100\nreplicates = 100\nsigma_mode = known\n"
      "sigma_mode = estimated\nplot_data = true\nseed = 3\n");
  ASSERT_EQ(run({"verify", "--config", cfg.string(), "--out", (root_ / "v").string(), "--threads",
                 "2"}),
            kExitOk)
      << err_.str();
  EXPECT_EQ(line_count(root_ / "v" / "oracle_report.csv"), 5u);
  EXPECT_EQ(line_count(root_ / "v" / "dn_series.csv"), 3u);
  EXPECT_TRUE(fs::exists(root_ / "v" / "reports" / "n100_rho0.1_known.json"));
  const std::string report = slurp(root_ / "v" / "oracle_report.csv");
  EXPECT_EQ(report.find("false"), std::string::npos);

  // Thread count never changes the output.
  ASSERT_EQ(run({"verify", "--config", cfg.string(), "--out", (root_ / "w").string(), "--threads",
                 "1"}),
            kExitOk);
  EXPECT_EQ(report, slurp(root_ / "w" / "oracle_report.csv"));
  EXPECT_EQ(slurp(root_ / "v" / "reports" / "n50_rho0.1_estimated.json"),
            slurp(root_ / "w" / "reports" / "n50_rho0.1_estimated.json"));
}

TEST_F(CliTest, VerifyNeedsEnoughReplicates) {
  const auto cfg = write_config("signal = sine\nn = 50\nreplicates = 99\n");
  EXPECT_EQ(run({"verify", "--config", cfg.string(), "--out", (root_ / "v").string()}), kExitError);
  EXPECT_FALSE(fs::exists(root_ / "v"));
}

TEST_F(CliTest, GridDump) {
  const auto cfg = write_config("n = 1000\nn = 100\n");
  ASSERT_EQ(run({"grid-dump", "--config", cfg.string(), "--out", (root_ / "g").string()}), kExitOk);
  EXPECT_EQ(line_count(root_ / "g" / "grid_n1000.csv"), 142u);
  EXPECT_TRUE(fs::exists(root_ / "g" / "grid_n100.csv"));
  EXPECT_NE(err_.str().find("dropped"), std::string::npos);
}

TEST_F(CliTest, IngestJoinsSegments) {
  const auto cfg = write_config(
      "signal = sine\nn = 3\nreplicates = 1\npath_steps_per_unit = 100\nsigma_mode = known\n");
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (root_ / "p").string()}), kExitOk)
      << err_.str();
  const fs::path segs = root_ / "p" / "segments_r0";
  ASSERT_TRUE(fs::exists(segs / "segment_00002.csv"));
  ASSERT_EQ(run({"ingest", segs.string(), "--out", (root_ / "joined").string()}), kExitOk)
      << err_.str();
  EXPECT_EQ(line_count(root_ / "joined" / "path.csv"), 301u);

  // Splitting the joined path reproduces every segment file.
  std::ifstream in(root_ / "joined" / "path.csv");
  const auto parts = split_path(read_path_csv(in));
  ASSERT_EQ(parts.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    std::ostringstream s;
    write_path_csv(s, parts[k]);
    EXPECT_EQ(s.str(), slurp(segs / ("segment_0000" + std::to_string(k) + ".csv")));
  }
}

TEST_F(CliTest, IngestErrors) {
  fs::create_directories(root_ / "empty");
  EXPECT_EQ(run({"ingest", (root_ / "empty").string(), "--out", (root_ / "o").string()}),
            kExitError);
  fs::create_directories(root_ / "mixed");
  std::ofstream(root_ / "mixed" / "a.csv") << "cell,t_end,dy\n0,0.5,1\n1,1,2\n";
  std::ofstream(root_ / "mixed" / "b.csv") << "cell,t_end,dy\n0,0.25,1\n1,0.5,1\n2,0.75,1\n3,1,1\n";
  EXPECT_EQ(run({"ingest", (root_ / "mixed").string(), "--out", (root_ / "o").string()}),
            kExitError);
  EXPECT_EQ(run({"ingest", (root_ / "nowhere").string(), "--out", (root_ / "o").string()}),
            kExitError);
}

#ifdef PERISEM_CLI_PATH
// Exit status contract through the real executable.
TEST_F(CliTest, ExecutableExitCodes) {
  const auto good = write_config("signal = sine\nn = 20\nreplicates = 1\n");
  const auto bad = write_config("signal = sine\nn = 20\nrho = 1\n", "bad.cfg");
  const std::string exe = PERISEM_CLI_PATH;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("simulate --config " + good.string() + " --out " + (root_ / "x").string()), 0);
  EXPECT_EQ(status("simulate --config " + bad.string() + " --out " + (root_ / "y").string()), 2);
  EXPECT_EQ(status("--help"), 0);
  setenv("PERISEM_THREADS", "many", 1);
  EXPECT_EQ(status("simulate --config " + good.string() + " --out " + (root_ / "z").string()), 2);
  unsetenv("PERISEM_THREADS");
}
#endif

}  // namespace
}  // namespace perisem::cli
