#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>

#include <gtest/gtest.h>

#include "itersolve/io.hpp"
#include "test_support.hpp"

using namespace itersolve;
using namespace itersolve::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / ("itersolve_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args) {
  const auto err_path = scratch_dir() / "stderr.txt";
  const std::string cmd = std::string(ITERSOLVE_CLI) + " " + args + " 2>" + err_path.string();
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "", "popen failed"};
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int raw = ::pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out, io::read_file(err_path.string())};
}

std::string fx(const std::string& name) { return kFixtures + "/" + name; }

// Value printed after "key:" on its own report line.
std::string field(const std::string& out, const std::string& key) {
  std::smatch m;
  if (std::regex_search(out, m, std::regex("(^|\\n)" + key + ":\\s+([^\\n]*)"))) return m[2];
  return "";
}

}  // namespace

TEST(Cli, SolveWorkedExampleWithJacobi) {
  const auto r = run("solve " + fx("worked3x3.mat") + " " + fx("worked3x3.rhs") + " --method jacobi --eta 1e-8");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(field(r.out, "method"), "jacobi");
  EXPECT_EQ(field(r.out, "converged"), "yes");
  std::regex entry(R"(x\[(\d)\] = (\S+))");
  Vector x(3);
  int found = 0;
  for (auto it = std::sregex_iterator(r.out.begin(), r.out.end(), entry); it != std::sregex_iterator(); ++it) {
    x[std::stoul((*it)[1])] = std::stod((*it)[2]);
    ++found;
  }
  ASSERT_EQ(found, 3);
  EXPECT_LT(max_abs_diff(x, Vector{0.293532, 0.383085, -0.567164}), 1e-6);
}

TEST(Cli, ZeroDiagonalIsNumericalFailure) {
  const auto dir = scratch_dir();
  io::write_file((dir / "zd.mat").string(), "dense 2 2\n1 2\n3 0\n");
  io::write_file((dir / "zd.rhs").string(), "1\n1\n");
  for (const std::string method : {"auto", "jacobi"}) {
    const auto r = run("solve " + (dir / "zd.mat").string() + " " + (dir / "zd.rhs").string() + " --method " + method);
    EXPECT_EQ(r.status, 2) << method;
    EXPECT_NE(r.err.find("row 1"), std::string::npos) << r.err;
  }
}

TEST(Cli, NoConvergentMethodIsNumericalFailure) {
  const auto dir = scratch_dir();
  io::write_file((dir / "bad.mat").string(), "dense 2 2\n1 2\n2 1\n");
  io::write_file((dir / "bad.rhs").string(), "1\n1\n");
  const auto r = run("solve " + (dir / "bad.mat").string() + " " + (dir / "bad.rhs").string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("no convergent stationary method"), std::string::npos);
  const auto forced = run("solve " + (dir / "bad.mat").string() + " " + (dir / "bad.rhs").string() + " --method jacobi");
  EXPECT_EQ(forced.status, 2);
  EXPECT_NE(forced.err.find("diverged"), std::string::npos);
}

TEST(Cli, HistoryCsv) {
  const auto path = (scratch_dir() / "hist.csv").string();
  const auto r = run("solve " + fx("worked3x3.mat") + " " + fx("worked3x3.rhs") + " --method gauss-seidel --eta 1e-6 --history " + path);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto text = io::read_file(path);
  EXPECT_EQ(text.rfind("iteration,residual_norm\n0,", 0), 0u);
}

TEST(Cli, AnalyzeJsonKeys) {
  const auto r = run("analyze " + fx("worked3x3.mat") + " --json");
  ASSERT_EQ(r.status, 0) << r.err;
  for (const char* key : {"\"size\"", "\"symmetric\"", "\"positive_definite\"", "\"row_dominance\"",
                          "\"spectral_radius\"", "\"omega_star\"", "\"recommendation\"", "\"convergence_basis\""}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
  const auto text = run("analyze " + fx("worked3x3.mat"));
  EXPECT_EQ(text.status, 0);
  EXPECT_EQ(field(text.out, "symmetric"), "no");
}

TEST(Cli, TrafficSolveSelectsSorAndOverridesKeepRatios) {
  const auto base = "traffic solve --aadt " + fx("aadt_synthetic.csv") + " --eta 0.001";
  const auto r = run(base);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(field(r.out, "method").rfind("sor", 0), 0u);
  EXPECT_NEAR(std::stod(field(r.out, "omega\\*")), 1.8215, 1e-4);

  const auto iters = [&](const std::string& m) {
    const auto o = run(base + " --method " + m);
    EXPECT_EQ(o.status, 0) << o.err;
    return std::stod(field(o.out, "iterations"));
  };
  const double kj = iters("jacobi"), kg = iters("gauss-seidel"), ks = iters("sor");
  EXPECT_EQ(ks, std::stod(field(r.out, "iterations")));
  EXPECT_GE(kj / ks, 30.0);
  EXPECT_LE(kj / ks, 50.0);
  EXPECT_GE(kj / kg, 1.8);
  EXPECT_LE(kj / kg, 2.8);
}

TEST(Cli, TrafficSolveWritesSegments) {
  const auto path = (scratch_dir() / "segments.csv").string();
  const auto r = run("traffic solve " + fx("six_junction.net") + " --eta 1e-9 --out " + path);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto csv = io::read_file(path);
  EXPECT_EQ(csv.rfind("segment,from_exit,to_exit,flow\n0,A,F,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Cli, TrafficClosureAndWarning) {
  const auto r = run("traffic solve --aadt " + fx("aadt_synthetic.csv") + " --close-exit 5 --close-exit 6");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(field(r.out, "exits"), "30");
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  const auto bad = run("traffic solve --aadt " + fx("aadt_synthetic.csv") + " --close-exit 99");
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.err.find("'99'"), std::string::npos);
}

TEST(Cli, TrafficGenerateRoundTrip) {
  const auto path = (scratch_dir() / "ring.net").string();
  const auto r = run("traffic generate --exits 32 --aadt " + fx("aadt_synthetic.csv") + " --out " + path);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto net = io::parse_network(io::read_file(path));
  EXPECT_EQ(net, traffic::generate_ring(io::parse_aadt(io::read_file(fx("aadt_synthetic.csv")))));
  EXPECT_EQ(run("traffic generate --exits 31 --aadt " + fx("aadt_synthetic.csv") + " --out " + path).status, 1);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("solve " + fx("worked3x3.mat")).status, 1);
  EXPECT_EQ(run("solve " + fx("worked3x3.mat") + " " + fx("worked3x3.rhs") + " --method newton").status, 1);
  EXPECT_EQ(run("solve " + fx("worked3x3.mat") + " " + fx("worked3x3.rhs") + " --method sor --omega 2.5").status, 1);
  EXPECT_EQ(run("solve " + fx("missing.mat") + " " + fx("worked3x3.rhs")).status, 1);
  EXPECT_EQ(run("traffic solve").status, 1);
}

TEST(Cli, DeterministicOutput) {
  const auto args = "traffic solve --aadt " + fx("aadt_synthetic.csv");
  const auto a = run(args), b = run(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(field(a.out, "wall time \\(s\\)"), "");
  EXPECT_NE(field(run(args + " --timing").out, "wall time \\(s\\)"), "");
  const auto s = "solve " + fx("worked3x3.mat") + " " + fx("worked3x3.rhs");
  EXPECT_EQ(run(s).out, run(s).out);
}
