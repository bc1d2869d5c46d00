#include "bsvem/cli.hpp"
#include "bsvem/mesh.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bsvem");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = bsvem::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  EXPECT_TRUE(code == 0 || code == 1 || code == 2) << code;
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("bsvem_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, MeshWritesValidMesh) {
  const auto path = dir_ / "disc.bsm";
  const auto r = run({"mesh", "--h", "0.25", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = bsvem::mesh::load_mesh(path);
  EXPECT_EQ(m.num_elements(), 60);
  EXPECT_TRUE(bsvem::mesh::validate_mesh(m, bsvem::geometry::unit_disc(), 0.05, 0.05).passed);
  EXPECT_TRUE(fs::exists(path.string() + ".config.echo"));
}

TEST_F(Cli, MeshRejectsBadParameters) {
  EXPECT_EQ(run({"mesh", "--h", "3", "--out", (dir_ / "a.bsm").string()}).code, 2);
  EXPECT_EQ(run({"mesh", "--h", "0.25", "--eps", "0.9", "--out", (dir_ / "b.bsm").string()}).code, 2);
  EXPECT_EQ(run({"mesh", "--h", "-1"}).code, 2);
  EXPECT_EQ(run({"mesh", "--bogus", "1"}).code, 2);
  EXPECT_EQ(run({"mesh", "--h", "abc"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, EllipticConstantPreset) {
  const auto mesh = dir_ / "m.bsm";
  ASSERT_EQ(run({"mesh", "--h", "0.25", "--out", mesh.string()}).code, 0);
  const auto out = dir_ / "ell";
  const auto r = run({"solve-elliptic", "--mesh", mesh.string(), "--preset", "constant", "--alpha", "1.5", "--beta",
                      "0.5", "--c1", "-3", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = key_values(slurp(out / "errors.txt"));
  EXPECT_LE(std::stod(kv.at("l2")), 1e-9);
  EXPECT_LE(std::stod(kv.at("linf")), 1e-9);
  EXPECT_EQ(slurp(out / "bulk.csv").substr(0, 21), "node_index,x,y,value\n");
  EXPECT_TRUE(fs::exists(out / "surface.csv"));
}

TEST_F(Cli, EllipticErrors) {
  EXPECT_EQ(run({"solve-elliptic", "--mesh", (dir_ / "missing.bsm").string(), "--out", dir_.string()}).code, 1);
  const auto mesh = dir_ / "m.bsm";
  ASSERT_EQ(run({"mesh", "--h", "0.5", "--out", mesh.string()}).code, 0);
  EXPECT_EQ(run({"solve-elliptic", "--mesh", mesh.string(), "--alpha", "0", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"solve-elliptic", "--mesh", mesh.string(), "--preset", "sine", "--out", dir_.string()}).code, 2);
}

TEST_F(Cli, ParabolicErrors) {
  EXPECT_EQ(run({"solve-parabolic", "--h", "0.5", "--tau", "0", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"solve-parabolic", "--h", "0.5", "--tau", "-1", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"convergence", "--levels", "1", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"convergence", "--experiment", "heat", "--out", dir_.string()}).code, 2);
}

TEST_F(Cli, WavePinningSummary) {
  const auto out = dir_ / "wp";
  const auto r = run({"solve-parabolic", "--h", "0.25", "--preset", "wavepin", "--T", "0.1", "--snap-every", "25",
                      "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out / "summary.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,mass,bulk_min,bulk_max,surf_min,surf_max");
  double prev_t = -1.0, m0 = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string t, mass;
    std::getline(ls, t, ',');
    std::getline(ls, mass, ',');
    EXPECT_GT(std::stod(t), prev_t);
    prev_t = std::stod(t);
    if (rows++ == 0) m0 = std::stod(mass);
    EXPECT_LE(std::abs(std::stod(mass) - m0), 1e-9 * std::abs(m0));
  }
  EXPECT_EQ(rows, 51);
  EXPECT_FALSE(fs::is_empty(out / "snapshots"));
  const auto kv = key_values(slurp(out / "config.echo"));
  EXPECT_DOUBLE_EQ(std::stod(kv.at("T")), 0.1);
  EXPECT_DOUBLE_EQ(std::stod(kv.at("tau")), 2e-3);
}

TEST_F(Cli, ConfigEchoReproducesRun) {
  const auto mesh = dir_ / "m.bsm";
  ASSERT_EQ(run({"mesh", "--h", "0.25", "--out", mesh.string()}).code, 0);
  const auto a = dir_ / "a";
  ASSERT_EQ(run({"solve-elliptic", "--mesh", mesh.string(), "--alpha", "1.25", "--beta", "3", "--deterministic",
                 "--out", a.string()})
                .code,
            0);
  const auto b = dir_ / "b";
  const auto r = run({"solve-elliptic", "--config", (a / "config.echo").string(), "--out", b.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(a / "bulk.csv"), slurp(b / "bulk.csv"));
  EXPECT_EQ(slurp(a / "surface.csv"), slurp(b / "surface.csv"));
  EXPECT_EQ(slurp(a / "errors.txt"), slurp(b / "errors.txt"));
}

TEST_F(Cli, ConfigFileErrors) {
  EXPECT_EQ(run({"mesh", "--config", (dir_ / "none.cfg").string()}).code, 1);
  std::ofstream(dir_ / "bad.cfg") << "h 0.25\n";
  EXPECT_EQ(run({"mesh", "--config", (dir_ / "bad.cfg").string()}).code, 1);
  std::ofstream(dir_ / "ok.cfg") << "# spacing\nh = 0.5\nout = " << (dir_ / "c.bsm").string() << "\n";
  EXPECT_EQ(run({"mesh", "--config", (dir_ / "ok.cfg").string()}).code, 0);
  EXPECT_EQ(bsvem::mesh::load_mesh(dir_ / "c.bsm").num_elements(), 16);
}

TEST_F(Cli, ConvergenceCsv) {
  const auto r = run({"convergence", "--levels", "2", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir_ / "convergence.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "h,tau,l2_err,l2_eoc,linf_err,linf_eoc,n_elements,n_boundary_elements,cond_estimate");
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string exe = BSVEM_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("--help"), 0);
  EXPECT_EQ(status("mesh --h 0.5 --out " + (dir_ / "x.bsm").string()), 0);
  EXPECT_EQ(status("mesh --h 3"), 2);
  EXPECT_EQ(status("solve-elliptic --mesh " + (dir_ / "nothing.bsm").string()), 1);
}
