#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "curvlab/cli.hpp"
#include "curvlab/field_io.hpp"
#include "curvlab/samples.hpp"
#include "doctest.h"
#include "json.hpp"
#include "manifest.hpp"

using namespace curvlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("curvlab_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

nlohmann::json manifest_at(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("constants row for n = 5") {
  TempDir dir;
  const auto r = run({"constants", "--n", "5", "--out-dir", dir.path.string()});
  CHECK(r.code == 0);
  const std::string table = slurp(dir / "constants.csv");
  CHECK(table.find("\n5,64,128,44,5120,true,") != std::string::npos);
  const auto range = run({"constants", "--n-range", "5:64", "--out-dir", dir.path.string()});
  CHECK(range.code == 0);
  const std::string big = slurp(dir / "constants.csv");
  CHECK(std::count(big.begin(), big.end(), '\n') == 61);
}

TEST_CASE("gradient of a flat preset is zero") {
  TempDir dir;
  const auto r = run({"gradient", "--builtin", "flat3", "--t", "0.0", "--out-dir", dir.path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("residual sup |G|_g 0,") != std::string::npos);
  const auto m = manifest_at(dir / "manifest.json");
  CHECK(m["result"]["sup_norm"] == 0.0);
  CHECK(m["exit_code"] == 0);
  const auto G = tensor_from(load_field(dir / "gradient.csv"));
  for (double v : G.raw()) CHECK(v == 0.0);
}

TEST_CASE("closed-form presets") {
  TempDir dir;
  auto coefficient = [&](const std::string& preset, const std::string& t) {
    REQUIRE(run({"gradient", "--builtin", preset, "--t", t, "--out-dir", dir.path.string()}).code == 0);
    return manifest_at(dir / "manifest.json")["result"]["coefficient"].get<double>();
  };
  CHECK(coefficient("sphere3", "0") == -2.0);
  CHECK(std::abs(coefficient("sphere3", "-1/3")) < 1e-14);
  CHECK(coefficient("hyperbolic4", "sigma") == 0.0);
  CHECK(coefficient("hyperbolic5", "sigma") == 40.0);
  const std::string out = dir.path.string();
  CHECK(run({"gradient", "--builtin", "sphere3", "--require-critical", "1e-10", "--out-dir", out}).code == 1);
  CHECK(run({"gradient", "--builtin", "sphere3", "--t", "-1/3", "--require-critical", "1e-10", "--out-dir", out})
            .code == 0);
}

TEST_CASE("ode report and artifacts") {
  TempDir dir;
  const auto r = run({"ode", "--f0", "0", "--fp0", "1", "--svg", "portrait.svg", "--out-dir", dir.path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("family: family-one") != std::string::npos);
  const auto m = manifest_at(dir / "manifest.json");
  CHECK(std::abs(m["result"]["f_max"].get<double>() - std::cbrt(6.0)) < 1e-9);
  CHECK(slurp(dir / "portrait.svg").starts_with("<svg"));
  CHECK(slurp(dir / "trajectory.csv").starts_with("r,f,fp,energy\n"));
  REQUIRE(m["outputs"].size() == 2);
  for (const auto& o : m["outputs"]) CHECK(o["sha256"] == cli::sha256_file(dir / o["path"].get<std::string>()));
}

TEST_CASE("curvature report from a metric file") {
  TempDir dir;
  const auto g = random_smooth_metric(Grid::cube(3, 8), 5, 0.1);
  save_field(dir / "g.csv", to_data(g));
  const auto r = run({"curvature", "--metric", dir / "g.csv", "--stencil", "spectral", "--ricci", "ric.csv",
                      "--out-dir", dir.path.string()});
  CHECK(r.code == 0);
  const auto m = manifest_at(dir / "manifest.json");
  CHECK(m["inputs"][0]["sha256"] == cli::sha256_file(dir / "g.csv"));
  CHECK(m["result"]["weyl_max_component"].get<double>() < 1e-12);
  CHECK(fs::exists(dir / "ric.csv"));
  const auto R = scalar_from(load_field(dir / "curvature.csv"));
  CHECK(R.max() == m["result"]["scalar_max"].get<double>());
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"ode", "--f0", "0"}).code == 2);
  CHECK(run({"ode", "--f0", "0", "--fp0", "1", "--frobnicate"}).code == 2);
  CHECK(run({"gradient", "--builtin", "nosuch", "--no-manifest"}).code == 2);
  CHECK(run({"gradient", "--builtin", "flat3", "--t", "banana", "--no-manifest"}).code == 2);
  CHECK(run({"constants", "--n", "4", "--no-manifest"}).code == 2);
  CHECK(run({"constants"}).code == 2);
  CHECK(run({"verify", "--only", "13"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--list-presets"}).out.find("hyperbolic5") != std::string::npos);
}

TEST_CASE("flow config") {
  TempDir dir;
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
  };
  const auto good = write("torus.ini",
                          "; small perturbed torus\n[start]\npreset = perturbed-flat3\npoints = 8\n"
                          "[flow]\nfunctional = 0\ntarget = ricci\npreconditioner = bilaplacian\nmax_steps = 200\n");

  SUBCASE("run and replay") {
    const std::string a = (dir.path / "a").string(), b = (dir.path / "b").string();
    const auto r1 = run({"flow", "--config", good, "--svg", "trace.svg", "--out-dir", a});
    CHECK(r1.code == 0);
    CHECK(r1.out.find("residual_reached") != std::string::npos);
    const auto m1 = manifest_at(a + "/manifest.json");
    CHECK(m1["inputs"][0]["sha256"] == cli::sha256_file(good));
    CHECK(m1["result"]["monotone"] == true);
    // replaying the recorded arguments reproduces every artifact byte for byte
    auto argv = m1["argv"].get<std::vector<std::string>>();
    for (auto& s : argv)
      if (s == a) s = b;
    CHECK(run(argv).code == 0);
    const auto m2 = manifest_at(b + "/manifest.json");
    CHECK(m1["outputs"] == m2["outputs"]);
    CHECK(m1["outputs"].size() == 3);
    const auto terminal = metric_from(load_field(a + "/flow_metric.csv"));
    CHECK(terminal.grid().points() == 8);
  }
  SUBCASE("budget exhausted exits 1") {
    const auto cfg = write("short.ini",
                           "[start]\npreset = perturbed-flat3\npoints = 8\n[flow]\nmax_steps = 1\n");
    CHECK(run({"flow", "--config", cfg, "--out-dir", dir.path.string()}).code == 1);
    CHECK(manifest_at(dir / "manifest.json")["result"]["stop"] == "max_steps");
  }
  SUBCASE("warped family") {
    const auto cfg = write("warped.ini",
                           "[start]\npreset = warped-sine3\n[flow]\nfamily = warped\npreconditioner = bilaplacian\n");
    CHECK(run({"flow", "--config", cfg, "--out-dir", dir.path.string()}).code == 0);
    CHECK(slurp(dir / "flow_metric.csv").starts_with("r,phi\n"));
  }
  SUBCASE("malformed configs") {
    for (const std::string text :
         {"[start]\npreset = flat3\n[flow]\nbogus = 1\n", "[start]\npreset = flat3\n[other]\nx = 1\n",
          "[flow]\nstep = 1e-3\n", "[start]\npreset = flat3\nfile = g.csv\n",
          "[start]\npreset = flat3\n[flow]\nstep = fast\n", "[start]\npreset = flat3\n[flow]\nstep = -1\n",
          "[start]\npreset = flat3\n[flow]\nfamily = warped\n", "[start]\npreset = sphere3\n",
          "[start]\npreset = flat3\n[flow]\nline_search = maybe\n"}) {
      CAPTURE(text);
      CHECK(run({"flow", "--config", write("bad.ini", text), "--no-manifest"}).code == 2);
    }
  }
}

TEST_CASE("verify reports failures through the exit code") {
  TempDir dir;
  const auto ok = run({"verify", "--only", "7", "8", "--out-dir", dir.path.string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS  7") != std::string::npos);
  CHECK(ok.out.find("2/2 criteria passed") != std::string::npos);
  CHECK(manifest_at(dir / "manifest.json")["result"].size() == 2);
  // the closed-ball integral estimate fails on the canonical surface
  const auto bad = run({"verify", "--only", "10", "--no-manifest"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL 10") != std::string::npos);
}
