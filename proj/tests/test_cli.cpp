#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmdscan/cli.hpp"

namespace fs = std::filesystem;
using mmdscan::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mmdscan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mmdscan-cli-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
  std::string read(const std::string& name) const {
    std::ifstream in(path / name);
    return {std::istreambuf_iterator<char>(in), {}};
  }
};

const std::string kConfigDir = MMDSCAN_CONFIG_DIR;

}  // namespace

TEST_CASE("bound prints the sample size first") {
  const Outcome r = invoke({"bound", "--case", "ref-s1", "--k", "1", "--mmd2", "0.5", "--eta", "0.1",
                            "--n", "100"});
  CHECK(r.code == 0);
  CHECK(r.out.starts_with("487\n"));
  CHECK(r.err.empty());

  CHECK(invoke({"bound", "--case", "ref-unknown-s", "--mmd2", "0.5", "--n", "100", "--delta", "0.7"})
            .code == 1);
  CHECK(invoke({"bound", "--case", "nope", "--mmd2", "0.5", "--n", "100"}).code == 1);
}

TEST_CASE("detect on the constant toy") {
  TempDir dir;
  const std::string input = dir.write("toy.csv", "id:calm,0,0,0\nid:shifted,5,5,5\n");
  const std::string ref = dir.write("ref.csv", "0,0,0\n");
  const Outcome r = invoke({"detect", "--input", input, "--reference", ref, "--mode", "argmax"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["flagged"] == nlohmann::json::array({2}));
  CHECK(j["flagged_ids"] == nlohmann::json::array({"shifted"}));
  CHECK(j["scenario"] == "reference");
  CHECK(j["scores"][0] == 0.0);
  CHECK(j["threshold"].is_null());

  const Outcome thr = invoke({"detect", "--input", input, "--reference", ref, "--mode", "threshold",
                              "--output", (dir.path / "out.json").string()});
  REQUIRE(thr.code == 0);
  CHECK(thr.out.empty());
  const auto jt = nlohmann::json::parse(dir.read("out.json"));
  CHECK(jt["flagged"] == nlohmann::json::array({2}));
  CHECK(jt["threshold"].get<double>() == doctest::Approx(std::pow(std::log(2.0), -0.7)));
}

TEST_CASE("detect without a reference") {
  TempDir dir;
  const std::string input =
      dir.write("loo.csv", "0,0,0,0\n0,0,0,0\n0,0,0,0\n3,3,3,3\n0,0,0,0\n0,0,0,0\n");
  const Outcome r = invoke({"detect", "--input", input, "--mode", "top-s", "--s", "1",
                            "--subsample-l", "auto", "--seed", "3"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["scenario"] == "loo");
  CHECK(j["flagged"] == nlohmann::json::array({4}));
  CHECK(j["subsample_l"] == 3);
  CHECK(invoke({"detect", "--input", input, "--mode", "top-s", "--s", "1", "--subsample-l", "auto",
                "--seed", "3"})
            .out == r.out);
}

TEST_CASE("exit codes") {
  TempDir dir;
  const std::string ragged = dir.write("ragged.csv", "1,2,3,4\n1,2,3,4,5\n");
  const Outcome bad = invoke({"detect", "--input", ragged});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line 2") != std::string::npos);
  CHECK(bad.out.empty());

  CHECK(invoke({"detect", "--input", (dir.path / "missing.csv").string()}).code == 1);
  CHECK(invoke({"detect", "--bogus-flag"}).code == 1);
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);

  const std::string ok = dir.write("ok.csv", "0,0\n1,1\n");
  CHECK(invoke({"detect", "--input", ok, "--delta", "-1", "--mode", "threshold"}).code == 1);
  CHECK(invoke({"detect", "--input", ok, "--sigma", "0"}).code == 1);
  CHECK(invoke({"detect", "--input", ok, "--output", "/nonexistent-dir/x.json"}).code == 2);

  const Outcome help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("detect") != std::string::npos);
}

TEST_CASE("version") {
  const Outcome r = invoke({"version"});
  CHECK(r.code == 0);
  CHECK(r.out == "mmdscan 1.0.0\nconfig-grammar 1\n");
}

TEST_CASE("simulate is byte-identical for a fixed seed") {
  TempDir dir;
  const std::string cfg = kConfigDir + "/fig2.cfg";
  const Outcome a = invoke({"simulate", "--config", cfg, "--seed", "7"});
  const Outcome b = invoke({"simulate", "--config", cfg, "--seed", "7"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.starts_with("x,error_rate,stderr,trials\n10,"));
  CHECK(invoke({"simulate", "--config", cfg, "--seed", "8"}).out != a.out);

  const std::string small = dir.write(
      "multi.cfg", "n = 10\ns = 1, 2\nm = 4, 8\ntrials = 20\nmode = top-s\n");
  CHECK(invoke({"simulate", "--config", small}).code == 1);
  const std::string csv = (dir.path / "curve.csv").string();
  REQUIRE(invoke({"simulate", "--config", small, "--output", csv}).code == 0);
  CHECK(fs::exists(dir.path / "curve-n10-s1.csv"));
  CHECK(fs::exists(dir.path / "curve-n10-s2.csv"));
  const auto meta = nlohmann::json::parse(dir.read("curve.csv.json"));
  CHECK(meta["series"].size() == 2);
  CHECK(meta["spec"]["s"] == nlohmann::json::array({1, 2}));
  CHECK(meta["series"][0]["points"][0].contains("precision"));
  CHECK(meta["series"][0]["csv"] == (dir.path / "curve-n10-s1.csv").string());

  const std::string broken = dir.write("broken.cfg", "m = 4\nnonsense\n");
  const Outcome e = invoke({"simulate", "--config", broken});
  CHECK(e.code == 1);
  CHECK(e.err.find("line 2") != std::string::npos);
}
