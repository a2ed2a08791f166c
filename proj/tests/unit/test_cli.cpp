#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using moreau::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

class Scratch {
 public:
  explicit Scratch(const std::string& name) : dir_(fs::temp_directory_path() / ("moreau_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }

  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(dir_ / file) << text;
    return dir_ / file;
  }
  fs::path path(const std::string& p) const { return dir_ / p; }

 private:
  fs::path dir_;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

}  // namespace

TEST_CASE("envelope writes one csv per lambda") {
  Scratch s("envelope");
  const auto cfg = s.write("run.cfg", "function = abs\nlambda = 1\nrange_min = -3\nrange_max = 3\npoints = 61\n");
  const Result r = invoke({"envelope", "--config", cfg.string(), "--out", s.path("out").string()});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(s.path("out/envelope_0.csv"));
  CHECK(csv.rfind("x,envelope,prox\n", 0) == 0);
  CHECK(csv.find("\n2,1.5,1\n") != std::string::npos);

  const Result two = invoke({"envelope", "--config", cfg.string(), "--out", s.path("out2").string(), "--lambda", "0.5",
                             "--lambda", "2"});
  CHECK(two.code == 0);
  CHECK(fs::exists(s.path("out2/envelope_1.csv")));
  CHECK(slurp(s.path("out2/envelope_1.csv")).find("\n2,1,0\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  Scratch s("codes");
  const auto over = s.write("over.cfg", "function = neg_quad(0.5)\nlambda = 1.01\n");
  const Result r3 = invoke({"envelope", "--config", over.string(), "--out", s.path("o").string()});
  CHECK(r3.code == 3);
  CHECK(r3.err.find("lambda_phi = 1") != std::string::npos);

  const auto empty = s.write("empty.cfg", "function = abs\n");
  CHECK(invoke({"envelope", "--config", empty.string(), "--out", s.path("o").string()}).code == 2);
  CHECK(invoke({"envelope", "--config", s.write("k.cfg", "function = abs\nfrobnicate = 2\n").string()}).code == 2);
  CHECK(invoke({"envelope", "--config", s.write("f.cfg", "function = nope\nlambda = 1\n").string()}).code == 2);
  CHECK(invoke({"envelope", "--config", s.write("l.cfg", "function = abs\nlambda = -1\n").string()}).code == 2);
  CHECK(invoke({"envelope", "--config", s.path("missing.cfg").string()}).code == 2);
  CHECK(invoke({"launch"}).code == 2);
  CHECK(invoke({}).code == 2);

  // prox reports divergence in the file and still succeeds
  const Result p = invoke({"prox", "--config", over.string(), "--out", s.path("p").string()});
  CHECK(p.code == 0);
  CHECK(slurp(s.path("p/prox.csv")).find(",true,,") != std::string::npos);
}

TEST_CASE("verify flags a false minimizer claim") {
  Scratch s("fault");
  const auto cfg = s.write("run.cfg", "function = cubic\nshift_draws = 2\n");
  const Result r = invoke({"verify", "--config", cfg.string(), "--out", s.path("out").string()});
  CHECK(r.code == 1);
  const auto report = nlohmann::json::parse(slurp(s.path("out/001_minimizer-claim_cubic.json")));
  CHECK(report["passed"] == false);
  REQUIRE(report["witness"].is_array());
  CHECK(report["witness"][0].get<double>() < 0.0);
}

TEST_CASE("verify on the catalog passes, honours the schema and is reproducible") {
  Scratch s("verify");
  const auto cfg = s.write("run.cfg",
                           "function = double_well\nfunction = piecewise_min\nfunction = quad_abs_2d\n"
                           "shift_draws = 5\nseed = 3\n");
  const Result a = invoke({"verify", "--config", cfg.string(), "--out", s.path("a").string()});
  CHECK(a.code == 0);
  const Result b = invoke({"verify", "--config", cfg.string(), "--out", s.path("b").string()});
  CHECK(a.out == b.out);
  CHECK(snapshot(s.path("a")) == snapshot(s.path("b")));

  std::size_t checked = 0;
  for (const auto& e : fs::directory_iterator(s.path("a"))) {
    if (e.path().filename() == "summary.json") continue;
    const auto j = nlohmann::json::parse(slurp(e.path()));
    for (const char* key : {"theorem_id", "passed", "worst_violation", "witness", "params"}) CHECK(j.contains(key));
    CHECK(j["passed"] == true);
    CHECK(j["worst_violation"].get<double>() <= j["params"]["tolerance"].get<double>());
    ++checked;
  }
  const auto summary = nlohmann::json::parse(slurp(s.path("a/summary.json")));
  CHECK(summary["checks"].get<std::size_t>() == checked);
  CHECK(summary["failed"] == 0);

  const Result other = invoke({"verify", "--config", cfg.string(), "--out", s.path("c").string(), "--seed", "4"});
  CHECK(other.code == 0);
  CHECK(snapshot(s.path("a")) != snapshot(s.path("c")));
}

TEST_CASE("optimize writes traces and deviations") {
  Scratch s("optimize");
  const auto cfg = s.write("run.cfg", "function = quad(1)\nlambda = 0.5\nx0 = 1\nmax_iters = 20\n");
  const Result r = invoke({"optimize", "--config", cfg.string(), "--out", s.path("out").string(), "--json-summary"});
  REQUIRE(r.code == 0);
  const std::string ppm = slurp(s.path("out/ppm_0.csv"));
  CHECK(ppm.rfind("iter,x1,envelope_value\n0,1,0.5\n1,0.5,0.125\n2,0.25,", 0) == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["runs"][0]["max_deviation"].get<double>() <= 1e-8);
  CHECK(slurp(s.path("out/ppm_0.csv")) == slurp(s.path("out/gd_0.csv")));
  CHECK(fs::exists(s.path("out/deviation.csv")));
}

TEST_CASE("threshold and definition files") {
  Scratch s("threshold");
  const auto def = s.write("well.def", "expr = (x1^2-1)^2\ndim = 1\nalpha = 0\nbeta = 0\nanchor = 0\nminimizer = 1 strong 6 0.1\n");
  const auto cfg = s.write("run.cfg", "definition = " + def.string() + "\nfunction = neg_quad(2)\nlambda = 0.1\nx = 0.5\n");
  const Result t = invoke({"threshold", "--config", cfg.string(), "--json-summary"});
  REQUIRE(t.code == 0);
  const auto j = nlohmann::json::parse(t.out);
  CHECK(j[0]["function"] == "neg_quad(2)");
  CHECK(j[0]["lambda_phi"] == "0.25");
  CHECK(j[1]["function"] == "well");
  CHECK(j[1]["lambda_phi"] == "inf");
  CHECK(j[1]["certificate"] == "sampled");

  const Result p = invoke({"prox", "--config", cfg.string(), "--out", s.path("p").string()});
  CHECK(p.code == 0);
  const std::string csv = slurp(s.path("p/prox.csv"));
  CHECK(csv.find("well,0.10000000000000001,0.5,false,") != std::string::npos);
}
