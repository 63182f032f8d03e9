#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "isotri/verify.hpp"

using namespace isotri;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ISOTRI_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (const auto n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string config(const std::string& name) { return std::string(ISOTRI_CONFIGS) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = std::string(ISOTRI_SCRATCH) + "/" + name;
  std::ofstream(path) << text;
  return path;
}

std::string pointer_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

const char* polynomial_example_text = R"({
  "curve": {"m": 2, "n": 1, "N": 2, "p": 2, "a": [[0, 0], [1, 0]]},
  "theta": [0.25, 0.25],
  "mode": "polynomial",
  "coefficients": [[1, 0]]
})";

}  // namespace

TEST_CASE("minimal polynomial example config") {
  const auto job = parse_config(std::string(polynomial_example_text));
  CHECK(job.mode == BuildMode::Polynomial);
  CHECK(job.coeffs.curve.N() == 2);
  CHECK(std::abs(job.coeffs.B[0](0, 1) - 0.5) < 1e-10);
  CHECK(std::abs(job.coeffs.B[1](0, 1) + 0.5) < 1e-10);
}

TEST_CASE("config validation reports JSON pointers") {
  CHECK(pointer_of(R"({"curve": {"m": 2, "n": 1, "p": 2, "a": [[0, 0], [0, 0]]}, "theta": [0, 0],
                      "mode": "numeric", "chains": [[]]})") == "/curve/a/1");
  CHECK(pointer_of(R"({"curve": {"m": 4, "n": 2, "p": 2, "a": [[0, 0], [1, 0]]}, "theta": [0, 0],
                      "mode": "numeric", "chains": [[]]})") == "/curve/n");
  CHECK(pointer_of(R"({"curve": {"m": 2, "n": 1, "p": 2, "a": [[0, 0], [1, 0]]}, "theta": [0, 0],
                      "mode": "numeric", "chains": [[]], "colour": 1})") == "/colour");
  CHECK(pointer_of(R"({"curve": {"m": 2, "n": 1, "p": 2, "a": [[0, 0], [1, 0]]}, "theta": [0, 0],
                      "mode": "numeric",
                      "chains": [[{"type": "branch_loop", "parameters": {"index": 3}, "coefficient": 1}]]})") ==
        "/chains/0/0/parameters/index");
  CHECK(pointer_of(R"({"curve": {"m": 2, "n": 1, "p": 2, "a": [[0, 0], [1, 0]]}, "theta": [0, 0],
                      "mode": "numeric", "chains": [[{"type": "spiral", "coefficient": 1}]]})") ==
        "/chains/0/0/type");
  CHECK(pointer_of(R"({"curve": {"m": 3, "n": 1, "p": 2, "a": [[0, 0], [1, 0]]}, "theta": [0, 0],
                      "mode": "polynomial", "coefficients": [1]})") == "/mode");
  CHECK(pointer_of(R"({"curve": {"m": 2, "n": 1, "p": 3, "a": [[0, 0], [1, 0]]}, "theta": [0, 0],
                      "mode": "rational", "coefficients": [[1, 1], [1, 1]]})") == "/mode");
  CHECK(pointer_of(R"({"curve": {"m": 2, "n": 1, "p": 2, "a": [[0, 0], [1, 0]]}, "theta": [0],
                      "mode": "numeric", "chains": [[]]})") == "/theta");
  CHECK(pointer_of(R"({"curve": {"m": 2, "n": 1, "p": 2, "a": [[0, 0], [1, 0]]}, "theta": [0, 0],
                      "mode": "numeric", "chains": [[]], "tolerances": {"ode": "tight"}})") == "/tolerances/ode");
  CHECK(pointer_of("{not json") == "");
  CHECK(pointer_of(R"({"curve": {"m": 2, "n": 1, "p": 2, "a": [[0, 0], [1, 0]]}, "theta": [0, 0],
                      "mode": "numeric", "chains": [[]]})") == "<accepted>");
}

TEST_CASE("fiber loops may reference the base point") {
  const auto job = parse_config(std::string(R"({
    "curve": {"m": 2, "n": 1, "p": 3, "a": [[0, 0], [1, 0]]}, "theta": [0.15, -0.1], "mode": "numeric",
    "chains": [[{"type": "fiber_loop", "parameters": {"z": "base", "sheet": 1}, "coefficient": [0.04, -0.02]}], []]
  })"));
  const auto& loop = std::get<NumericChains>(job.coeffs.provenance).chains[0].terms[0].loop;
  CHECK(loop.kind == LoopKind::FiberPoint);
  CHECK(std::abs(loop.center - default_base_point(job.coeffs.curve)) == 0.0);
}

TEST_CASE("info reports the structure constants") {
  const auto path = write_temp("genus3.json", R"({
    "curve": {"m": 3, "n": 1, "N": 4, "p": 2, "a": [[0, 0], [1, 0], [2, 0], [0, 1]]},
    "theta": [0, 0, 0, 0], "mode": "numeric", "chains": [[]]})");
  const auto r = run("-c " + path + " info");
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["s"] == 1);
  CHECK(j["genus"] == 3);
}

TEST_CASE("monodromy of the trivial configuration is diagonal") {
  const auto r = run("-c " + config("trivial.json") + " monodromy --around 1");
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  const auto& M = j["matrix"];
  for (std::size_t k = 0; k < M.size(); ++k) {
    for (std::size_t l = 0; l < M.size(); ++l) {
      if (k != l) CHECK(std::hypot(M[k][l][0].get<double>(), M[k][l][1].get<double>()) < 1e-10);
    }
  }
  CHECK(j["spectrum_error"].get<double>() < 1e-8);
}

TEST_CASE("verify passes on the bundled examples and is byte-stable") {
  for (const char* name : {"polynomial_example.json", "rational_example.json", "case2_p3.json", "case3_p3.json"}) {
    INFO(name);
    const auto a = run("-c " + config(name) + " verify --suite all");
    const auto b = run("-c " + config(name) + " verify --suite all");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(Json::parse(a.out)["status"] == "pass");
  }
}

TEST_CASE("build-b output re-ingested gives the same verification") {
  const std::string b_path = std::string(ISOTRI_SCRATCH) + "/case2_b.json";
  REQUIRE(run("-c " + config("case2_p3.json") + " build-b --out " + b_path).code == 0);
  const auto own = run("-c " + config("case2_p3.json") + " verify --suite all");
  const auto ext = run("-c " + config("case2_p3.json") + " verify --suite all --b-matrices " + b_path);
  REQUIRE(ext.code == 0);
  auto jo = Json::parse(own.out);
  auto je = Json::parse(ext.out);
  CHECK(je["b_source"] == "external");
  CHECK(jo["checks"] == je["checks"]);

  // A perturbed matrix set no longer solves the system.
  auto bad = Json::parse(std::ifstream(b_path));
  bad["B"][0][0][1][0] = bad["B"][0][0][1][0].get<double>() + 1e-3;
  const auto bad_path = write_temp("case2_bad.json", bad.dump());
  CHECK(run("-c " + config("case2_p3.json") + " verify --suite ode --b-matrices " + bad_path).code == 1);
}

TEST_CASE("exit codes") {
  CHECK(run("-c " + config("polynomial_example.json") + " verify --suite partition").code == 0);
  CHECK(run("-c " + config("polynomial_example.json") + " verify --suite ode --tol 1e-30").code == 1);
  CHECK(run("-c " + config("polynomial_example.json") + " frobnicate").code == 2);
  CHECK(run("-c " + config("polynomial_example.json") + " verify --suite nope").code == 2);
  const auto dup = write_temp("dup.json", R"({"curve": {"m": 2, "n": 1, "p": 2, "a": [[0, 0], [0, 0]]},
    "theta": [0, 0], "mode": "numeric", "chains": [[]]})");
  CHECK(run("-c " + dup + " info").code == 2);
  CHECK(run("-c " + config("polynomial_example.json") + " sweep --param a[1] --range 0:0.5:2").code == 2);
  CHECK(run("-c " + config("polynomial_example.json") + " eval-phi --z 1,0").code == 3);
}

TEST_CASE("sweep, eval-phi and csv output") {
  const auto s = run("-c " + config("polynomial_example.json") + " sweep --param a[2] --range=-1e-3:1e-3:3 --format csv");
  CHECK(s.code == 0);
  CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 4);
  const auto e = run("-c " + config("polynomial_example.json") + " eval-phi --z 0.3,0.7");
  REQUIRE(e.code == 0);
  const auto j = Json::parse(e.out);
  const cplx z{0.3, 0.7};
  const cplx root = std::pow(z, 0.25) * std::pow(z - 1.0, 0.25);
  const cplx p01{j["phi"][0][1][0].get<double>(), j["phi"][0][1][1].get<double>()};
  CHECK(std::abs(p01 - (2.0 * z - 1.0) / root) < 1e-8);
  const auto c = run("-c " + config("polynomial_example.json") + " verify --suite lemma1 --format csv --timing");
  CHECK(c.out.rfind("name,status,residual,tolerance,seconds\n", 0) == 0);
}
