#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "isotri/verify.hpp"

using namespace isotri;

namespace {

enum ExitCode { kPass = 0, kFailed = 1, kInputError = 2, kNumericalError = 3 };

struct Options {
  std::string config;
  std::string out;
  std::string format = "json";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  bool timing = false;

  std::string suite = "all";
  std::string b_matrices;
  std::string z;
  int around = 1;
  std::string param;
  std::string range;
  std::string direction = "1,0";
};

// Shortest round-trip representation, independent of locale.
std::string num(double x) {
  if (x == 0.0) return "0";
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

// Adding 0.0 maps -0.0 to 0.0.
Json to_json(cplx z) { return Json::array({z.real() + 0.0, z.imag() + 0.0}); }

// Indented JSON with arrays of scalars kept on one line.
void dump(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const auto scalar_array = [](const Json& a) {
    for (const auto& v : a) {
      if (v.is_structured()) return false;
    }
    return true;
  };
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    std::size_t k = 0;
    for (const auto& [key, value] : j.items()) {
      out += pad + Json(key).dump() + ": ";
      dump(value, out, indent + 2);
      out += ++k < j.size() ? ",\n" : "\n";
    }
    out += std::string(static_cast<std::size_t>(indent), ' ') + "}";
  } else if (j.is_array() && !j.empty() && !scalar_array(j)) {
    out += "[\n";
    for (std::size_t k = 0; k < j.size(); ++k) {
      out += pad;
      dump(j[k], out, indent + 2);
      out += k + 1 < j.size() ? ",\n" : "\n";
    }
    out += std::string(static_cast<std::size_t>(indent), ' ') + "]";
  } else if (j.is_array()) {
    out += "[";
    for (std::size_t k = 0; k < j.size(); ++k) out += (k ? ", " : "") + j[k].dump();
    out += "]";
  } else {
    out += j.dump();
  }
}

std::string dump(const Json& j) {
  std::string out;
  dump(j, out, 0);
  return out + "\n";
}

Json to_json(const Matrix& M) {
  Json rows = Json::array();
  for (int k = 0; k < M.rows(); ++k) {
    Json row = Json::array();
    for (int l = 0; l < M.cols(); ++l) row.push_back(to_json(M(k, l)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const std::vector<cplx>& v) {
  Json arr = Json::array();
  for (const auto& z : v) arr.push_back(to_json(z));
  return arr;
}

Json to_json(const std::vector<Matrix>& Ms) {
  Json arr = Json::array();
  for (const auto& M : Ms) arr.push_back(to_json(M));
  return arr;
}

void csv_matrix(std::ostringstream& os, const std::string& label, const Matrix& M) {
  for (int k = 0; k < M.rows(); ++k) {
    for (int l = 0; l < M.cols(); ++l) {
      os << label << ',' << k + 1 << ',' << l + 1 << ',' << num(M(k, l).real()) << ',' << num(M(k, l).imag())
         << '\n';
    }
  }
}

cplx parse_pair(const std::string& text, const char* what) {
  const auto comma = text.find(',');
  const auto parse = [&](const std::string& s) {
    double x = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw InvalidArgument(std::string(what) + ": cannot parse '" + text + "'");
    }
    return x;
  };
  if (comma == std::string::npos) return {parse(text), 0.0};
  return {parse(text.substr(0, comma)), parse(text.substr(comma + 1))};
}

Json report_json(const Report& rep, bool timing) {
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json j = Json::object();
    j["name"] = c.name;
    j["status"] = c.passed() ? "pass" : "fail";
    j["residual"] = c.residual;
    j["tolerance"] = c.tolerance;
    if (timing) j["seconds"] = c.seconds;
    checks.push_back(j);
  }
  return checks;
}

std::string report_csv(const Report& rep, bool timing) {
  std::ostringstream os;
  os << "name,status,residual,tolerance" << (timing ? ",seconds" : "") << '\n';
  for (const auto& c : rep.checks) {
    os << c.name << ',' << (c.passed() ? "pass" : "fail") << ',' << num(c.residual) << ',' << num(c.tolerance);
    if (timing) os << ',' << num(c.seconds);
    os << '\n';
  }
  return os.str();
}

Json header(const JobConfig& cfg, const std::string& command) {
  Json h = Json::object();
  h["command"] = command;
  if (!cfg.name.empty()) h["name"] = cfg.name;
  return h;
}

JobConfig load(const Options& opt) {
  auto cfg = load_config(opt.config);
  if (opt.tol) cfg.tol.override_all(*opt.tol);
  if (opt.seed) cfg.seed = *opt.seed;
  return cfg;
}

struct Output {
  std::string text;
  int code = kPass;
};

Output cmd_info(const Options& opt) {
  const auto cfg = load(opt);
  const auto& c = cfg.coeffs.curve;
  const auto sc = structure_constants(c);
  const cplx base = cfg.base_z.value_or(default_base_point(c));
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "key,value\n"
       << "m," << c.m() << "\nn," << c.n() << "\nN," << c.N() << "\np," << c.p() << "\ns," << sc.s << "\nm1,"
       << sc.m1 << "\ngenus," << sc.genus << "\npoints_at_infinity," << sc.s << "\nsep," << num(c.sep())
       << "\nexclusion_radius," << num(c.exclusion_radius()) << "\nmode," << to_string(cfg.mode) << '\n';
    return {os.str()};
  }
  Json j = header(cfg, "info");
  j["m"] = c.m();
  j["n"] = c.n();
  j["N"] = c.N();
  j["p"] = c.p();
  j["s"] = sc.s;
  j["m1"] = sc.m1;
  j["genus"] = sc.genus;
  j["points_at_infinity"] = sc.s;
  j["sep"] = c.sep();
  j["exclusion_radius"] = c.exclusion_radius();
  j["mode"] = to_string(cfg.mode);
  j["base_z"] = to_json(base);
  return {dump(j)};
}

Output cmd_build_b(const Options& opt) {
  const auto cfg = load(opt);
  const Matrix Binf = b_infinity(cfg.coeffs);
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "matrix,row,col,re,im\n";
    for (std::size_t i = 0; i < cfg.coeffs.B.size(); ++i) csv_matrix(os, std::to_string(i + 1), cfg.coeffs.B[i]);
    csv_matrix(os, "inf", Binf);
    return {os.str()};
  }
  Json j = header(cfg, "build-b");
  j["mode"] = to_string(cfg.mode);
  j["theta"] = to_json(cfg.coeffs.theta);
  j["B"] = to_json(cfg.coeffs.B);
  j["B_infinity"] = to_json(Binf);
  return {dump(j)};
}

Output cmd_eval_phi(const Options& opt) {
  const auto cfg = load(opt);
  const cplx z = parse_pair(opt.z, "--z");
  const FundamentalSolution sol(cfg.coeffs, cfg.base_z);
  const auto ev = evaluate(sol, z);
  const auto [k, kp] = sol.kappas(z);
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "quantity,row,col,re,im\n";
    csv_matrix(os, "phi", ev.phi());
    csv_matrix(os, "phi_z", ev.phi_derivative());
    for (std::size_t j = 0; j < k.size(); ++j) {
      os << "kappa," << j + 1 << ",0," << num(k[j].real()) << ',' << num(k[j].imag()) << '\n';
    }
    return {os.str()};
  }
  Json j = header(cfg, "eval-phi");
  j["z"] = to_json(z);
  j["phi"] = to_json(ev.phi());
  j["phi_z"] = to_json(ev.phi_derivative());
  j["kappa"] = to_json(k);
  j["kappa_prime"] = to_json(kp);
  return {dump(j)};
}

Output cmd_verify(const Options& opt) {
  auto cfg = load(opt);
  if (!opt.b_matrices.empty()) {
    Json doc;
    try {
      doc = Json::parse(read_text_file(opt.b_matrices));
    } catch (const Json::parse_error& e) {
      throw ConfigError("", opt.b_matrices + ": invalid JSON: " + e.what());
    }
    cfg.b_matrices = parse_b_matrices(doc, cfg.coeffs.curve.N(), cfg.coeffs.curve.p());
  }
  const bool external = cfg.b_matrices.has_value();
  const Job job(std::move(cfg));
  const auto rep = run_suite(job, opt.suite);
  const int code = rep.passed() ? kPass : kFailed;
  if (opt.format == "csv") return {report_csv(rep, opt.timing), code};
  Json j = header(job.config(), "verify");
  j["suite"] = opt.suite;
  j["seed"] = job.seed();
  j["b_source"] = external ? "external" : "config";
  j["checks"] = report_json(rep, opt.timing);
  j["failed"] = rep.failures();
  j["status"] = rep.passed() ? "pass" : "fail";
  return {dump(j), code};
}

Output cmd_monodromy(const Options& opt) {
  const auto cfg = load(opt);
  const auto& c = cfg.coeffs.curve;
  if (opt.around < 1 || opt.around > c.N()) {
    throw InvalidArgument("--around must lie in 1.." + std::to_string(c.N()));
  }
  const FundamentalSolution sol(cfg.coeffs, cfg.base_z);
  const int j = opt.around - 1;
  const Matrix M = monodromy_matrix(sol, cfg.coeffs.B, j);
  const auto expected = expected_eigenvalues(sol, j);
  const double err = spectrum_error(M, expected);
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "quantity,row,col,re,im\n";
    csv_matrix(os, "monodromy", M);
    return {os.str()};
  }
  Json out = header(cfg, "monodromy");
  out["around"] = opt.around;
  out["base_z"] = to_json(sol.base_z());
  out["case"] = to_string(classify(sol));
  out["matrix"] = to_json(M);
  out["expected_eigenvalues"] = to_json(expected);
  out["spectrum_error"] = err;
  return {dump(out)};
}

Output cmd_sweep(const Options& opt) {
  const auto cfg = load(opt);
  const auto& c = cfg.coeffs.curve;
  static const std::regex param_re(R"(a\[(\d+)\])");
  std::smatch pm;
  if (!std::regex_match(opt.param, pm, param_re)) throw InvalidArgument("--param must look like a[i]");
  const int i = std::stoi(pm[1].str());
  if (i < 1 || i > c.N()) throw InvalidArgument("--param index must lie in 1.." + std::to_string(c.N()));
  static const std::regex range_re(R"(([^:]+):([^:]+):(\d+))");
  std::smatch rm;
  if (!std::regex_match(opt.range, rm, range_re)) throw InvalidArgument("--range must look like START:STOP:COUNT");
  const double start = parse_pair(rm[1].str(), "--range").real();
  const double stop = parse_pair(rm[2].str(), "--range").real();
  const int count = std::stoi(rm[3].str());
  if (count < 1 || count > 10000) throw InvalidArgument("--range COUNT must lie in 1..10000");
  const cplx dir = parse_pair(opt.direction, "--direction");
  if (std::abs(dir) == 0.0) throw InvalidArgument("--direction must be nonzero");
  const cplx unit = dir / std::abs(dir);

  const FundamentalSolution sol(cfg.coeffs, cfg.base_z);
  Report rep;
  std::vector<cplx> offsets;
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? start : start + (stop - start) * k / (count - 1);
    const cplx d = t * unit;
    std::vector<cplx> delta(static_cast<std::size_t>(c.N()));
    delta[static_cast<std::size_t>(i - 1)] = d;
    const auto t0 = std::chrono::steady_clock::now();
    const double r = isomonodromy_check(sol, delta);
    const auto t1 = std::chrono::steady_clock::now();
    rep.checks.push_back({"isomonodromy", r, cfg.tol.isomonodromy, std::chrono::duration<double>(t1 - t0).count()});
    offsets.push_back(d);
  }
  const int code = rep.passed() ? kPass : kFailed;
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "delta_re,delta_im,status,residual,tolerance" << (opt.timing ? ",seconds" : "") << '\n';
    for (std::size_t k = 0; k < rep.checks.size(); ++k) {
      const auto& ch = rep.checks[k];
      os << num(offsets[k].real()) << ',' << num(offsets[k].imag()) << ',' << (ch.passed() ? "pass" : "fail") << ','
         << num(ch.residual) << ',' << num(ch.tolerance);
      if (opt.timing) os << ',' << num(ch.seconds);
      os << '\n';
    }
    return {os.str(), code};
  }
  Json j = header(cfg, "sweep");
  j["param"] = opt.param;
  j["direction"] = to_json(unit);
  Json points = Json::array();
  for (std::size_t k = 0; k < rep.checks.size(); ++k) {
    const auto& ch = rep.checks[k];
    Json p = Json::object();
    p["delta"] = to_json(offsets[k]);
    p["status"] = ch.passed() ? "pass" : "fail";
    p["residual"] = ch.residual;
    p["tolerance"] = ch.tolerance;
    if (opt.timing) p["seconds"] = ch.seconds;
    points.push_back(p);
  }
  j["points"] = points;
  j["failed"] = rep.failures();
  j["status"] = rep.passed() ? "pass" : "fail";
  return {dump(j), code};
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + opt.out);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Triangular Schlesinger solutions on superelliptic curves: build, evaluate and verify."};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("-c,--config", opt.config, "JSON job configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "write output to FILE instead of stdout");
  app.add_option("--format", opt.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol", opt.tol, "override every tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", opt.seed, "override the configuration seed");
  app.add_flag("--timing", opt.timing, "include wall times in reports");

  auto* info = app.add_subcommand("info", "structure constants of the curve");
  auto* build_b = app.add_subcommand("build-b", "emit the B matrices");
  auto* eval_phi = app.add_subcommand("eval-phi", "evaluate Phi and Phi_z at a point");
  eval_phi->add_option("--z", opt.z, "evaluation point RE,IM")->required();
  auto* verify = app.add_subcommand("verify", "run verification suites");
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  verify->add_option("--suite", opt.suite, "suite to run")->check(CLI::IsMember(suites));
  verify->add_option("--b-matrices", opt.b_matrices, "verify this B-matrix set (build-b output) instead")
      ->check(CLI::ExistingFile);
  auto* mono = app.add_subcommand("monodromy", "monodromy matrix around one branch point");
  mono->add_option("--around", opt.around, "branch point index J (1-based)")->required();
  auto* sweep = app.add_subcommand("sweep", "isomonodromy scan over a moving branch point");
  sweep->add_option("--param", opt.param, "parameter to move, a[i] (1-based)")->required();
  sweep->add_option("--range", opt.range, "offsets START:STOP:COUNT")->required();
  sweep->add_option("--direction", opt.direction, "direction RE,IM of the offsets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    Output out;
    if (info->parsed()) out = cmd_info(opt);
    else if (build_b->parsed()) out = cmd_build_b(opt);
    else if (eval_phi->parsed()) out = cmd_eval_phi(opt);
    else if (verify->parsed()) out = cmd_verify(opt);
    else if (mono->parsed()) out = cmd_monodromy(opt);
    else if (sweep->parsed()) out = cmd_sweep(opt);
    emit(opt, out.text);
    return out.code;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
}
