#pragma once

// JSON job configuration: curve, exponents, and either numeric chains or a
// residue recipe. Indices in JSON are 1-based; everything is converted to the
// 0-based library API here. Unknown fields are rejected and every diagnostic
// carries the JSON pointer of the offending value.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isotri/isotri.hpp"

namespace isotri {

using Json = nlohmann::ordered_json;

class ConfigError : public InputError {
 public:
  ConfigError(const std::string& pointer, const std::string& message)
      : InputError((pointer.empty() ? std::string("/") : pointer) + ": " + message), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

enum class BuildMode { Numeric, Polynomial, Rational };

inline const char* to_string(BuildMode m) {
  switch (m) {
    case BuildMode::Numeric: return "numeric";
    case BuildMode::Polynomial: return "polynomial";
    case BuildMode::Rational: return "rational";
  }
  return "?";
}

struct Tolerances {
  double structure = 1e-12;
  double schlesinger = 1e-6;
  double ode = 1e-8;
  double derivative = 1e-6;
  double lemma1 = 1e-8;
  double partition = 1e-12;
  double residue = 1e-8;
  double monodromy = 1e-8;
  double isomonodromy = 1e-6;

  void override_all(double t) {
    structure = schlesinger = ode = derivative = lemma1 = partition = residue = monodromy = isomonodromy = t;
  }
};

struct SampleCounts {
  int ode = 100;
  int lemma1 = 3;
  int partition_draws = 100;
};

struct JobConfig {
  std::string name;
  TriangularCoefficients coeffs;
  BuildMode mode = BuildMode::Numeric;
  std::optional<cplx> base_z;
  std::optional<std::vector<Matrix>> b_matrices;
  Tolerances tol;
  SampleCounts samples;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::string child(const std::string& ptr, const std::string& key) {
  std::string k;
  for (char c : key) {
    if (c == '~') k += "~0";
    else if (c == '/') k += "~1";
    else k += c;
  }
  return ptr + "/" + k;
}

inline std::string child(const std::string& ptr, std::size_t index) { return ptr + "/" + std::to_string(index); }

inline void only_fields(const Json& obj, const std::string& ptr, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(ptr, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(child(ptr, key), "unknown field");
  }
}

inline const Json& field(const Json& obj, const std::string& ptr, const char* key) {
  if (!obj.contains(key)) throw ConfigError(child(ptr, key), "missing required field");
  return obj.at(key);
}

inline double get_real(const Json& v, const std::string& ptr) {
  if (!v.is_number()) throw ConfigError(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(ptr, "expected a finite number");
  return x;
}

inline int get_int(const Json& v, const std::string& ptr) {
  if (!v.is_number_integer()) throw ConfigError(ptr, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < -1000000 || x > 1000000) throw ConfigError(ptr, "integer out of range");
  return static_cast<int>(x);
}

/// [re, im] pair or a plain real number.
inline cplx get_complex(const Json& v, const std::string& ptr) {
  if (v.is_number()) return {get_real(v, ptr), 0.0};
  if (!v.is_array() || v.size() != 2) throw ConfigError(ptr, "expected a complex number [re, im]");
  return {get_real(v[0], child(ptr, 0)), get_real(v[1], child(ptr, 1))};
}

inline std::vector<cplx> get_complex_list(const Json& v, const std::string& ptr) {
  if (!v.is_array()) throw ConfigError(ptr, "expected an array of complex numbers");
  std::vector<cplx> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(get_complex(v[k], child(ptr, k)));
  return out;
}

inline Matrix get_matrix(const Json& v, const std::string& ptr, int p) {
  if (!v.is_array() || static_cast<int>(v.size()) != p) {
    throw ConfigError(ptr, "expected a " + std::to_string(p) + "x" + std::to_string(p) + " matrix");
  }
  Matrix M(p, p);
  for (int k = 0; k < p; ++k) {
    const auto rp = child(ptr, static_cast<std::size_t>(k));
    const auto& row = v[static_cast<std::size_t>(k)];
    if (!row.is_array() || static_cast<int>(row.size()) != p) {
      throw ConfigError(rp, "expected a row of " + std::to_string(p) + " complex numbers");
    }
    for (int l = 0; l < p; ++l) M(k, l) = get_complex(row[static_cast<std::size_t>(l)], child(rp, static_cast<std::size_t>(l)));
  }
  return M;
}

/// 1-based index in [1, count], returned 0-based.
inline int get_index(const Json& v, const std::string& ptr, int count, const char* what) {
  const int k = get_int(v, ptr);
  if (k < 1 || k > count) {
    throw ConfigError(ptr, std::string(what) + " must lie in 1.." + std::to_string(count));
  }
  return k - 1;
}

inline std::optional<double> optional_radius(const Json& obj, const std::string& ptr) {
  if (!obj.contains("radius")) return std::nullopt;
  const double r = get_real(obj.at("radius"), child(ptr, "radius"));
  if (!(r > 0.0)) throw ConfigError(child(ptr, "radius"), "radius must be positive");
  return r;
}

template <class F>
auto located(const std::string& ptr, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(ptr, e.what());
  }
}

inline SheetedLoop parse_loop(const CurveFamily& curve, const Json& term, const std::string& ptr,
                              const std::optional<cplx>& base_z) {
  const auto& type_json = field(term, ptr, "type");
  if (!type_json.is_string()) throw ConfigError(child(ptr, "type"), "expected a string");
  const auto type = type_json.get<std::string>();
  const Json empty = Json::object();
  const Json& par = term.contains("parameters") ? term.at("parameters") : empty;
  const auto pp = child(ptr, "parameters");
  if (type == "branch_loop") {
    only_fields(par, pp, {"index", "radius", "sheet"});
    const int nu = get_index(field(par, pp, "index"), child(pp, "index"), curve.N(), "branch index");
    const int sheet = par.contains("sheet") ? get_index(par.at("sheet"), child(pp, "sheet"), curve.m(), "sheet") : 0;
    const auto r = optional_radius(par, pp);
    return located(pp, [&] { return loop_around_branch_point(curve, nu, r, sheet); });
  }
  if (type == "infinity_loop") {
    only_fields(par, pp, {"alpha", "radius"});
    const int s = structure_constants(curve).s;
    const int alpha = par.contains("alpha") ? get_index(par.at("alpha"), child(pp, "alpha"), s, "alpha") : 0;
    const auto r = optional_radius(par, pp);
    return located(pp, [&] { return loop_around_infinity(curve, alpha, r); });
  }
  if (type == "fiber_loop") {
    only_fields(par, pp, {"z", "sheet", "radius"});
    cplx z = base_z.value_or(default_base_point(curve));
    if (par.contains("z")) {
      const auto& zj = par.at("z");
      if (!(zj.is_string() && zj.get<std::string>() == "base")) z = get_complex(zj, child(pp, "z"));
    }
    const int t = get_index(field(par, pp, "sheet"), child(pp, "sheet"), curve.m(), "sheet");
    const auto r = optional_radius(par, pp);
    return located(pp, [&] { return loop_around_fiber_point(curve, z, t, r); });
  }
  if (type == "polyline") {
    only_fields(par, pp, {"vertices", "sheet", "windings"});
    const auto vertices = get_complex_list(field(par, pp, "vertices"), child(pp, "vertices"));
    if (vertices.size() < 3) throw ConfigError(child(pp, "vertices"), "a polyline needs at least 3 vertices");
    const int sheet = par.contains("sheet") ? get_index(par.at("sheet"), child(pp, "sheet"), curve.m(), "sheet") : 0;
    const int windings = par.contains("windings") ? get_int(par.at("windings"), child(pp, "windings")) : 1;
    if (windings < 1) throw ConfigError(child(pp, "windings"), "windings must be positive");
    return located(pp, [&] { return loop_polyline(curve, vertices, sheet, windings); });
  }
  throw ConfigError(child(ptr, "type"), "unknown loop type '" + type +
                                            "' (expected branch_loop, infinity_loop, fiber_loop or polyline)");
}

}  // namespace detail

/// The B-matrix set written by `build-b` (or any object with a "B" array).
inline std::vector<Matrix> parse_b_matrices(const Json& doc, int N, int p, const std::string& ptr = "") {
  const Json& arr = doc.is_object() ? detail::field(doc, ptr, "B") : doc;
  const auto ap = doc.is_object() ? detail::child(ptr, "B") : ptr;
  if (!arr.is_array() || static_cast<int>(arr.size()) != N) {
    throw ConfigError(ap, "expected " + std::to_string(N) + " B matrices");
  }
  std::vector<Matrix> B;
  for (int i = 0; i < N; ++i) {
    B.push_back(detail::get_matrix(arr[static_cast<std::size_t>(i)], detail::child(ap, static_cast<std::size_t>(i)), p));
  }
  return B;
}

inline JobConfig parse_config(const Json& doc) {
  using namespace detail;
  only_fields(doc, "", {"name", "curve", "theta", "mode", "chains", "coefficients", "alpha", "base_z",
                        "tolerances", "samples", "seed", "exclusion_factor", "b_matrices"});
  JobConfig job{.name = "", .coeffs = {CurveFamily(1, 1, {0.0}, 1), {}, {}, ExternalMatrices{}}};
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw ConfigError("/name", "expected a string");
    job.name = doc.at("name").get<std::string>();
  }

  const auto& cj = field(doc, "", "curve");
  only_fields(cj, "/curve", {"m", "n", "N", "p", "a"});
  const int m = get_int(field(cj, "/curve", "m"), "/curve/m");
  const int n = get_int(field(cj, "/curve", "n"), "/curve/n");
  const int p = get_int(field(cj, "/curve", "p"), "/curve/p");
  const auto a = get_complex_list(field(cj, "/curve", "a"), "/curve/a");
  if (m < 1) throw ConfigError("/curve/m", "m must be a positive integer");
  if (n == 0) throw ConfigError("/curve/n", "n must be nonzero");
  if (std::gcd(std::abs(n), m) != 1) {
    throw ConfigError("/curve/n", "gcd(|n|, m) must be 1, got n=" + std::to_string(n) + ", m=" + std::to_string(m));
  }
  if (p < 1 || p > 12) throw ConfigError("/curve/p", "p must lie in 1..12");
  if (a.empty()) throw ConfigError("/curve/a", "at least one branch point is required");
  if (cj.contains("N") && get_int(cj.at("N"), "/curve/N") != static_cast<int>(a.size())) {
    throw ConfigError("/curve/N", "N does not match the number of branch points");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (a[i] == a[k]) {
        throw ConfigError(child("/curve/a", i), "coincides with branch point " + std::to_string(k + 1));
      }
    }
  }
  double excl = CurveFamily::default_exclusion_factor;
  if (doc.contains("exclusion_factor")) {
    excl = get_real(doc.at("exclusion_factor"), "/exclusion_factor");
    if (!(excl > 0.0 && excl < 0.1)) throw ConfigError("/exclusion_factor", "must lie in (0, 0.1)");
  }
  const CurveFamily curve = located("/curve", [&] { return CurveFamily(m, n, a, p, excl); });
  const int N = curve.N();

  const auto theta = get_complex_list(field(doc, "", "theta"), "/theta");
  if (static_cast<int>(theta.size()) != N) {
    throw ConfigError("/theta", "expected " + std::to_string(N) + " exponents, one per branch point");
  }

  if (doc.contains("base_z")) {
    job.base_z = get_complex(doc.at("base_z"), "/base_z");
    if (curve.branch_distance(*job.base_z) < curve.exclusion_radius()) {
      throw ConfigError("/base_z", "base point lies on a branch point");
    }
  }

  const auto& mj = field(doc, "", "mode");
  if (!mj.is_string()) throw ConfigError("/mode", "expected a string");
  const auto mode = mj.get<std::string>();
  if (mode == "numeric") {
    job.mode = BuildMode::Numeric;
    if (doc.contains("coefficients")) throw ConfigError("/coefficients", "not used in numeric mode");
    if (doc.contains("alpha")) throw ConfigError("/alpha", "not used in numeric mode");
    const auto& ch = field(doc, "", "chains");
    if (!ch.is_array() || static_cast<int>(ch.size()) != p - 1) {
      throw ConfigError("/chains", "expected p-1 = " + std::to_string(p - 1) + " chains");
    }
    std::vector<Chain> chains;
    for (std::size_t d = 0; d < ch.size(); ++d) {
      const auto dp = child("/chains", d);
      if (!ch[d].is_array()) throw ConfigError(dp, "expected an array of chain terms");
      Chain chain;
      for (std::size_t t = 0; t < ch[d].size(); ++t) {
        const auto tp = child(dp, t);
        const auto& term = ch[d][t];
        only_fields(term, tp, {"type", "parameters", "coefficient"});
        const cplx coeff = get_complex(field(term, tp, "coefficient"), child(tp, "coefficient"));
        chain.add(coeff, parse_loop(curve, term, tp, job.base_z));
      }
      chains.push_back(std::move(chain));
    }
    job.coeffs = located("/chains", [&] { return build_numeric(curve, theta, chains); });
  } else if (mode == "polynomial") {
    job.mode = BuildMode::Polynomial;
    if (doc.contains("chains")) throw ConfigError("/chains", "not used in polynomial mode");
    if (n < 0) throw ConfigError("/mode", "polynomial mode needs n > 0");
    if (structure_constants(curve).s < 2) throw ConfigError("/mode", "polynomial mode needs gcd(m, N) > 1");
    const auto c = get_complex_list(field(doc, "", "coefficients"), "/coefficients");
    if (static_cast<int>(c.size()) != p - 1) {
      throw ConfigError("/coefficients", "expected p-1 = " + std::to_string(p - 1) + " coefficients c_j");
    }
    const int alpha = doc.contains("alpha")
                          ? get_index(doc.at("alpha"), "/alpha", structure_constants(curve).s, "alpha")
                          : 0;
    job.coeffs = located("/coefficients", [&] { return build_polynomial(curve, theta, alpha, c); });
  } else if (mode == "rational") {
    job.mode = BuildMode::Rational;
    if (doc.contains("chains")) throw ConfigError("/chains", "not used in rational mode");
    if (doc.contains("alpha")) throw ConfigError("/alpha", "not used in rational mode");
    if (n > 0) throw ConfigError("/mode", "rational mode needs n < 0");
    const auto& cj2 = field(doc, "", "coefficients");
    if (!cj2.is_array() || static_cast<int>(cj2.size()) != N) {
      throw ConfigError("/coefficients", "expected one row c^nu_1..c^nu_{p-1} per branch point");
    }
    std::vector<std::vector<cplx>> c;
    for (std::size_t nu = 0; nu < cj2.size(); ++nu) {
      c.push_back(get_complex_list(cj2[nu], child("/coefficients", nu)));
      if (static_cast<int>(c.back().size()) != p - 1) {
        throw ConfigError(child("/coefficients", nu), "expected p-1 = " + std::to_string(p - 1) + " coefficients");
      }
    }
    job.coeffs = located("/coefficients", [&] { return build_rational(curve, theta, c); });
  } else {
    throw ConfigError("/mode", "unknown mode '" + mode + "' (expected numeric, polynomial or rational)");
  }

  if (doc.contains("b_matrices")) job.b_matrices = parse_b_matrices(doc.at("b_matrices"), N, p, "/b_matrices");

  if (doc.contains("tolerances")) {
    const auto& t = doc.at("tolerances");
    only_fields(t, "/tolerances", {"structure", "schlesinger", "ode", "derivative", "lemma1", "partition",
                                   "residue", "monodromy", "isomonodromy"});
    const auto set = [&](const char* key, double& slot) {
      if (!t.contains(key)) return;
      slot = get_real(t.at(key), child("/tolerances", key));
      if (slot < 0.0) throw ConfigError(child("/tolerances", key), "tolerance must be nonnegative");
    };
    set("structure", job.tol.structure);
    set("schlesinger", job.tol.schlesinger);
    set("ode", job.tol.ode);
    set("derivative", job.tol.derivative);
    set("lemma1", job.tol.lemma1);
    set("partition", job.tol.partition);
    set("residue", job.tol.residue);
    set("monodromy", job.tol.monodromy);
    set("isomonodromy", job.tol.isomonodromy);
  }
  if (doc.contains("samples")) {
    const auto& s = doc.at("samples");
    only_fields(s, "/samples", {"ode", "lemma1", "partition_draws"});
    const auto set = [&](const char* key, int& slot) {
      if (!s.contains(key)) return;
      slot = get_int(s.at(key), child("/samples", key));
      if (slot < 1 || slot > 100000) throw ConfigError(child("/samples", key), "must lie in 1..100000");
    };
    set("ode", job.samples.ode);
    set("lemma1", job.samples.lemma1);
    set("partition_draws", job.samples.partition_draws);
  }
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned()) throw ConfigError("/seed", "expected a nonnegative integer");
    job.seed = s.get<std::uint64_t>();
  }
  return job;
}

inline JobConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline JobConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

}  // namespace isotri
