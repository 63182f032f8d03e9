#pragma once

// Verification suites run by the command line tool. Every suite returns a
// list of named checks, each with the measured residual and its tolerance.
// All randomness is drawn from seeded generators so reports are reproducible.

#include <array>
#include <chrono>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "isotri/config.hpp"

namespace isotri {

struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;

  bool passed() const { return residual <= tolerance; }
};

struct Report {
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed()) return false;
    }
    return true;
  }
  int failures() const {
    int n = 0;
    for (const auto& c : checks) n += c.passed() ? 0 : 1;
    return n;
  }
  void append(const Report& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"schlesinger", "ode",        "partition",
                                                 "lemma1",      "residue-duality", "monodromy"};
  return names;
}

/// Everything a suite needs: the configuration and the coefficient set under
/// test, which is either the one built from the configuration or an
/// externally supplied one.
class Job {
 public:
  explicit Job(JobConfig config) : config_(std::move(config)) {
    B_ = config_.b_matrices ? *config_.b_matrices : config_.coeffs.B;
  }

  const JobConfig& config() const { return config_; }
  const TriangularCoefficients& coeffs() const { return config_.coeffs; }
  const CurveFamily& curve() const { return config_.coeffs.curve; }
  const std::vector<Matrix>& B() const { return B_; }
  const Tolerances& tol() const { return config_.tol; }
  std::uint64_t seed() const { return config_.seed; }
  bool external() const { return config_.b_matrices.has_value(); }

  /// The coefficient set with B replaced by the one under test.
  TriangularCoefficients tested() const {
    auto c = config_.coeffs;
    c.B = B_;
    return c;
  }

  const FundamentalSolution& solution() const {
    if (!sol_) sol_ = std::make_shared<FundamentalSolution>(config_.coeffs, config_.base_z);
    return *sol_;
  }

 private:
  JobConfig config_;
  std::vector<Matrix> B_;
  mutable std::shared_ptr<FundamentalSolution> sol_;
};

namespace detail {

class CheckList {
 public:
  /// Runs f, which returns the residual, and records it under `name`.
  void run(const std::string& name, double tolerance, const std::function<double()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const double r = f();
    const auto t1 = std::chrono::steady_clock::now();
    report.checks.push_back({name, r, tolerance, std::chrono::duration<double>(t1 - t0).count()});
  }

  Report report;
};

inline double relative(double err, double scale) { return err / std::max(1.0, scale); }

inline std::uint64_t suite_seed(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{seed, salt};
  std::uint64_t out = 0;
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out;
}

inline double max_over(const std::vector<cplx>& pts, const std::function<double(cplx)>& f) {
  double worst = 0.0;
  for (const cplx z : pts) worst = std::max(worst, f(z));
  return worst;
}

}  // namespace detail

inline Report verify_schlesinger(const Job& job) {
  detail::CheckList out;
  const auto tested = job.tested();
  const auto& tol = job.tol();
  const auto rep = structure_report(tested);
  out.run("schlesinger.lower_triangle", tol.structure, [&] { return rep.lower; });
  out.run("schlesinger.diagonal_step", tol.structure, [&] { return rep.diagonal_step; });
  out.run("schlesinger.constant_bands", tol.structure, [&] { return rep.band; });
  out.run("schlesinger.b_infinity_diagonal", tol.residue, [&] {
    const Matrix S = b_infinity(tested);
    return detail::relative(off_diagonal_magnitude(S), max_abs(S));
  });
  out.run("schlesinger.finite_difference", tol.schlesinger, [&] {
    const auto nominal = job.curve().a();
    const Builder build = [&](const std::vector<cplx>& a) {
      if (a == nominal) return tested;
      return rebuild(job.coeffs(), a);
    };
    return schlesinger_residual(build, nominal, 1e-5 * job.curve().sep());
  });
  return out.report;
}

inline Report verify_ode(const Job& job) {
  detail::CheckList out;
  const auto& sol = job.solution();
  const auto& tol = job.tol();
  const auto pts = sample_points(sol, job.config().samples.ode, detail::suite_seed(job.seed(), 1));
  out.run("ode.residual", tol.ode, [&] {
    return detail::max_over(pts, [&](cplx z) { return ode_residual(sol, job.B(), z); });
  });
  out.run("ode.inverse", tol.ode, [&] {
    return detail::max_over(pts, [&](cplx z) {
      const auto ev = evaluate(sol, z);
      return max_abs(ev.phi_inverse() * ev.phi() - Matrix::Identity(sol.p(), sol.p()));
    });
  });
  out.run("ode.derivative", tol.derivative, [&] {
    const double h = 1e-5 * job.curve().sep();
    return detail::max_over(pts, [&](cplx z) {
      const Matrix exact = phi_derivative(sol, z);
      const Matrix fd = (phi(sol, z + h) - phi(sol, z - h)) / (2.0 * h);
      return detail::relative(max_abs(exact - fd), max_abs(exact));
    });
  });
  return out.report;
}

inline Report verify_partition(const Job& job) {
  detail::CheckList out;
  const auto& tol = job.tol();
  const int draws = job.config().samples.partition_draws;
  std::mt19937_64 rng(detail::suite_seed(job.seed(), 2));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  struct Draw {
    int p;
    std::vector<cplx> k, k2;
  };
  std::vector<Draw> all;
  for (int p = 1; p <= 12; ++p) {
    for (int d = 0; d < draws; ++d) {
      Draw dr{p, {}, {}};
      for (int j = 1; j < p; ++j) {
        dr.k.emplace_back(u(rng), u(rng));
        dr.k2.emplace_back(u(rng), u(rng));
      }
      all.push_back(std::move(dr));
    }
  }
  out.run("partition.inverse", tol.partition, [&] {
    double worst = 0.0;
    for (const auto& d : all) {
      worst = std::max(worst, max_abs(m_matrix(d.k, d.p) * m_inverse(d.k, d.p) - Matrix::Identity(d.p, d.p)));
    }
    return worst;
  });
  // Exact equality: the residual is the largest entrywise difference.
  out.run("partition.negation", 0.0, [&] {
    double worst = 0.0;
    for (const auto& d : all) {
      std::vector<cplx> neg;
      for (const auto& x : d.k) neg.push_back(-x);
      worst = std::max(worst, max_abs(m_inverse(d.k, d.p) - m_matrix(neg, d.p)));
    }
    return worst;
  });
  out.run("partition.group", tol.partition, [&] {
    double worst = 0.0;
    for (const auto& d : all) {
      std::vector<cplx> sum;
      for (std::size_t j = 0; j < d.k.size(); ++j) sum.push_back(d.k[j] + d.k2[j]);
      worst = std::max(worst, max_abs(m_matrix(d.k, d.p) * m_matrix(d.k2, d.p) - m_matrix(sum, d.p)));
    }
    return worst;
  });
  return out.report;
}

inline Report verify_lemma1(const Job& job) {
  detail::CheckList out;
  const auto& sol = job.solution();
  const auto pts = sample_points(sol, job.config().samples.lemma1, detail::suite_seed(job.seed(), 3));
  for (int j = 1; j < sol.p() && j <= 4; ++j) {
    out.run("lemma1.j" + std::to_string(j), job.tol().lemma1,
            [&] { return detail::max_over(pts, [&](cplx z) { return lemma1_residual(sol, j, z); }); });
  }
  return out.report;
}

inline Report verify_residue_duality(const Job& job) {
  detail::CheckList out;
  const auto& curve = job.curve();
  const double tol = job.tol().residue;
  const int N = curve.N();
  const int jmax = 4;
  const std::vector<int> js = [&] {
    std::vector<int> v;
    for (int j = 1; j <= jmax; ++j) v.push_back(j);
    return v;
  }();
  // Poles of Omega_i^j lie at the points at infinity when n > 0 and at the
  // branch points when n < 0.
  if (curve.n() > 0) {
    const int s = structure_constants(curve).s;
    out.run("residue.infinity_loops", tol, [&] {
      double worst = 0.0;
      for (int alpha = 0; alpha < s; ++alpha) {
        const auto loop = loop_around_infinity(curve, alpha);
        for (int i = 0; i < N; ++i) {
          for (const int j : js) {
            const cplx q = integrate(curve, loop, Integrand::omega(i, j));
            const cplx r = residue_at_infinity(curve, alpha, i, j);
            worst = std::max(worst, detail::relative(std::abs(q - two_pi_i * r), std::abs(two_pi_i * r)));
          }
        }
      }
      return worst;
    });
    out.run("residue.global_sum", tol, [&] {
      double worst = 0.0;
      for (int i = 0; i < N; ++i) {
        for (const int j : js) {
          cplx total{};
          double scale = 0.0;
          for (int alpha = 0; alpha < s; ++alpha) {
            const cplx r = residue_at_infinity(curve, alpha, i, j);
            total += r;
            scale = std::max(scale, std::abs(r));
          }
          worst = std::max(worst, detail::relative(std::abs(total), scale));
        }
      }
      return worst;
    });
  } else {
    out.run("residue.branch_loops", tol, [&] {
      double worst = 0.0;
      for (int nu = 0; nu < N; ++nu) {
        const auto loop = loop_around_branch_point(curve, nu);
        for (int i = 0; i < N; ++i) {
          for (const int j : js) {
            const cplx q = integrate(curve, loop, Integrand::omega(i, j));
            const cplx r = residue_at_branch_point(curve, nu, i, j);
            worst = std::max(worst, detail::relative(std::abs(q - two_pi_i * r), std::abs(two_pi_i * r)));
          }
        }
      }
      return worst;
    });
    out.run("residue.global_sum", tol, [&] {
      double worst = 0.0;
      for (int i = 0; i < N; ++i) {
        for (const int j : js) {
          cplx total{};
          double scale = 0.0;
          for (int nu = 0; nu < N; ++nu) {
            const cplx r = residue_at_branch_point(curve, nu, i, j);
            total += r;
            scale = std::max(scale, std::abs(r));
          }
          worst = std::max(worst, detail::relative(std::abs(total), scale));
        }
      }
      return worst;
    });
  }
  out.run("residue.fiber_loops", tol, [&] {
    const cplx z = job.config().base_z.value_or(default_base_point(curve));
    double worst = 0.0;
    for (int t = 0; t < curve.m(); ++t) {
      const auto loop = loop_around_fiber_point(curve, z, t);
      for (const int j : js) {
        const cplx q = integrate(curve, loop, Integrand::kappa(z, j));
        const cplx r = residue_at_fiber_point(curve, z, t, j);
        worst = std::max(worst, detail::relative(std::abs(q - two_pi_i * r), std::abs(two_pi_i * r)));
      }
    }
    return worst;
  });
  return out.report;
}

enum class MonodromyCase { Trivial, FiberOnly, MixedP3, General };

inline const char* to_string(MonodromyCase c) {
  switch (c) {
    case MonodromyCase::Trivial: return "case1";
    case MonodromyCase::FiberOnly: return "case2";
    case MonodromyCase::MixedP3: return "case3";
    case MonodromyCase::General: return "general";
  }
  return "?";
}

/// Which closed form applies: no fiber loops anywhere (Case 1), for p = 3
/// fiber loops in the first chain and none in the second (Case 3), or only
/// fiber loops (Case 2).
inline MonodromyCase classify(const FundamentalSolution& sol) {
  const auto& chains = sol.chains();
  const auto fibers = [](const Chain& ch) {
    int n = 0;
    for (const auto& t : ch.terms) n += t.loop.kind == LoopKind::FiberPoint ? 1 : 0;
    return n;
  };
  int total = 0, fiber = 0;
  for (const auto& ch : chains) {
    total += static_cast<int>(ch.terms.size());
    fiber += fibers(ch);
  }
  if (fiber == 0) return MonodromyCase::Trivial;
  if (sol.p() == 3 && fibers(chains[0]) == static_cast<int>(chains[0].terms.size()) && fibers(chains[1]) == 0) {
    return MonodromyCase::MixedP3;
  }
  if (fiber == total) return MonodromyCase::FiberOnly;
  return MonodromyCase::General;
}

inline Report verify_monodromy(const Job& job) {
  detail::CheckList out;
  const auto& sol = job.solution();
  const auto& tol = job.tol();
  const int N = job.curve().N();
  MonodromyData data;
  out.run("monodromy.spectrum", tol.monodromy, [&] {
    data = monodromy_data(sol, job.B());
    double worst = 0.0;
    for (int j = 0; j < N; ++j) {
      worst = std::max(worst, spectrum_error(data.generators[static_cast<std::size_t>(j)], expected_eigenvalues(sol, j)));
    }
    return worst;
  });
  out.run("monodromy.upper_triangular", tol.monodromy, [&] {
    double worst = 0.0;
    for (const auto& M : data.generators) worst = std::max(worst, lower_triangle(M));
    return worst;
  });
  const auto kind = classify(sol);
  if (kind != MonodromyCase::General) {
    out.run(std::string("monodromy.closed_form.") + to_string(kind), tol.monodromy, [&] {
      const auto ahat = alpha_hat(phi(sol, sol.base_z()));
      double worst = 0.0;
      for (int j = 0; j < N; ++j) {
        const cplx th = sol.theta()[static_cast<std::size_t>(j)];
        Matrix expect;
        switch (kind) {
          case MonodromyCase::Trivial: expect = case1_monodromy(sol, j); break;
          case MonodromyCase::FiberOnly: expect = case2_monodromy(sol, j, ahat); break;
          default: expect = case3_p3(th, sol.curve().step(), ahat[0]); break;
        }
        worst = std::max(worst, max_abs(data.generators[static_cast<std::size_t>(j)] - expect));
      }
      return worst;
    });
  }
  out.run("monodromy.infinity", tol.monodromy, [&] {
    const Matrix direct = monodromy_along(sol, job.B(), large_circle(sol.curve(), sol.base_z()));
    return detail::relative(max_abs(monodromy_at_infinity(data) - direct), max_abs(direct));
  });
  out.run("monodromy.isomonodromy", tol.isomonodromy, [&] {
    std::mt19937_64 rng(detail::suite_seed(job.seed(), 4));
    std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
    const double size = std::min(1e-3, job.curve().sep() / 20.0);
    std::vector<cplx> delta;
    for (int i = 0; i < N; ++i) delta.push_back(std::polar(size, u(rng)));
    return isomonodromy_check(sol, job.B(), delta);
  });
  return out.report;
}

inline Report run_suite(const Job& job, const std::string& suite) {
  if (suite == "schlesinger") return verify_schlesinger(job);
  if (suite == "ode") return verify_ode(job);
  if (suite == "partition") return verify_partition(job);
  if (suite == "lemma1") return verify_lemma1(job);
  if (suite == "residue-duality") return verify_residue_duality(job);
  if (suite == "monodromy") return verify_monodromy(job);
  if (suite == "all") {
    Report all;
    for (const auto& s : suite_names()) all.append(run_suite(job, s));
    return all;
  }
  throw InvalidArgument("unknown suite '" + suite + "'");
}

}  // namespace isotri
