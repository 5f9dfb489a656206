// Acceptance run: one [PASS]/[FAIL] line per criterion.
//
// Exit status is nonzero only for failures not listed in known_failures.json;
// --strict makes every failure count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "frozen_values.hpp"
#include "p1_poisson.hpp"
#include "plap/cli.hpp"
#include "plap/errors.hpp"
#include "plap/experiments.hpp"
#include "plap/exponents.hpp"
#include "plap/oscillation.hpp"
#include "plap/quasiregular.hpp"
#include "plap/scaling.hpp"
#include "plap/solver.hpp"

namespace fs = std::filesystem;
using namespace plap;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool hard = false;  ///< failed outside the part a known-failure entry covers
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g6(double v) { return fmt("%.6g", v); }

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double frozen_lookup(const auto& table, double p) {
  for (const auto& [q, v] : table) {
    if (q == p) return v;
  }
  return std::nan("");
}

// ------------------------------------------------------------------ 1

Outcome exponent_chain_criterion() {
  Timer t;
  bool ok = true;
  double min_margin = 1.0;
  for (double p : {2.1, 2.5, 3.0, 4.0, 5.0, 10.0, 50.0}) {
    const ChainReport c = exponent_chain(p);
    ok &= c.pass && c.margin_upper > 0 && c.margin_lower > 0;
    min_margin = std::min({min_margin, c.margin_upper, c.margin_lower});
  }
  const double bk4 = alpha_bk(4.0);
  ok &= alpha_star(2.0) == 1.0 && alpha_bk(2.0) == 1.0;
  ok &= std::abs(bk4 - 0.404072) <= 1e-5;
  ok &= std::abs(bk4 - frozen_lookup(frozen::kAlphaBk, 4.0)) <= 1e-12;
  ok &= std::abs(alpha_star(4.0) - frozen_lookup(frozen::kAlphaStar, 4.0)) <= 1e-12;
  const double s = t.seconds();
  ok &= s < 1.0;
  return {ok, "min margin " + g6(min_margin) + ", alpha_bk(4) " + fmt("%.8f", bk4) + ", " + g6(s) + " s"};
}

// ------------------------------------------------------------------ 2

Outcome p2_regression_criterion() {
  Timer t;
  auto g = build_grid(32, false);
  const ProblemSpec spec = make_problem(g, 2.0, parse_expression("sinsin"), parse_expression("zero"));
  const SolverResult r = solve(spec);
  const auto ref = oracle::poisson_direct(*g, spec.f.values, spec.dirichlet.values);
  const double d = sup_distance(r.u, GridFunction(g, ref));
  const double s = t.seconds();
  return {r.converged && d <= 1e-8 && s < 10.0, "Linf " + g6(d) + ", " + g6(s) + " s"};
}

// ------------------------------------------------------------------ 3-5

struct RadialData {
  std::vector<ConvergenceRow> rows;
  double seconds = 0.0;
};

const RadialData& radial_data() {
  static const RadialData data = [] {
    Timer t;
    const std::vector<int> ns{32, 64, 128};
    RadialData d;
    d.rows = convergence_study(ns, 3.0);
    d.seconds = t.seconds();
    return d;
  }();
  return data;
}

Outcome radial_criterion() {
  const auto& d = radial_data();
  bool ok = d.seconds < 300.0;
  std::string detail = "errors";
  for (const auto& r : d.rows) {
    ok &= r.converged;
    detail += " " + g6(r.linf_error);
  }
  ok &= d.rows[1].linf_error <= 2e-2;
  ok &= d.rows[1].ratio < 0.7 && d.rows[2].ratio < 0.7;
  detail += ", ratios " + g6(d.rows[1].ratio) + " " + g6(d.rows[2].ratio) + ", " + g6(d.seconds) + " s";
  return {ok, detail};
}

Outcome exponent_measurement_criterion() {
  const ConvergenceRow& fine = radial_data().rows[2];
  bool ok = fine.levels == 5 && std::abs(fine.origin_slope - 1.5) <= 0.1;
  std::string detail = "radial slope " + fmt("%.4f", fine.origin_slope);
  for (double p : {3.0, 4.0}) {
    const double pc = conjugate(p);
    auto g = build_grid(128, true);
    const GridFunction u = sample(g, [pc](const Vec2& x) { return std::pow(x.norm(), pc); });
    const double slope = fit_exponent(profile(u, g->index(64, 64), 0.25, 5), OscKind::centered).slope;
    ok &= std::abs(slope - pc) <= 0.05;
    detail += ", sampled p=" + g6(p) + " slope " + fmt("%.4f", slope) + " (p' " + fmt("%.4f", pc) + ")";
  }
  return {ok, detail};
}

Outcome oscillation_bound_criterion() {
  const auto& rows = radial_data().rows;
  const double c64 = rows[1].crack_constant, c128 = rows[2].crack_constant;
  const double drift = std::abs(c128 - c64) / c64;
  bool ok = std::isfinite(c64) && std::isfinite(c128) && drift <= 0.2;
  for (const auto& r : rows) ok &= r.triangle_ok;
  // Profiles at off-center points and on sampled extremal fields as well.
  auto g = build_grid(128, true);
  const GridFunction u = sample(g, [](const Vec2& x) { return std::pow(x.norm(), 1.5); });
  for (auto [i, j] : {std::pair{64, 64}, {80, 60}, {40, 50}}) {
    ok &= triangle_inequality_holds(profile(u, g->index(i, j), 0.25, 5));
  }
  return {ok, "C(64) " + fmt("%.4f", c64) + ", C(128) " + fmt("%.4f", c128) + ", drift " + fmt("%.3f", drift)};
}

// ------------------------------------------------------------------ 6

Outcome iteration_criterion() {
  Timer t;
  double worst = 0.0;
  for (double p : {3.0, 4.0}) {
    const double pc = conjugate(p);
    for (double lambda : {0.1, 0.25, 0.4}) {
      for (double gn : {0.0, 0.5, 1.0, 4.0}) {
        for (int k = 0; k <= 40; ++k) {
          const double q = std::pow(lambda, pc - 1.0);
          double s = 0.0, term = 1.0;
          for (int i = 0; i < k; ++i) s += term, term *= q;
          const double brute = std::pow(lambda, k * pc) + gn * std::pow(lambda, k) * s;
          worst = std::max(worst, std::abs(iteration_bound(k, lambda, gn, p) - brute) / brute);
        }
      }
    }
  }
  const double sec = t.seconds();
  return {worst <= 1e-12 && sec < 1.0, "max rel diff " + g6(worst) + ", " + g6(sec) + " s"};
}

// ------------------------------------------------------------------ 7

double positive_sup(const GridFunction& defect, const ComplexField& f) {
  return positive_part_stats(defect, f, 0.1).sup_positive;
}

Outcome quasiregular_criterion() {
  double kqr[2], jac[2];
  bool ok = true;
  for (int k = 0; k < 2; ++k) {
    auto g = build_grid(64 << k, false);
    const SolverResult r = solve(make_problem(g, 3.0, parse_expression("zero"), parse_expression("saddle")));
    ok &= r.converged;
    const ComplexField f = wirtinger(complex_gradient(r.u));
    kqr[k] = positive_sup(kqr_defect(f, 3.0), f);
    jac[k] = positive_sup(jacobian_check(f, 3.0), f);
  }
  const double kf = kqr[1] / kqr[0], jf = jac[1] / jac[0];
  ok &= kf <= 0.7 && jf <= 0.7;
  const bool defects_ok = ok;

  double gm[3];
  for (int k = 0; k < 3; ++k) {
    auto g = build_grid(32 << k, false);
    const GridFunction u = sample(g, parse_expression("sincos"));
    const GradientMappingDefect d = gradient_mapping_defect(wirtinger(complex_gradient(u)), u);
    gm[k] = std::max(d.imag_sup, d.laplacian_sup);
  }
  const double r1 = gm[0] / gm[1], r2 = gm[1] / gm[2];
  const bool first_order = r1 >= 1.8 && r1 <= 2.2 && r2 >= 1.8 && r2 <= 2.2;
  ok &= first_order;
  return {ok, "kqr+ " + g6(kqr[0]) + " -> " + g6(kqr[1]) + " (x" + fmt("%.3f", kf) + "), jacobian+ " + g6(jac[0]) +
                  " -> " + g6(jac[1]) + " (x" + fmt("%.3f", jf) + "), gradient-mapping defect " + g6(gm[0]) + " " +
                  g6(gm[1]) + " " + g6(gm[2]) + " (ratios " + g6(r1) + " " + g6(r2) + ")",
          !defects_ok};
}

// ------------------------------------------------------------------ 8

Outcome scaling_criterion() {
  bool ok = true;
  for (double p = 2.05; p <= 60.0; p *= 1.1) {
    const double pc = conjugate(p);
    ok &= std::abs(pc * (p - 1.0) - p) <= 1e-12 * p;
    ok &= std::abs((pc - 1.0) - 1.0 / (p - 1.0)) <= 1e-12;
  }
  auto g = build_grid(64, true);
  const GridFunction u = sample(g, [](const Vec2& x) { return 2.0 * (1.0 - x.squaredNorm()); });
  const GridFunction f = sample(g, [](const Vec2& x) { return std::cos(x.x() + 0.5 * x.y()); });
  const double delta0 = 0.1;
  const ThetaResult th = theta_normalize(u, f, 3.0, delta0);
  const double fdev = std::abs(sup_norm(th.f_tilde) - delta0);
  ok &= fdev <= 1e-12;

  auto sq = build_grid(64, false);
  const double pc = conjugate(3.0);
  const GridFunction w = sample(sq, [pc](const Vec2& x) { return 0.5 * std::pow(x.norm(), pc); });
  const std::size_t base = sq->index(40, 36);
  const RescaleResult mu = mu_rescale(w, base, 3.0);
  const double gdev = std::abs(mu.record.output_grad0 - 1.0);
  ok &= mu.v.values[sq->index(32, 32)] == 0.0 && gdev <= 3 * sq->h();
  return {ok, "|f~| - delta0 " + g6(fdev) + ", ||grad w(0)| - 1| " + g6(gdev) + " (3h " + g6(3 * sq->h()) + ")"};
}

// ------------------------------------------------------------------ 9

Outcome corrector_criterion() {
  auto g = build_grid(64, true);
  const std::vector<double> scales{1.0, 0.1, 0.01};
  const ScalarExpr shape = parse_expression("const:1"), trace = parse_expression("sincos");
  const auto rows = corrector_sweep(g, 3.0, shape, scales, trace);
  bool ok = corrector_monotone(rows);
  std::string detail = "xi";
  for (const auto& r : rows) {
    ok &= r.converged;
    detail += " " + g6(r.xi_sup);
  }
  detail += ", grad xi";
  for (const auto& r : rows) detail += " " + g6(r.grad_xi_sup);
  const CorrectorRow zero = corrector_instance(g, 3.0, shape, 0.0, trace);
  ok &= zero.converged && zero.xi_sup <= 1e-8;
  detail += ", f=0: " + g6(zero.xi_sup);
  return {ok, detail};
}

// ------------------------------------------------------------------ 10

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream is(e.path(), std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    out[e.path().filename().string()] = os.str();
  }
  return out;
}

Outcome reproducibility_criterion() {
  const fs::path dir = fs::temp_directory_path() / "plap_acceptance_repro";
  const auto at = [&](const char* name) { return (dir / name).string(); };
  const std::vector<std::vector<std::string>> commands{
      {"exponents", "--out", at("table.csv")},
      {"solve", "--p", "3", "--n", "32", "--init", "random", "--seed", "3", "--out", at("u.csv"), "--dump",
       at("u.bin")},
      {"oscillate", "--solution", at("u.csv"), "--p", "3", "--rmax", "0.25", "--levels", "3", "--out",
       at("profile.csv")},
      {"qr", "--solution", at("u.csv"), "--p", "3", "--out", at("qr.json")},
      {"rescale", "--kind", "theta", "--solution", at("u.csv"), "--p", "3", "--out", at("theta.csv")},
      {"corrector", "--n", "32", "--bc", "sincos", "--scales", "1,0.1", "--out", at("corrector.csv")},
      {"convergence", "--ns", "16,32", "--out", at("convergence.csv")},
  };
  std::map<std::string, std::string> first;
  std::string failed;
  // Keep the command summaries out of the criterion report.
  std::ostringstream sink;
  std::streambuf* saved = std::cout.rdbuf(sink.rdbuf());
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& cmd : commands) {
      if (cli::run(cmd) != cli::kSuccess) failed += " " + cmd[0];
    }
    if (pass == 0) first = snapshot(dir);
  }
  std::cout.rdbuf(saved);
  const auto second = snapshot(dir);
  fs::remove_all(dir);
  const bool same = !first.empty() && first == second;
  if (!failed.empty()) return {false, "commands failed:" + failed};
  return {same, std::to_string(first.size()) + " files from " + std::to_string(commands.size()) + " commands" +
                    (same ? ", identical" : ", differ")};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::string(argv[1]) == "--strict";

  std::map<int, std::string> known;
  if (std::ifstream is(PLAP_TEST_DATA "/known_failures.json"); is) {
    const auto j = nlohmann::json::parse(is);
    for (const auto& [key, why] : j.items()) known[std::stoi(key)] = why.get<std::string>();
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exponent chain and spot values", exponent_chain_criterion},
      {"p = 2 regression against a direct P1 solve", p2_regression_criterion},
      {"radial benchmark error and refinement ratios", radial_criterion},
      {"sharp exponent at the critical point", exponent_measurement_criterion},
      {"oscillation bound constant and triangle inequality", oscillation_bound_criterion},
      {"iteration bound closed form", iteration_criterion},
      {"quasiregular defects and gradient-mapping order", quasiregular_criterion},
      {"scaling algebra", scaling_criterion},
      {"corrector sweep", corrector_criterion},
      {"bit-identical CLI reruns", reproducibility_criterion},
  };

  int unexpected = 0, failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %d %s (%s)\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str());
    if (!o.pass) {
      ++failures;
      if (known.count(id) && !o.hard) {
        std::printf("       known failure: %s\n", known[id].c_str());
      } else {
        ++unexpected;
      }
    }
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed, %d unexpected\n", criteria.size(), failures, unexpected);
  return (strict ? failures : unexpected) == 0 ? 0 : 1;
}
