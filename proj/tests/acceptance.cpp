// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from oracles.hpp.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "qdim/cli.hpp"
#include "qdim/conformal_measure.hpp"
#include "qdim/error.hpp"
#include "qdim/pressure.hpp"
#include "qdim/quantization.hpp"

using namespace qdim;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// log sum_{i <= count} p_i^q s_i^t, summed directly from the maps.
double direct_log_sum(const IfsSystem& sys, const PotentialFamily& fam, std::size_t count,
                      double q, double t) {
  long double s = 0.0L;
  for (Symbol i = 1; i <= count; ++i) {
    const double ratio = sys.map(i).derivative_bound();
    s += std::exp(q * fam.log_weight(i) + t * std::log(ratio));
  }
  return static_cast<double>(std::log(s));
}

Verdict c1_multiplicative() {
  Verdict v;
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  struct Case {
    IfsSystem sys;
    PotentialFamily fam;
    std::size_t M;
    std::size_t tree_depth;
  };
  const Case cases[] = {{fixtures::cantor(), fixtures::e1_weights(), 0, 6},
                        {fixtures::e3(), fixtures::e3_weights(), 50, 3}};
  double worst = 0.0;
  for (const auto& c : cases) {
    PressureOptions o;
    o.truncation = c.M;
    o.force_tree = true;
    PressureModel tree(c.sys, c.fam, o);
    const std::size_t count = c.sys.effective_size(c.M);
    for (double q : grid) {
      for (double t : grid) {
        const double ref = direct_log_sum(c.sys, c.fam, count, q, t);
        for (std::size_t n = 1; n <= 6; ++n) {
          worst = std::max(worst, std::abs(pressure_word_sum(c.sys, c.fam, q, t, n, c.M) - ref));
          if (n <= c.tree_depth) worst = std::max(worst, std::abs(tree.word_sum(q, t, n) - ref));
        }
      }
    }
  }
  v.require(worst <= 1e-12, "max deviation " + num(worst));
  if (v.ok) v.detail = "max deviation " + num(worst);
  return v;
}

Verdict c2_temperature() {
  Verdict v;
  const auto sys = fixtures::cantor();
  const auto fam = fixtures::e1_weights();
  double worst = 0.0;
  for (double q : linear_grid(0.0, 1.0, 21)) {
    worst = std::max(worst, std::abs(beta_of_q(sys, fam, q, 0) - oracle::e1_beta(q)));
  }
  const double b1 = beta_of_q(sys, fam, 1.0, 0);
  const double b0 = beta_of_q(sys, fam, 0.0, 0);
  const double dh = hausdorff_dim(sys, fam, 0);
  v.require(worst <= 1e-10, "grid deviation " + num(worst));
  v.require(std::abs(b1) <= 1e-10, "beta(1) = " + num(b1));
  v.require(std::abs(b0 - dh) <= 1e-10, "beta(0) - dim_H = " + num(b0 - dh));
  if (v.ok) v.detail = "grid deviation " + num(worst);
  return v;
}

Verdict c3_fixed_point() {
  Verdict v;
  const double d = oracle::log2_over_log3();
  double worst = 0.0;
  for (double r : {0.5, 1.0, 2.0, 3.0}) {
    const auto a = solve_quantization_dim(fixtures::cantor(), fixtures::e1_weights(), r, 0);
    const auto b = solve_quantization_dim(fixtures::e3(), fixtures::e3_weights(), r, 0);
    for (const auto* s : {&a, &b}) {
      worst = std::max({worst, std::abs(s->kappa_r - d), std::abs(s->D_r - d)});
    }
  }
  v.require(worst <= 1e-8, "kappa deviation " + num(worst));
  if (v.ok) v.detail = "kappa deviation " + num(worst);
  return v;
}

Verdict c4_sweep() {
  Verdict v;
  std::vector<std::size_t> Ms;
  for (std::size_t M = 1; M <= 20; ++M) Ms.push_back(M);
  const auto s = truncation_sweep(fixtures::e3(), fixtures::e3_weights(), 2.0, Ms);
  const double k2 = oracle::kappa_from_q(2.0, oracle::e3_golden_q());
  const double k20_oracle = oracle::e3_truncated_kappa(20, 2.0);
  const double k20 = s.entries.back().kappa;
  v.require(s.entries.front().degenerate && s.entries.front().kappa == 0.0, "kappa_{2,1} != 0");
  v.require(std::abs(s.entries[1].kappa - k2) <= 1e-8,
            "kappa_{2,2} = " + num(s.entries[1].kappa) + " vs " + num(k2));
  v.require(s.nondecreasing, "sequence not nondecreasing");
  v.require(std::abs(k20 - k20_oracle) <= 1e-8, "kappa_{2,20} differs from root oracle");
  v.require(std::abs(k20 - oracle::log2_over_log3()) <= 1e-3, "kappa_{2,20} = " + num(k20));
  if (v.ok) v.detail = "kappa_{2,2} = " + num(s.entries[1].kappa) + ", kappa_{2,20} = " + num(k20);
  return v;
}

Verdict c5_gauss() {
  Verdict v;
  const double ref = oracle::gauss_dimension(2, 12);
  const double d = hausdorff_dim(gauss_system(2), PotentialFamily::derivative_power(1.0), 0);
  v.require(std::abs(d - ref) <= 1e-2, "dim " + num(d) + " vs oracle " + num(ref));
  v.require(std::abs(d - 0.5313) <= 1e-2, "dim " + num(d) + " vs 0.5313");
  if (v.ok) v.detail = "dim_H = " + num(d) + ", oracle " + num(ref);
  return v;
}

Verdict c6_quantizer() {
  Verdict v;
  const auto s = sample_measure(fixtures::cantor(), fixtures::e1_weights(), 200000, 0, 0,
                                cli::kDefaultSeed);
  const auto r1 = lloyd_optimize(s, 1, 2.0);
  const auto r2 = lloyd_optimize(s, 2, 2.0);
  const double D = loglog_dimension({1, 2}, {r1.V_hat, r2.V_hat}, 2.0).D_hat;
  const double d = oracle::log2_over_log3();
  v.require(std::abs(r1.V_hat / 0.125 - 1.0) <= 0.04, "V_1 = " + num(r1.V_hat));
  v.require(std::abs(r2.V_hat * 72.0 - 1.0) <= 0.10, "V_2 = " + num(r2.V_hat));
  v.require(std::abs(D / d - 1.0) <= 0.08, "two-point D = " + num(D));
  if (v.ok) v.detail = "V_1 = " + num(r1.V_hat) + ", V_2 = " + num(r2.V_hat) + ", D = " + num(D);
  return v;
}

Verdict c7_verify() {
  Verdict v;
  std::ostringstream out, err;
  const int code = cli::run_cli({"verify", "--system", fixtures::data_file("e2.json"), "--r", "2",
                                 "--n-list", "4,8,16,32,64,128,256,512", "--samples", "200000"},
                                out, err);
  v.require(code == cli::kOk, "verify exit code " + std::to_string(code) + " " + err.str());
  if (!v.ok) return v;
  const auto j = nlohmann::json::parse(out.str());
  const double q = oracle::binary_q_r(0.7, 0.3, 1.0 / 3.0, 2.0);
  const double kappa = oracle::kappa_from_q(2.0, q);
  const double reported = j["kappa_r"].get<double>();
  const double D_hat = j["D_hat"].get<double>();
  const double gap = std::abs(D_hat - kappa) / kappa;
  v.require(std::abs(reported - kappa) <= 1e-8, "kappa_2 = " + num(reported) + " vs " + num(kappa));
  v.require(gap <= 0.15, "relative gap " + num(gap));
  if (v.ok) v.detail = "D_hat = " + num(D_hat) + ", kappa_2 = " + num(kappa) + ", gap " + num(gap);
  return v;
}

Verdict c8_antichain() {
  Verdict v;
  const double r = 2.0;
  const double kappa = oracle::log2_over_log3();
  const auto s = sample_measure(fixtures::cantor(), fixtures::e1_weights(), 200000, 0, 0,
                                cli::kDefaultSeed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t n = 4; n <= 256; n *= 2) {
    const auto a = antichain_codebook(fixtures::cantor(), fixtures::e1_weights(), r, n, 0, kappa);
    v.require(a.cardinality <= n, "Card(Gamma_" + std::to_string(n) + ") = " +
                                      std::to_string(a.cardinality));
    v.require(a.prefix_free && a.maximal, "antichain not a maximal prefix-free set");
    const double V = quant_error(s, a.codebook, r);
    const double c = static_cast<double>(n) * std::pow(V, kappa / r);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  v.require(hi / lo <= 50.0, "max/min ratio " + num(hi / lo));
  if (v.ok) v.detail = "series range [" + num(lo) + ", " + num(hi) + "]";
  return v;
}

Verdict c9_measure_convergence() {
  Verdict v;
  const double r = 2.0;
  const std::size_t N = 50000;
  const std::uint64_t seed = cli::kDefaultSeed;
  const auto sys = fixtures::e3();
  const auto fam = fixtures::e3_weights();
  const auto full = sample_measure(sys, fam, N, 0, 0, seed);

  SampleOptions o;
  o.allow_deficit = true;
  double prev_rho = std::numeric_limits<double>::infinity();
  double prev_sigma = 0.0;
  std::string rhos;
  for (std::size_t M : {2, 4, 8, 16}) {
    const auto part = sample_measure(sys, fam, N, 0, M, seed, o);
    const auto w = wasserstein_1d_detail(r, part.points, full.points);
    const double slack = 3.0 * std::hypot(w.distance_stderr, prev_sigma);
    v.require(w.distance <= prev_rho + slack, "rho_2 increased at M = " + std::to_string(M));
    rhos += (rhos.empty() ? "" : ", ") + num(w.distance);
    prev_rho = w.distance;
    prev_sigma = w.distance_stderr;

    for (std::size_t n : {4, 16, 64}) {
      // Both errors are minimised over one shared pool of codebooks.
      std::vector<std::vector<double>> pool;
      pool.push_back(lloyd_optimize(part, n, r).codebook.points);
      pool.push_back(lloyd_optimize(full, n, r).codebook.points);
      double e_part = std::numeric_limits<double>::infinity();
      double e_full = e_part;
      for (const auto& cb : pool) {
        e_part = std::min(e_part, std::pow(quant_error(part.points, cb, r), 1.0 / r));
        e_full = std::min(e_full, std::pow(quant_error(full.points, cb, r), 1.0 / r));
      }
      v.require(std::abs(e_part - e_full) <= w.distance + 3.0 * w.distance_stderr,
                "|e_M - e_F| too large at M = " + std::to_string(M) + ", n = " + std::to_string(n));
    }
  }
  if (v.ok) v.detail = "rho_2 over M = 2,4,8,16: " + rhos;
  return v;
}

Verdict c10_convexity() {
  Verdict v;
  const auto grid = linear_grid(-1.0, 2.0, 31);
  double defect = 0.0;
  {
    PressureModel e2(fixtures::cantor(), fixtures::e2_weights());
    defect = std::max(defect, temperature_sample(e2, grid).convexity_defect);
    PressureOptions o;
    o.depth = 4;
    PressureModel g3(gauss_system(3), PotentialFamily::derivative_power(1.0), o);
    defect = std::max(defect, temperature_sample(g3, linear_grid(0.0, 1.0, 11)).convexity_defect);
  }
  v.require(defect <= 1e-8, "convexity defect " + num(defect));

  const std::vector<double> ts{-0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> qs{0.0, 0.5, 1.0};
  {
    PressureModel e2(fixtures::cantor(), fixtures::e2_weights());
    PressureOptions o;
    o.depth = 4;
    PressureModel g3(gauss_system(3), PotentialFamily::derivative_power(1.0), o);
    for (const PressureModel* pm : {&e2, &g3}) {
      for (double q : qs) {
        for (std::size_t k = 1; k < ts.size(); ++k) {
          v.require((*pm)(q, ts[k]) < (*pm)(q, ts[k - 1]), "P not strictly decreasing in t");
        }
      }
    }
  }

  const auto gauss = gauss_system_infinite();
  const auto g06 = PotentialFamily::derivative_power(0.6);
  for (std::size_t M = 1; M < 8; ++M) {
    PressureOptions a, b;
    a.truncation = M;
    b.truncation = M + 1;
    PressureModel ea(fixtures::e3(), fixtures::e3_weights(), a), eb(fixtures::e3(), fixtures::e3_weights(), b);
    a.depth = b.depth = 3;
    PressureModel ga(gauss, g06, a), gb(gauss, g06, b);
    for (double q : qs) {
      for (double t : {0.0, 0.5, 1.0}) {
        v.require(ea(q, t) <= eb(q, t), "E3: P_M > P_{M+1} at M = " + std::to_string(M));
        v.require(ga(q, t) <= gb(q, t), "Gauss: P_M > P_{M+1} at M = " + std::to_string(M));
      }
    }
  }
  if (v.ok) v.detail = "convexity defect " + num(defect);
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "multiplicative exactness", 1.0, c1_multiplicative},
      {2, "temperature closed form", 1.0, c2_temperature},
      {3, "fixed point kappa_r = D_r", 5.0, c3_fixed_point},
      {4, "truncation sweep", 10.0, c4_sweep},
      {5, "continued-fraction dimension", 10.0, c5_gauss},
      {6, "quantizer oracles", 30.0, c6_quantizer},
      {7, "verify on E2", 120.0, c7_verify},
      {8, "antichain bound", 60.0, c8_antichain},
      {9, "measure convergence", 60.0, c9_measure_convergence},
      {10, "convexity and monotonicity", 5.0, c10_convexity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (v.ok && secs > c.limit_s) {
      v.ok = false;
      v.detail += " (runtime " + num(secs) + " s over " + num(c.limit_s) + " s)";
    }
    if (!v.ok) ++failures;
    std::printf("[%s] %2d %-30s %7.2f s  %s\n", v.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
