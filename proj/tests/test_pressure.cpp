#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "qdim/error.hpp"
#include "qdim/pressure.hpp"

using namespace qdim;
using doctest::Approx;

namespace {

double e1_closed(double q, double t) { return std::log(2.0) - q * std::log(2.0) - t * std::log(3.0); }

}  // namespace

TEST_CASE("pressure_word_sum examples") {
  const auto e1 = fixtures::cantor();
  const auto w = fixtures::e1_weights();
  CHECK(pressure_word_sum(e1, w, 0.0, 0.0, 3, 0) == Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(pressure_word_sum(e1, w, 1.0, 0.0, 4, 0) == Approx(0.0).epsilon(1e-13));
  CHECK(pressure_word_sum(e1, w, 0.5, 0.3, 5, 0) == Approx(e1_closed(0.5, 0.3)).epsilon(1e-13));

  // E3 at M = 2: log(1/2 * 1/3 + 1/4 * 1/9) at q = t = 1.
  const auto e3 = fixtures::e3();
  CHECK(pressure_word_sum(e3, fixtures::e3_weights(), 1.0, 1.0, 2, 2) ==
        Approx(std::log(1.0 / 6.0 + 1.0 / 36.0)).epsilon(1e-13));
  CHECK_THROWS_AS((void)pressure_word_sum(e1, w, 0.5, 0.5, 0, 0), SpecError);
}

TEST_CASE("tree enumeration agrees with the product identity") {
  PressureOptions o;
  o.force_tree = true;
  o.depth = 4;
  PressureModel tree(fixtures::cantor(), fixtures::e2_weights(), o);
  PressureModel exact(fixtures::cantor(), fixtures::e2_weights());
  CHECK(exact.multiplicative());
  CHECK_FALSE(tree.multiplicative());
  for (double q : {0.0, 0.3, 1.0}) {
    for (double t : {-0.5, 0.0, 0.8}) {
      CHECK(tree(q, t) == Approx(exact(q, t)).epsilon(1e-12));
      CHECK(tree.word_sum(q, t, 3) == Approx(exact(q, t)).epsilon(1e-12));
    }
  }
  CHECK(exact.estimate(0.2, 0.2).exact);
}

TEST_CASE("theta of infinite systems") {
  // Closed form: sum 2^{-iq} 3^{-it} converges iff t > -q log 2 / log 3.
  const auto th = theta_of_q(fixtures::e3(), fixtures::e3_weights(), 0.5);
  CHECK(th.method == ThetaResult::Method::closed_form);
  CHECK(th.theta == Approx(-0.5 * oracle::log2_over_log3()).epsilon(1e-14));

  // Gauss, f = 0.6 log|phi'|: sum i^{-1.2 q - 2 t} converges iff t > (1 - 1.2 q) / 2.
  const auto tg = theta_of_q(gauss_system_infinite(), PotentialFamily::derivative_power(0.6), 0.5);
  CHECK(tg.method == ThetaResult::Method::tail_descriptor);
  CHECK(tg.theta == Approx(0.2).epsilon(1e-12));

  const auto tf = theta_of_q(fixtures::cantor(), fixtures::e1_weights(), 0.5);
  CHECK(tf.unbounded_below());
  CHECK(to_string(tf.method) == "finite-alphabet");
}

TEST_CASE("infinite pressure: closed form and truncation") {
  PressureModel full(fixtures::e3(), fixtures::e3_weights());
  const double u = std::pow(2.0, -0.5) * std::pow(3.0, -0.5);
  CHECK(full(0.5, 0.5) == Approx(std::log(u / (1 - u))).epsilon(1e-13));
  CHECK(std::isinf(full(0.5, -0.5)));

  PressureOptions o;
  o.truncation = 3;
  PressureModel m3(fixtures::e3(), fixtures::e3_weights(), o);
  CHECK(m3(0.5, 0.5) == Approx(std::log(u + u * u + u * u * u)).epsilon(1e-13));
  CHECK(m3.estimate(0.5, 0.5).tail_bound > 0.0);

  CHECK_THROWS_AS(PressureModel(gauss_system_infinite(), PotentialFamily::derivative_power(0.6)),
                  SpecError);
}

TEST_CASE("beta on E1 matches the closed form") {
  PressureModel pm(fixtures::cantor(), fixtures::e1_weights());
  for (double q : linear_grid(-1.0, 2.0, 13)) {
    CHECK(solve_beta(pm, q).beta == Approx(oracle::e1_beta(q)).epsilon(1e-11));
  }
  CHECK(std::abs(beta_of_q(fixtures::cantor(), fixtures::e1_weights(), 1.0, 0)) <= 1e-10);
  CHECK(hausdorff_dim(pm) == Approx(oracle::log2_over_log3()).epsilon(1e-11));
}

TEST_CASE("quantization dimension: E1, E2 and E3") {
  const double d = oracle::log2_over_log3();
  for (double r : {0.5, 1.0, 2.0, 3.0}) {
    const auto s1 = solve_quantization_dim(fixtures::cantor(), fixtures::e1_weights(), r, 0);
    CHECK(s1.kappa_r == Approx(d).epsilon(1e-9));
    CHECK(s1.D_r == Approx(s1.kappa_r).epsilon(1e-9));
    CHECK(s1.q_r == Approx(oracle::binary_q_r(0.5, 0.5, 1.0 / 3.0, r)).epsilon(1e-9));
  }
  const auto s2 = solve_quantization_dim(fixtures::cantor(), fixtures::e2_weights(), 2.0, 0);
  const double q2 = oracle::binary_q_r(0.7, 0.3, 1.0 / 3.0, 2.0);
  CHECK(s2.q_r == Approx(q2).epsilon(1e-9));
  CHECK(s2.kappa_r == Approx(oracle::kappa_from_q(2.0, q2)).epsilon(1e-8));
  CHECK(s2.kappa_r == Approx(0.612).epsilon(1e-3));
  CHECK(s2.residual <= 1e-8);
  CHECK_FALSE(s2.trace.empty());

  const auto s3 = solve_quantization_dim(fixtures::e3(), fixtures::e3_weights(), 2.0, 0);
  CHECK(s3.kappa_r == Approx(d).epsilon(1e-9));
  CHECK_THROWS_AS((void)solve_quantization_dim(fixtures::cantor(), fixtures::e1_weights(), -1.0, 0),
                  SpecError);
}

TEST_CASE("truncation sweep on E3") {
  const auto s = truncation_sweep(fixtures::e3(), fixtures::e3_weights(), 2.0, {1, 2, 3, 5, 10});
  REQUIRE(s.entries.size() == 5);
  CHECK(s.entries[0].degenerate);
  CHECK(s.entries[0].kappa == 0.0);
  CHECK(s.entries[1].kappa == Approx(oracle::kappa_from_q(2.0, oracle::e3_golden_q())).epsilon(1e-9));
  for (std::size_t k = 2; k < s.entries.size(); ++k) {
    const int M = static_cast<int>(s.entries[k].truncation);
    CHECK(s.entries[k].kappa == Approx(oracle::e3_truncated_kappa(M, 2.0)).epsilon(1e-8));
  }
  CHECK(s.nondecreasing);
  REQUIRE(s.full_kappa.has_value());
  CHECK(*s.full_kappa == Approx(oracle::log2_over_log3()).epsilon(1e-9));
  CHECK(*s.final_gap >= 0.0);
}

TEST_CASE("Gauss {1,2} Hausdorff dimension") {
  const double oracle_dim = oracle::gauss_dimension(2, 14);
  CHECK(oracle_dim == Approx(0.5313).epsilon(1e-3));
  const double d = hausdorff_dim(gauss_system(2), PotentialFamily::derivative_power(1.0), 0);
  CHECK(std::abs(d - oracle_dim) <= 1e-3);
}

TEST_CASE("temperature sample and figure data on E2") {
  PressureModel pm(fixtures::cantor(), fixtures::e2_weights());
  const auto ts = temperature_sample(pm, linear_grid(0.0, 1.0, 21));
  CHECK(ts.points.size() == 21);
  CHECK(ts.convexity_defect <= 1e-8);
  CHECK(ts.strictly_decreasing);
  CHECK(ts.points.back().second == Approx(0.0).epsilon(1e-10));

  const auto fig = legendre_and_figure_data(pm, 2.0, linear_grid(0.0, 1.0, 21));
  const auto sol = solve_quantization_dim(pm, 2.0);
  CHECK(fig.q_r == Approx(sol.q_r).epsilon(1e-9));
  CHECK(fig.intercept == Approx(sol.kappa_r).epsilon(1e-8));
  CHECK(fig.intersection_y == Approx(2.0 * sol.q_r).epsilon(1e-8));
  REQUIRE(fig.rows.size() == 21);
  CHECK(fig.rows.back().chord == Approx(0.0).epsilon(1e-12));
  CHECK(fig.rows.front().chord == Approx(fig.intercept).epsilon(1e-12));
  CHECK_FALSE(fig.spectrum.empty());
  // The multifractal spectrum never exceeds the Hausdorff dimension of the support.
  for (const auto& p : fig.spectrum) CHECK(p.f <= oracle::log2_over_log3() + 1e-6);
}

TEST_CASE("pressure invariants on sampled grids") {
  const auto g = gauss_system(3);
  const auto fam = PotentialFamily::derivative_power(1.0);
  PressureOptions o;
  o.depth = 4;
  PressureModel pm(g, fam, o);
  for (double q : {0.0, 0.5, 1.0}) {
    double prev = pm(q, -0.5);
    for (double t : {-0.25, 0.0, 0.25, 0.5, 0.75}) {
      const double cur = pm(q, t);
      CHECK(cur < prev);
      prev = cur;
    }
  }
  const auto e3 = fixtures::e3();
  const auto w = fixtures::e3_weights();
  for (std::size_t M = 1; M < 8; ++M) {
    PressureOptions a, b;
    a.truncation = M;
    b.truncation = M + 1;
    PressureModel pa(e3, w, a), pb(e3, w, b);
    for (double q : {0.0, 0.5, 1.0}) {
      for (double t : {0.0, 0.5, 1.0}) CHECK(pa(q, t) <= pb(q, t));
    }
  }
}

TEST_CASE("linear_grid") {
  const auto g = linear_grid(0.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[1] == Approx(0.25));
  CHECK(g.back() == 1.0);
  CHECK(linear_grid(0.3, 1.0, 1) == std::vector<double>{0.3});
  CHECK(linear_grid(0.0, 1.0, 0).empty());
}
