#include "qdim/pressure.hpp"

#include <algorithm>
#include <cmath>

#include "qdim/error.hpp"

namespace qdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool geometric_weights(const PotentialFamily& family) {
  if (!family.is_constant()) return false;
  return std::holds_alternative<ConstantLogWeights::Geometric>(
      std::get<ConstantLogWeights>(family.family()).source);
}

double geometric_weight_ratio(const PotentialFamily& family) {
  return std::get<ConstantLogWeights::Geometric>(std::get<ConstantLogWeights>(family.family()).source)
      .ratio;
}

bool has_closed_infinite_form(const IfsSystem& system, const PotentialFamily& family) {
  return !system.is_finite() && system.is_similarity() && system.geometric_ratio() &&
         geometric_weights(family);
}

/// Bisection for a decreasing function with f(lo) > 0 > f(hi).
template <class F>
std::pair<double, int> bisect_decreasing(F&& f, double lo, double hi, double x_tol,
                                         int max_iter = 400) {
  int it = 0;
  while (hi - lo > x_tol && it < max_iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = f(mid);
    ++it;
    if (v == 0.0) return {mid, it};
    if (v > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), it};
}

}  // namespace

std::string to_string(ThetaResult::Method method) {
  switch (method) {
    case ThetaResult::Method::closed_form:
      return "closed-form";
    case ThetaResult::Method::tail_descriptor:
      return "tail-descriptor";
    case ThetaResult::Method::finite_alphabet:
      return "finite-alphabet";
  }
  return "unknown";
}

PressureModel::PressureModel(IfsSystem system, PotentialFamily family, PressureOptions options)
    : system_(std::move(system)), family_(std::move(family)), options_(options) {
  closed_infinite_ = options_.truncation == 0 && has_closed_infinite_form(system_, family_);
  if (!system_.is_finite() && options_.truncation == 0 && !closed_infinite_) {
    throw SpecError("this infinite system has no closed-form pressure; give a truncation M");
  }
  alphabet_ = closed_infinite_ ? 0 : system_.effective_size(options_.truncation);
  multiplicative_ = system_.is_similarity() && family_.is_constant() && !options_.force_tree;
  if (closed_infinite_ && options_.force_tree) {
    throw SpecError("tree enumeration needs a finite truncation");
  }
  if (multiplicative_ && !closed_infinite_) {
    log_p_.reserve(alphabet_);
    log_s_.reserve(alphabet_);
    for (Symbol i = 1; i <= alphabet_; ++i) {
      log_p_.push_back(family_.log_weight(i));
      log_s_.push_back(std::log(system_.map(i).similarity()->ratio));
    }
  }
  if (options_.depth > 0) {
    base_depth_ = options_.depth;
  } else if (alphabet_ > 1) {
    const double n = std::log(static_cast<double>(std::max<std::size_t>(options_.max_words, 4))) /
                     (2.0 * std::log(static_cast<double>(alphabet_)));
    base_depth_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(n)));
  } else {
    base_depth_ = 4;
  }
}

double PressureModel::exact_log_sum(double q, double t) const {
  if (closed_infinite_) {
    // sum_i ((1-w) w^{i-1} e^{-shift})^q (rho^i)^t = A / (1 - B)
    const double w = geometric_weight_ratio(family_);
    const double rho = *system_.geometric_ratio();
    const double log_b = q * std::log(w) + t * std::log(rho);
    if (log_b >= 0.0) return kInf;
    const double log_a = q * (std::log1p(-w) - family_.shift()) + t * std::log(rho);
    return log_a - std::log(-std::expm1(log_b));
  }
  std::vector<double> terms(log_p_.size());
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = q * log_p_[k] + t * log_s_[k];
  return log_sum_exp(terms);
}

const WordTable& PressureModel::table(std::size_t depth) const {
  std::lock_guard lock(cache_mutex_);
  auto& slot = tables_[depth];
  if (!slot) {
    WordTreeOptions tree;
    tree.grid = options_.grid;
    tree.threads = options_.threads;
    slot = std::make_unique<WordTable>(build_word_table(system_, family_, depth, alphabet_, tree));
  }
  return *slot;
}

double PressureModel::word_sum(double q, double t, std::size_t depth) const {
  if (depth == 0) throw SpecError("word sums need depth n >= 1");
  if (multiplicative_) return exact_log_sum(q, t);
  return log_word_sum(table(depth), q, t) / static_cast<double>(depth);
}

double PressureModel::tail_bound(double q, double t) const {
  if (system_.is_finite() || closed_infinite_) return 0.0;
  const TailDescriptor* maps = system_.tail();
  const auto weights = family_.weight_tail(system_);
  if (!maps || !weights) return kInf;
  const double poly = q * weights->poly_exponent() + t * maps->poly_exponent();
  const double rate = q * weights->exp_rate() + t * maps->exp_rate();
  const double log_c = q * std::log(weights->c) + t * std::log(maps->c);
  const double m = static_cast<double>(alphabet_);
  if (rate < 0.0) return kInf;
  if (rate == 0.0) {
    if (poly <= 1.0) return kInf;
    return std::exp(log_c) * std::pow(m, 1.0 - poly) / (poly - 1.0);
  }
  // Exponential decay: sum explicitly until the terms are negligible.
  double sum = 0.0;
  for (double i = m + 1.0; i < m + 1e6; i += 1.0) {
    const double term = std::exp(log_c - poly * std::log(i) - rate * i);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

PressureEstimate PressureModel::estimate(double q, double t) const {
  PressureEstimate e;
  e.q = q;
  e.t = t;
  e.truncation = options_.truncation;
  if (multiplicative_) {
    e.value = exact_log_sum(q, t);
    e.depths = {1};
    e.per_depth = {e.value};
    e.exact = true;
  } else {
    const std::size_t n = base_depth_;
    const double a_n = log_word_sum(table(n), q, t);
    const double a_2n = log_word_sum(table(2 * n), q, t);
    e.depths = {n, 2 * n};
    e.per_depth = {a_n / static_cast<double>(n), a_2n / static_cast<double>(2 * n)};
    // Telescoping removes the O(1/n) constant of a_n.
    e.value = (a_2n - a_n) / static_cast<double>(n);
    if (n >= 2) {
      const std::size_t h = n / 2;
      const double a_h = log_word_sum(table(h), q, t);
      e.depths.insert(e.depths.begin(), h);
      e.per_depth.insert(e.per_depth.begin(), a_h / static_cast<double>(h));
      e.error_indicator = std::abs(e.value - (a_n - a_h) / static_cast<double>(n - h));
    } else {
      e.error_indicator = std::abs(e.value - e.per_depth.back());
    }
  }
  e.tail_bound = tail_bound(q, t);
  e.finite = std::isfinite(e.value);
  return e;
}

double PressureModel::operator()(double q, double t) const {
  if (multiplicative_) return exact_log_sum(q, t);
  const std::size_t n = base_depth_;
  return (log_word_sum(table(2 * n), q, t) - log_word_sum(table(n), q, t)) /
         static_cast<double>(n);
}

ThetaResult PressureModel::effective_theta(double q) const {
  if (!closed_infinite_) return ThetaResult{q, -kInf, ThetaResult::Method::finite_alphabet};
  return theta_of_q(system_, family_, q);
}

double PressureModel::default_tolerance() const noexcept {
  return multiplicative_ ? 1e-10 : 1e-6;
}

double pressure_word_sum(const IfsSystem& system, const PotentialFamily& family, double q,
                         double t, std::size_t depth, std::size_t truncation) {
  PressureOptions options;
  options.truncation = truncation;
  const PressureModel model(system, family, options);
  return model.word_sum(q, t, depth);
}

ThetaResult theta_of_q(const IfsSystem& system, const PotentialFamily& family, double q) {
  if (system.is_finite()) return ThetaResult{q, -kInf, ThetaResult::Method::finite_alphabet};
  if (has_closed_infinite_form(system, family)) {
    // w^q rho^t < 1  <=>  t > -q log w / log rho
    const double w = geometric_weight_ratio(family);
    const double rho = *system.geometric_ratio();
    return ThetaResult{q, -q * std::log(w) / std::log(rho), ThetaResult::Method::closed_form};
  }
  const TailDescriptor* maps = system.tail();
  const auto weights = family.weight_tail(system);
  if (!maps || !weights) throw SpecError("theta(q) needs tail descriptors for maps and weights");
  // term_i ~ i^{-(q a_w + t a_d)} exp(-(q l_w + t l_d) i)
  const double a_w = weights->poly_exponent();
  const double l_w = weights->exp_rate();
  const double a_d = maps->poly_exponent();
  const double l_d = maps->exp_rate();
  ThetaResult out{q, 0.0, ThetaResult::Method::tail_descriptor};
  if (l_d > 0.0) {
    out.theta = -q * l_w / l_d;
  } else {
    const double rate = q * l_w;
    if (rate > 0.0) {
      out.theta = -kInf;
    } else if (rate < 0.0) {
      out.theta = kInf;
    } else {
      out.theta = (1.0 - q * a_w) / a_d;
    }
  }
  return out;
}

namespace {

BetaResult solve_beta_in(const PressureModel& model, double q, double tolerance,
                         std::optional<std::pair<double, double>> hint) {
  const double tol = tolerance > 0.0 ? tolerance : model.default_tolerance();
  const ThetaResult theta = model.effective_theta(q);
  if (theta.theta == kInf) throw BracketError("P(q, t) is infinite for every t");

  auto pressure = [&](double t) { return model(q, t); };
  double lo = 0.0;
  double hi = 25.0;
  if (hint) {
    lo = hint->first;
    hi = hint->second;
    if (!(pressure(lo) > 0.0) || !(pressure(hi) < 0.0)) hint.reset();
  }
  if (!hint) {
    if (!theta.unbounded_below()) {
      // The pressure must be positive somewhere just above theta(q).
      bool regular = false;
      for (double delta : {1e-6, 0.05, 0.1}) {
        const double p = pressure(theta.theta + delta);
        if (p > 0.0 && std::isfinite(p)) regular = true;
      }
      if (!regular) {
        throw NumericalError("irregular system: no u > theta(q) with 0 < P(q, u) < inf at q = " +
                             std::to_string(q));
      }
      lo = theta.theta + 1e-6;
      if (!(pressure(lo) > 0.0)) {
        throw BracketError("no sign change of P(q, .) just above theta(q)");
      }
    } else {
      lo = -25.0;
      while (!(pressure(lo) > 0.0) && lo > -1e4) lo *= 2.0;
      if (!(pressure(lo) > 0.0)) throw BracketError("P(q, t) stays <= 0 as t decreases");
    }
    hi = std::max(25.0, lo + 1.0);
    while (!(pressure(hi) < 0.0) && hi < 1e4) hi *= 2.0;
    if (!(pressure(hi) < 0.0)) throw BracketError("P(q, t) stays >= 0 as t increases");
  }

  BetaResult out;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  const double x_tol = std::max(tol * 1e-3, 1e-15);
  const auto [root, iterations] = bisect_decreasing(pressure, lo, hi, x_tol);
  out.beta = root;
  out.iterations = iterations;
  out.pressure_at_root = pressure(root);
  return out;
}

}  // namespace

BetaResult solve_beta(const PressureModel& model, double q, double tolerance) {
  return solve_beta_in(model, q, tolerance, std::nullopt);
}

double beta_of_q(const IfsSystem& system, const PotentialFamily& family, double q,
                 std::size_t truncation, double tolerance) {
  PressureOptions options;
  options.truncation = truncation;
  const PressureModel model(system, family, options);
  return solve_beta(model, q, tolerance).beta;
}

QdimSolution solve_quantization_dim(const PressureModel& model, double r, double tolerance) {
  if (!(r > 0.0)) throw SpecError("quantization order r must be positive");
  const double tol = tolerance > 0.0 ? tolerance : model.default_tolerance();
  const double inner = tol * 1e-2;

  QdimSolution sol;
  sol.r = r;
  sol.tolerance = tol;
  sol.truncation = model.options().truncation;

  const double beta0 = solve_beta(model, 0.0, inner).beta;
  if (!(beta0 > 0.0)) throw NumericalError("beta(0) <= 0: no positive quantization dimension");

  double lo = 1e-6;
  double hi = 1.0 - 1e-6;
  double beta_lo = solve_beta(model, lo, inner).beta;
  double beta_hi = solve_beta(model, hi, inner).beta;
  const double h_lo = beta_lo - r * lo;
  const double h_hi = beta_hi - r * hi;
  sol.trace.emplace_back(lo, h_lo);
  sol.trace.emplace_back(hi, h_hi);
  if (!(h_lo > 0.0) || !(h_hi < 0.0)) {
    throw BracketError("beta(q) - r q has no sign change on (0, 1)");
  }

  const double x_tol = std::max(inner, 1e-15);
  int guard = 0;
  while (hi - lo > x_tol && guard++ < 200) {
    const double mid = 0.5 * (lo + hi);
    // beta is decreasing, so beta(mid) lies between beta(hi) and beta(lo).
    const double pad = 1e-9 * std::max(1.0, std::abs(beta_lo - beta_hi));
    const BetaResult b = solve_beta_in(model, mid, inner,
                                       std::make_pair(beta_hi - pad, beta_lo + pad));
    const double h = b.beta - r * mid;
    sol.trace.emplace_back(mid, h);
    if (h > 0.0) {
      lo = mid;
      beta_lo = b.beta;
    } else {
      hi = mid;
      beta_hi = b.beta;
    }
  }
  sol.q_r = 0.5 * (lo + hi);
  sol.beta_at_q = solve_beta(model, sol.q_r, inner).beta;
  sol.residual = std::abs(sol.beta_at_q - r * sol.q_r);
  if (sol.residual > tol) {
    throw NumericalError("fixed point residual " + std::to_string(sol.residual) +
                         " exceeds tolerance");
  }
  sol.kappa_r = r * sol.q_r / (1.0 - sol.q_r);
  sol.D_r = sol.beta_at_q / (1.0 - sol.q_r);
  return sol;
}

QdimSolution solve_quantization_dim(const IfsSystem& system, const PotentialFamily& family,
                                    double r, std::size_t truncation, double tolerance) {
  PressureOptions options;
  options.truncation = truncation;
  const PressureModel model(system, family, options);
  return solve_quantization_dim(model, r, tolerance);
}

SweepResult truncation_sweep(const IfsSystem& system, const PotentialFamily& family, double r,
                             const std::vector<std::size_t>& truncations,
                             const PressureOptions& base, double tolerance) {
  if (system.is_finite()) throw SpecError("truncation sweeps need an infinite alphabet");
  if (truncations.empty()) throw SpecError("truncation sweep needs at least one M");
  SweepResult out;
  out.r = r;
  for (std::size_t m : truncations) {
    if (m == 0) throw SpecError("truncations must be >= 1");
    PressureOptions options = base;
    options.truncation = m;
    const PressureModel model(system, family, options);
    const double tol = tolerance > 0.0 ? tolerance : model.default_tolerance();
    SweepEntry entry;
    entry.truncation = m;
    double beta0 = 0.0;
    try {
      beta0 = solve_beta(model, 0.0, tol * 1e-2).beta;
    } catch (const BracketError&) {
      beta0 = 0.0;
    }
    if (beta0 <= tol) {
      entry.degenerate = true;
    } else {
      const QdimSolution sol = solve_quantization_dim(model, r, tol);
      entry.kappa = sol.kappa_r;
      entry.q = sol.q_r;
    }
    if (!out.entries.empty() && entry.kappa < out.entries.back().kappa - tol) {
      out.nondecreasing = false;
    }
    out.entries.push_back(entry);
  }
  if (has_closed_infinite_form(system, family)) {
    PressureOptions options = base;
    options.truncation = 0;
    const PressureModel model(system, family, options);
    out.full_kappa = solve_quantization_dim(model, r, tolerance).kappa_r;
    out.final_gap = *out.full_kappa - out.entries.back().kappa;
  }
  return out;
}

double hausdorff_dim(const PressureModel& model, double tolerance) {
  return solve_beta(model, 0.0, tolerance).beta;
}

double hausdorff_dim(const IfsSystem& system, const PotentialFamily& family,
                     std::size_t truncation, double tolerance) {
  PressureOptions options;
  options.truncation = truncation;
  const PressureModel model(system, family, options);
  return hausdorff_dim(model, tolerance);
}

TemperatureSample temperature_sample(const PressureModel& model, const std::vector<double>& q_grid,
                                     double tolerance) {
  TemperatureSample out;
  for (double q : q_grid) out.points.emplace_back(q, solve_beta(model, q, tolerance).beta);
  double min_second = 0.0;
  for (std::size_t k = 1; k < out.points.size(); ++k) {
    if (!(out.points[k].second < out.points[k - 1].second)) out.strictly_decreasing = false;
    if (k + 1 < out.points.size()) {
      const double d2 =
          out.points[k + 1].second - 2.0 * out.points[k].second + out.points[k - 1].second;
      min_second = std::min(min_second, d2);
    }
  }
  out.convexity_defect = -min_second;
  return out;
}

FigureData legendre_and_figure_data(const PressureModel& model, double r,
                                    const std::vector<double>& q_grid, double tolerance) {
  if (q_grid.size() < 3) throw SpecError("figure grid needs at least 3 points");
  FigureData fig;
  fig.r = r;
  std::vector<double> beta;
  beta.reserve(q_grid.size());
  bool positive = false;
  bool negative = false;
  for (double q : q_grid) {
    beta.push_back(solve_beta(model, q, tolerance).beta);
    const double h = beta.back() - r * q;
    positive = positive || h >= 0.0;
    negative = negative || h <= 0.0;
  }
  if (!positive || !negative) {
    throw NumericalError("q grid too coarse: beta(q) - r q does not change sign");
  }
  const QdimSolution sol = solve_quantization_dim(model, r, tolerance);
  fig.q_r = sol.q_r;
  fig.intersection_y = r * sol.q_r;
  fig.intercept = fig.intersection_y / (1.0 - sol.q_r);
  // alpha = -beta'(q) by finite differences, then f(alpha) = min_q (q alpha + beta(q)).
  const std::size_t n = q_grid.size();
  std::vector<SpectrumPoint> raw;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = k + 1 == n ? n - 1 : k + 1;
    const double alpha = -(beta[b] - beta[a]) / (q_grid[b] - q_grid[a]);
    double f = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) f = std::min(f, q_grid[j] * alpha + beta[j]);
    raw.push_back({alpha, f});
    const double q = q_grid[k];
    fig.rows.push_back({q, beta[k], r * q, fig.intercept * (1.0 - q), alpha, f});
  }
  std::sort(raw.begin(), raw.end(),
            [](const SpectrumPoint& x, const SpectrumPoint& y) { return x.alpha < y.alpha; });
  for (const auto& p : raw) {
    if (!fig.spectrum.empty() &&
        std::abs(p.alpha - fig.spectrum.back().alpha) <= 1e-9 * std::max(1.0, std::abs(p.alpha))) {
      continue;
    }
    fig.spectrum.push_back(p);
  }
  return fig;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) {
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  g.back() = hi;
  return g;
}

}  // namespace qdim
