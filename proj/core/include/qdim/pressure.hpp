#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdim/ifs_model.hpp"
#include "qdim/potentials.hpp"
#include "qdim/word_tree.hpp"

namespace qdim {

struct PressureOptions {
  /// Alphabet truncation M; 0 keeps the full alphabet (infinite alphabets
  /// then need a closed form).
  std::size_t truncation = 0;
  /// Base depth n of the (n, 2n) word-sum pair; 0 picks the largest n with
  /// M^{2n} <= max_words.
  std::size_t depth = 0;
  std::size_t max_words = std::size_t{1} << 20;
  std::size_t grid = 64;
  unsigned threads = 1;
  /// Enumerate word trees even when the exact product identity applies.
  bool force_tree = false;
};

/// P_M(q, t) with the depth data it was extrapolated from.
struct PressureEstimate {
  double q = 0.0;
  double t = 0.0;
  /// 0 means the full alphabet.
  std::size_t truncation = 0;
  std::vector<std::size_t> depths;
  /// (1/n) log sum_w ... at each depth in `depths`.
  std::vector<double> per_depth;
  double value = 0.0;
  double error_indicator = 0.0;
  bool finite = true;
  /// Exact product identity (similarities with constant weights).
  bool exact = false;
  /// Analytic bound on the single-symbol series beyond M, reported apart
  /// from `value`.
  double tail_bound = 0.0;
};

struct ThetaResult {
  enum class Method { closed_form, tail_descriptor, finite_alphabet };

  double q = 0.0;
  /// -inf when every t gives a finite pressure.
  double theta = -std::numeric_limits<double>::infinity();
  Method method = Method::finite_alphabet;

  [[nodiscard]] bool unbounded_below() const noexcept {
    return theta == -std::numeric_limits<double>::infinity();
  }
};

[[nodiscard]] std::string to_string(ThetaResult::Method method);

/// Two-parameter pressure of (system, family) at a fixed truncation. Word
/// tables are built lazily, once per depth, and shared across (q, t).
class PressureModel {
 public:
  PressureModel(IfsSystem system, PotentialFamily family, PressureOptions options = {});

  PressureModel(const PressureModel&) = delete;
  PressureModel& operator=(const PressureModel&) = delete;
  PressureModel(PressureModel&&) = delete;
  PressureModel& operator=(PressureModel&&) = delete;

  [[nodiscard]] const IfsSystem& system() const noexcept { return system_; }
  [[nodiscard]] const PotentialFamily& family() const noexcept { return family_; }
  [[nodiscard]] const PressureOptions& options() const noexcept { return options_; }

  /// True when log sum_i p_i^q s_i^t gives the pressure exactly.
  [[nodiscard]] bool multiplicative() const noexcept { return multiplicative_; }

  /// (1/n) log sum_{w in I_M^n} ||exp S_w(F)||^q ||phi_w'||^t.
  [[nodiscard]] double word_sum(double q, double t, std::size_t depth) const;
  [[nodiscard]] PressureEstimate estimate(double q, double t) const;
  [[nodiscard]] double operator()(double q, double t) const;

  /// Threshold below which the pressure at this truncation diverges.
  [[nodiscard]] ThetaResult effective_theta(double q) const;
  /// Tolerance appropriate for root finding on this model.
  [[nodiscard]] double default_tolerance() const noexcept;
  /// Base depth n used for tree-summed estimates.
  [[nodiscard]] std::size_t base_depth() const noexcept { return base_depth_; }

 private:
  [[nodiscard]] double exact_log_sum(double q, double t) const;
  [[nodiscard]] const WordTable& table(std::size_t depth) const;
  [[nodiscard]] double tail_bound(double q, double t) const;

  IfsSystem system_;
  PotentialFamily family_;
  PressureOptions options_;
  bool multiplicative_ = false;
  bool closed_infinite_ = false;
  std::size_t alphabet_ = 0;
  std::size_t base_depth_ = 1;
  std::vector<double> log_p_;
  std::vector<double> log_s_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::size_t, std::unique_ptr<WordTable>> tables_;
};

/// (1/n) log sum over I_M^n of ||exp S_w(F)||^q ||phi_w'||^t.
[[nodiscard]] double pressure_word_sum(const IfsSystem& system, const PotentialFamily& family,
                                       double q, double t, std::size_t depth,
                                       std::size_t truncation);

/// theta(q) = inf { t : P(q, t) < inf } of the full system, from closed
/// forms or tail descriptors.
[[nodiscard]] ThetaResult theta_of_q(const IfsSystem& system, const PotentialFamily& family,
                                     double q);

struct BetaResult {
  double beta = 0.0;
  double pressure_at_root = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

/// beta(q): the unique t with P_M(q, t) = 0, by bisection.
[[nodiscard]] BetaResult solve_beta(const PressureModel& model, double q, double tolerance = 0.0);
[[nodiscard]] double beta_of_q(const IfsSystem& system, const PotentialFamily& family, double q,
                               std::size_t truncation, double tolerance = 0.0);

struct QdimSolution {
  double r = 0.0;
  double q_r = 0.0;
  double kappa_r = 0.0;
  double D_r = 0.0;
  double beta_at_q = 0.0;
  /// |beta(q_r) - r q_r|.
  double residual = 0.0;
  double tolerance = 0.0;
  std::size_t truncation = 0;
  /// (q, beta(q) - r q) at every bisection step.
  std::vector<std::pair<double, double>> trace;
};

/// q_r with beta(q_r) = r q_r, kappa_r = r q_r / (1 - q_r) = D_r.
[[nodiscard]] QdimSolution solve_quantization_dim(const PressureModel& model, double r,
                                                  double tolerance = 0.0);
[[nodiscard]] QdimSolution solve_quantization_dim(const IfsSystem& system,
                                                  const PotentialFamily& family, double r,
                                                  std::size_t truncation,
                                                  double tolerance = 0.0);

struct SweepEntry {
  std::size_t truncation = 0;
  double kappa = 0.0;
  double q = 0.0;
  /// beta_M(0) <= 0: the truncated limit set carries no dimension.
  bool degenerate = false;
};

struct SweepResult {
  double r = 0.0;
  std::vector<SweepEntry> entries;
  bool nondecreasing = true;
  std::optional<double> full_kappa;
  /// full_kappa - kappa at the largest M, when full_kappa is known.
  std::optional<double> final_gap;
};

[[nodiscard]] SweepResult truncation_sweep(const IfsSystem& system, const PotentialFamily& family,
                                           double r, const std::vector<std::size_t>& truncations,
                                           const PressureOptions& base = {},
                                           double tolerance = 0.0);

/// Root of t -> P_M(0, t).
[[nodiscard]] double hausdorff_dim(const PressureModel& model, double tolerance = 0.0);
[[nodiscard]] double hausdorff_dim(const IfsSystem& system, const PotentialFamily& family,
                                   std::size_t truncation, double tolerance = 0.0);

struct TemperatureSample {
  std::vector<std::pair<double, double>> points;
  /// max(0, -min second difference).
  double convexity_defect = 0.0;
  bool strictly_decreasing = true;
};

[[nodiscard]] TemperatureSample temperature_sample(const PressureModel& model,
                                                   const std::vector<double>& q_grid,
                                                   double tolerance = 0.0);

struct FigureRow {
  double q = 0.0;
  double beta = 0.0;
  /// r q
  double line = 0.0;
  /// Line through (q_r, r q_r) and (1, 0).
  double chord = 0.0;
  /// -beta'(q) by finite differences and the Legendre value at it.
  double alpha = 0.0;
  double f = 0.0;
};

struct SpectrumPoint {
  double alpha = 0.0;
  double f = 0.0;
};

struct FigureData {
  double r = 0.0;
  double q_r = 0.0;
  double intersection_y = 0.0;
  /// y-intercept of the chord; equals D_r.
  double intercept = 0.0;
  std::vector<FigureRow> rows;
  /// Discrete Legendre transform f(alpha) = inf_q (q alpha + beta(q)).
  std::vector<SpectrumPoint> spectrum;
};

[[nodiscard]] FigureData legendre_and_figure_data(const PressureModel& model, double r,
                                                  const std::vector<double>& q_grid,
                                                  double tolerance = 0.0);

/// Evenly spaced grid on [lo, hi] with `count` points.
[[nodiscard]] std::vector<double> linear_grid(double lo, double hi, std::size_t count);

}  // namespace qdim
