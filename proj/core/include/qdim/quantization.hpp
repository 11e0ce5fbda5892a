#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qdim/conformal_measure.hpp"
#include "qdim/ifs_model.hpp"
#include "qdim/potentials.hpp"
#include "qdim/word.hpp"

namespace qdim {

struct Codebook {
  /// Sorted ascending.
  std::vector<double> points;
  std::size_t n = 0;
};

struct QuantizationRun {
  std::size_t n = 0;
  double r = 2.0;
  double V_hat = 0.0;
  double e_hat = 0.0;
  Codebook codebook;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  bool converged = false;
  /// Error after each iteration of the winning restart.
  std::vector<double> trace;
  /// Final error of every restart, in restart order.
  std::vector<double> restart_errors;
};

/// Mean of dist(x, codebook)^r over a sorted sample, by a linear merge.
[[nodiscard]] double quant_error(const std::vector<double>& sorted_sample,
                                 const std::vector<double>& sorted_codebook, double r);
[[nodiscard]] double quant_error(const SampleSet& sample, const Codebook& codebook, double r);

struct LloydOptions {
  /// Total runs: one quantile start plus restarts - 1 spread starts.
  std::size_t restarts = 8;
  std::size_t max_iter = 200;
  std::uint64_t seed = 20240607;
  unsigned threads = 1;
  /// Stop when the relative error decrease falls below this.
  double rel_tol = 1e-10;
};

[[nodiscard]] QuantizationRun lloyd_optimize(const std::vector<double>& sorted_sample,
                                             std::size_t n, double r,
                                             const LloydOptions& options = {});
[[nodiscard]] QuantizationRun lloyd_optimize(const SampleSet& sample, std::size_t n, double r,
                                             const LloydOptions& options = {});

/// One Lloyd run from a given codebook (no restarts).
[[nodiscard]] QuantizationRun lloyd_refine(const std::vector<double>& sorted_sample,
                                           std::vector<double> codebook, double r,
                                           std::size_t max_iter = 200, double rel_tol = 1e-10);

struct AntichainOptions {
  /// Ratio constant C; defaults to the family's.
  std::optional<double> C;
  /// Distortion K; defaults to the system's.
  std::optional<double> K;
  std::size_t grid = 64;
  std::size_t max_depth = 1000;
  std::size_t check_words = 1000;
  std::uint64_t seed = 20240607;
};

struct AntichainResult {
  double r = 0.0;
  std::size_t n = 0;
  double kappa_r = 0.0;
  double eta = 0.0;
  double L = 0.0;
  double rho_N = 0.0;
  double threshold = 0.0;
  double C = 1.0;
  double K = 1.0;
  std::size_t truncation = 0;
  std::vector<Word> words;
  Codebook codebook;
  std::size_t cardinality = 0;
  std::size_t max_word_length = 0;
  bool prefix_free = false;
  /// Every sampled infinite word had exactly one prefix in the antichain.
  bool maximal = false;
  std::size_t checked_words = 0;
};

/// The antichain Gamma_n: words whose weight (m(J_w) ||phi_w'||^r)^eta
/// is at most L / (n rho_N) while their parent's exceeds it.
[[nodiscard]] AntichainResult antichain_codebook(const IfsSystem& system,
                                                 const PotentialFamily& family, double r,
                                                 std::size_t n, std::size_t truncation,
                                                 double kappa_r,
                                                 const AntichainOptions& options = {});

struct CoefficientSeries {
  double t = 0.0;
  /// n V_hat^{t / r} per run.
  std::vector<double> values;
};

struct DimensionEstimate {
  double D_hat = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  /// Root mean square residual of the log-log fit.
  double rms_residual = 0.0;
  std::vector<std::size_t> n;
  std::vector<double> V;
  std::vector<CoefficientSeries> coefficients;
};

/// Least squares on (log n, log V): D_hat = -r / slope. Needs 2+ points.
[[nodiscard]] DimensionEstimate loglog_dimension(const std::vector<std::size_t>& n,
                                                 const std::vector<double>& V, double r);

/// As loglog_dimension over >= 3 runs sharing r, plus coefficient series
/// for t in {0.9, 1, 1.1} * kappa_hint.
[[nodiscard]] DimensionEstimate estimate_Dr(const std::vector<QuantizationRun>& runs,
                                            double kappa_hint);

}  // namespace qdim
