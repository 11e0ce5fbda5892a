#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qdim/ifs_model.hpp"
#include "qdim/word.hpp"

namespace qdim {

/// f^(i) = log p_i, independent of x.
struct ConstantLogWeights {
  struct Listed {
    std::vector<double> weights;
  };
  /// p_i = (1 - ratio) ratio^{i-1}, a probability vector on all of N.
  struct Geometric {
    double ratio = 0.5;
  };
  /// Arbitrary weights with a tail descriptor bounding p_i.
  struct Generated {
    std::function<double(Symbol)> weight;
    TailDescriptor tail;
  };

  std::variant<Listed, Geometric, Generated> source;

  [[nodiscard]] double weight(Symbol i) const;
  [[nodiscard]] double log_weight(Symbol i) const;
};

/// f^(i)(x) = g(x) + exponent * log |phi_i'(x)|.
struct GeometricFamily {
  double exponent = 1.0;
  std::function<double(double)> base = [](double) { return 0.0; };
  std::string base_name = "zero";
  /// Bound on the oscillation of Birkhoff sums of g; 0 for constant g.
  double base_distortion = 0.0;
};

/// Summable Holder family F = {f^(i)} with an additive normalization shift.
class PotentialFamily {
 public:
  using Variant = std::variant<ConstantLogWeights, GeometricFamily>;

  explicit PotentialFamily(Variant family, double shift = 0.0);

  [[nodiscard]] static PotentialFamily weights(std::vector<double> p);
  [[nodiscard]] static PotentialFamily geometric_weights(double ratio);
  [[nodiscard]] static PotentialFamily derivative_power(double exponent);

  /// f^(i)(x) - shift, with `map` the i-th map of the system.
  [[nodiscard]] double value(const ContractionMap& map, Symbol i, double x) const;
  [[nodiscard]] bool is_constant() const noexcept;
  /// log p_i - shift; constant families only.
  [[nodiscard]] double log_weight(Symbol i) const;
  [[nodiscard]] double shift() const noexcept { return shift_; }
  [[nodiscard]] PotentialFamily with_shift(double shift) const;
  [[nodiscard]] const Variant& family() const noexcept { return family_; }

  /// Constant C of the ratio bound exp(S_w(x)) / exp(S_w(y)) <= C. Exact for
  /// constant weights (C = 1); K^exponent * e^{base_distortion} for the
  /// geometric family.
  [[nodiscard]] double ratio_constant(const IfsSystem& system) const;

  /// Decay of ||e^{f^(i)}|| as i -> infinity, if it can be described.
  [[nodiscard]] std::optional<TailDescriptor> weight_tail(const IfsSystem& system) const;

 private:
  Variant family_;
  double shift_;
};

/// S_w(F)(x) = sum_j f^(w_j)(phi_{sigma^j w}(x)).
[[nodiscard]] double birkhoff_sum(const PotentialFamily& family, const IfsSystem& system,
                                  const Word& word, double x);

/// ||exp S_w(F)||: exact for constant weights, grid maximum otherwise with
/// an error factor bounded by C.
[[nodiscard]] NormEstimate sup_norm_exp_birkhoff(const PotentialFamily& family,
                                                 const IfsSystem& system, const Word& word,
                                                 GridOptions grid = {});

struct HolderCertificate {
  double holder_order = 1.0;
  double v_beta = 0.0;
  /// Sampled oscillation of f^(w_1) o phi_{sigma w} over words of length n,
  /// n = 1, 2, ... (without the e^{order (n-1)} factor).
  std::vector<double> v_n;
};

struct RatioConstant {
  double C = 1.0;
  /// Sampling can falsify a declared C but never certify one.
  bool sampled = true;
};

struct SummabilityOptions {
  std::size_t enumerated_symbols = 100000;
  std::size_t pairs = 10000;
  std::uint64_t seed = 20240607;
  /// Symbols drawn for sampled words in infinite alphabets.
  std::size_t symbol_limit = 16;
  GridOptions grid{};
};

struct SummabilityReport {
  /// Partial sum plus integral tail bound.
  double tail_sum = 0.0;
  double partial_sum = 0.0;
  /// Lower/upper integral brackets of the unenumerated tail.
  double tail_lower = 0.0;
  double tail_upper = 0.0;
  std::size_t enumerated = 0;
  HolderCertificate certificate;
  RatioConstant ratio;
};

/// Throws SummabilityError when sum_i ||e^{f^(i)}|| diverges.
[[nodiscard]] SummabilityReport summability_and_holder(const PotentialFamily& family,
                                                       const IfsSystem& system,
                                                       std::size_t sample_depth,
                                                       const SummabilityOptions& options = {});

struct PotentialPressure {
  double pressure = 0.0;
  std::vector<std::size_t> depths;
  std::vector<double> per_depth;
  /// Spread of the per-depth estimates around the extrapolated value.
  double error_indicator = 0.0;
  bool exact = false;
};

/// P(F) of the unshifted family. Constant weights use the exact identity
/// log sum p_i; other families use word sums at depths {d-4, d-2, d} with
/// Aitken extrapolation.
[[nodiscard]] PotentialPressure potential_pressure(const PotentialFamily& family,
                                                   const IfsSystem& system, std::size_t depth,
                                                   std::size_t truncation);

/// The family shifted so that its estimated pressure is zero.
[[nodiscard]] PotentialFamily normalize_pressure(const PotentialFamily& family,
                                                 const IfsSystem& system, std::size_t depth = 8,
                                                 std::size_t truncation = 0);

}  // namespace qdim
