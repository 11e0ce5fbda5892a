#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qdim/word.hpp"

namespace qdim {

/// Closed interval [lo, hi] on the real line.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double diameter() const noexcept { return hi - lo; }
  [[nodiscard]] double midpoint() const noexcept { return 0.5 * (lo + hi); }
  [[nodiscard]] bool contains(double x, double slack = 0.0) const noexcept {
    return x >= lo - slack && x <= hi + slack;
  }
  [[nodiscard]] bool contains(const Interval& other, double slack = 0.0) const noexcept {
    return other.lo >= lo - slack && other.hi <= hi + slack;
  }
};

/// x -> ratio * x + offset (orientation +1) or offset - ratio * x (orientation -1).
struct Similarity {
  double ratio = 0.5;
  double offset = 0.0;
  int orientation = 1;

  [[nodiscard]] double operator()(double x) const noexcept {
    return orientation >= 0 ? ratio * x + offset : offset - ratio * x;
  }
  [[nodiscard]] double derivative(double) const noexcept {
    return orientation >= 0 ? ratio : -ratio;
  }
};

/// Injective differentiable branch given by evaluation oracles. The
/// derivative bound is sup |phi'| over the domain.
struct AnalyticBranch {
  std::function<double(double)> eval;
  std::function<double(double)> derivative;
  double derivative_bound = 1.0;
};

class ContractionMap {
 public:
  ContractionMap(Similarity s) : impl_(s) {}  // NOLINT(google-explicit-constructor)
  ContractionMap(AnalyticBranch b) : impl_(std::move(b)) {}  // NOLINT(google-explicit-constructor)

  [[nodiscard]] double operator()(double x) const;
  /// Signed derivative at x.
  [[nodiscard]] double derivative(double x) const;
  /// sup |phi'| over the domain; exact for similarities.
  [[nodiscard]] double derivative_bound() const noexcept;

  [[nodiscard]] bool is_similarity() const noexcept {
    return std::holds_alternative<Similarity>(impl_);
  }
  [[nodiscard]] const Similarity* similarity() const noexcept {
    return std::get_if<Similarity>(&impl_);
  }

 private:
  std::variant<Similarity, AnalyticBranch> impl_;
};

/// x -> 1 / (i + x), the i-th inverse branch of the Gauss map on [0, 1].
[[nodiscard]] ContractionMap gauss_branch(Symbol i);

/// x -> (a x + b) / (c x + d) restricted to `domain`; the pole must lie
/// outside the domain.
[[nodiscard]] ContractionMap mobius_branch(double a, double b, double c, double d,
                                           const Interval& domain);

enum class TailKind { power_law, exponential };

/// Upper bound ||phi'_i|| <= c * i^{-p} (power law) or c * p^i (exponential,
/// p in (0, 1)) valid for every i >= from.
struct TailDescriptor {
  TailKind kind = TailKind::power_law;
  double c = 1.0;
  double p = 2.0;
  Symbol from = 1;

  [[nodiscard]] double bound(Symbol i) const;
  /// Polynomial decay exponent (power law) or zero.
  [[nodiscard]] double poly_exponent() const noexcept {
    return kind == TailKind::power_law ? p : 0.0;
  }
  /// Exponential decay rate -log p (exponential) or zero.
  [[nodiscard]] double exp_rate() const;
};

/// Conformal iterated function system on a closed interval with a finite or
/// countably infinite alphabet. Immutable after construction.
class IfsSystem {
 public:
  struct FiniteAlphabet {
    std::vector<ContractionMap> maps;
  };
  struct InfiniteAlphabet {
    std::function<ContractionMap(Symbol)> generator;
    TailDescriptor tail;
    bool similarity = false;
    /// Set when phi_i has ratio geometric_ratio^i; enables closed forms.
    std::optional<double> geometric_ratio;
  };

  IfsSystem(Interval domain, FiniteAlphabet alphabet, double contraction,
            double distortion = 1.0, std::optional<Interval> open_set = std::nullopt);
  IfsSystem(Interval domain, InfiniteAlphabet alphabet, double contraction,
            double distortion = 1.0, std::optional<Interval> open_set = std::nullopt);

  [[nodiscard]] const Interval& domain() const noexcept { return domain_; }
  /// Uniform contraction bound s.
  [[nodiscard]] double contraction() const noexcept { return contraction_; }
  /// Bounded-distortion constant K (1 for similarity systems).
  [[nodiscard]] double distortion() const noexcept { return distortion_; }
  [[nodiscard]] const Interval& open_set() const noexcept { return open_set_; }

  [[nodiscard]] bool is_finite() const noexcept;
  [[nodiscard]] std::optional<std::size_t> alphabet_size() const noexcept;
  [[nodiscard]] bool is_similarity() const noexcept;
  [[nodiscard]] std::optional<double> geometric_ratio() const noexcept;
  /// Tail descriptor of an infinite alphabet, nullptr for finite ones.
  [[nodiscard]] const TailDescriptor* tail() const noexcept;

  /// Map for symbol i; throws SpecError for out-of-range symbols.
  [[nodiscard]] ContractionMap map(Symbol i) const;
  /// First `count` maps in symbol order.
  [[nodiscard]] std::vector<ContractionMap> maps(std::size_t count) const;
  /// Number of symbols used at truncation M. Finite alphabets ignore M;
  /// infinite alphabets require M >= 1.
  [[nodiscard]] std::size_t effective_size(std::size_t truncation) const;

  void check_symbol(Symbol i) const;
  void check_point(double x) const;

  /// Free-form user assertions (cone condition, closure of interior) that
  /// are not verified and are echoed into reports.
  std::vector<std::string> assumptions;
  std::string label;

 private:
  void validate();

  Interval domain_;
  std::variant<FiniteAlphabet, InfiniteAlphabet> alphabet_;
  double contraction_;
  double distortion_;
  Interval open_set_;
};

// Standard systems.

/// Finite similarity system; s is the largest ratio.
[[nodiscard]] IfsSystem similarity_system(const Interval& domain, std::vector<Similarity> maps);
/// phi_i(x) = ratio^i x + 1 - ratio^{i-1} on [0, 1], i >= 1; ratio <= 1/2.
[[nodiscard]] IfsSystem geometric_system(double ratio);
/// Gauss branches 1..alphabet_size on [0, 1] with K = 4.
[[nodiscard]] IfsSystem gauss_system(std::size_t alphabet_size);
/// All Gauss branches, tail ||phi'_i|| <= i^{-2}.
[[nodiscard]] IfsSystem gauss_system_infinite();

// Operations.

struct ValueAndDerivative {
  double value = 0.0;
  /// Product of |phi'_{w_k}| along the orbit.
  double derivative = 1.0;
};

/// phi_w(x) evaluated right to left, with the chain-rule derivative.
[[nodiscard]] ValueAndDerivative compose_and_derivative(const IfsSystem& system, const Word& word,
                                                        double x);

/// Two-sided sup-norm estimate: norm <= true sup <= norm * error_factor.
struct NormEstimate {
  double norm = 0.0;
  double error_factor = 1.0;

  [[nodiscard]] double upper() const noexcept { return norm * error_factor; }
};

struct GridOptions {
  std::size_t points = 64;
};

[[nodiscard]] std::vector<double> grid_points(const Interval& domain, std::size_t count);

/// ||phi'_w||: exact for similarities, grid maximum otherwise with an error
/// factor bounded by K.
[[nodiscard]] NormEstimate derivative_sup_norm(const IfsSystem& system, const Word& word,
                                               GridOptions grid = {});

struct CylinderInfo {
  Word word;
  double diameter_bound = 0.0;
  /// phi_w(midpoint of X).
  double representative = 0.0;
  NormEstimate derivative;
};

[[nodiscard]] CylinderInfo cylinder_geometry(const IfsSystem& system, const Word& word,
                                             GridOptions grid = {});

/// phi_w(X) as an interval (maps are monotone on an interval).
[[nodiscard]] Interval cylinder_interval(const IfsSystem& system, const Word& word);

/// Largest sampled ratio |phi'_w(y)| / |phi'_w(x)| over random words up to
/// `max_length` and random points. A value above K falsifies the declared
/// distortion constant; a value below it proves nothing.
[[nodiscard]] double sampled_distortion(const IfsSystem& system, std::size_t max_length,
                                        std::size_t samples, std::uint64_t seed,
                                        std::size_t symbol_limit = 16);

}  // namespace qdim
