#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qdim/ifs_model.hpp"
#include "qdim/potentials.hpp"
#include "qdim/word.hpp"

namespace qdim {

struct CylinderMass {
  Word word;
  double lower = 0.0;
  double upper = 0.0;
};

/// Which measure a cylinder mass refers to: m_F, or the auxiliary m_q built
/// from (exp S_w(F) |phi_w'|^r)^q.
struct MassMode {
  enum class Kind { conformal, auxiliary };
  Kind kind = Kind::conformal;
  double q = 0.0;
  double r = 0.0;

  [[nodiscard]] static MassMode conformal() { return {}; }
  [[nodiscard]] static MassMode auxiliary(double q, double r) { return {Kind::auxiliary, q, r}; }
};

[[nodiscard]] CylinderMass cylinder_mass(const IfsSystem& system, const PotentialFamily& family,
                                         const Word& word, MassMode mode = {},
                                         GridOptions grid = {});

struct SampleOptions {
  /// Largest tolerated mass beyond the truncation.
  double max_deficit = 1e-6;
  bool allow_deficit = false;
  unsigned threads = 1;
  /// Grid for the running Birkhoff sum of non-constant families.
  std::size_t grid = 32;
  std::size_t chunk = 4096;
};

/// Empirical stand-in for m_F (or m_M at truncation M), uniform weights 1/N.
struct SampleSet {
  std::vector<double> points;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
  std::size_t truncation = 0;
  double deficit = 0.0;
  /// Ratio constant bounding the bias of the non-constant surrogate; 1 when
  /// the measure is sampled exactly.
  double bias_bound = 1.0;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// ceil(log 1e-12 / log s), or a fixed depth when s = 1.
[[nodiscard]] std::size_t default_sample_depth(const IfsSystem& system);

/// Smallest M whose tail mass is below `max_deficit` (at most `limit`).
[[nodiscard]] std::size_t auto_truncation(const IfsSystem& system, const PotentialFamily& family,
                                          double max_deficit, std::size_t limit = 1000000);

/// Draws N points phi_{w|d}(midpoint). depth 0 selects default_sample_depth;
/// truncation 0 on an infinite alphabet selects auto_truncation.
[[nodiscard]] SampleSet sample_measure(const IfsSystem& system, const PotentialFamily& family,
                                       std::size_t count, std::size_t depth,
                                       std::size_t truncation, std::uint64_t seed,
                                       const SampleOptions& options = {});

struct WassersteinDetail {
  double distance = 0.0;
  /// Mean of |a_k - b_k|^r over the sorted coupling.
  double cost = 0.0;
  double cost_stderr = 0.0;
  /// Delta-method standard error of `distance`.
  double distance_stderr = 0.0;
  std::size_t pairs = 0;
};

/// L_r-minimal metric between two empirical measures via the sorted
/// coupling; unequal sizes are matched on a common quantile grid.
[[nodiscard]] WassersteinDetail wasserstein_1d_detail(double r, const std::vector<double>& a,
                                                      const std::vector<double>& b);
[[nodiscard]] double wasserstein_1d(double r, const SampleSet& a, const SampleSet& b);

}  // namespace qdim
