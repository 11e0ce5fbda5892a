#pragma once

#include <cstddef>
#include <vector>

#include "qdim/ifs_model.hpp"
#include "qdim/potentials.hpp"

namespace qdim {

/// Log sup-norms of every word of one length over a truncated alphabet:
/// log ||exp S_w(F)|| and log ||phi_w'||. These do not depend on (q, t), so
/// a single table serves every pressure evaluation at that depth.
struct WordTable {
  std::size_t depth = 0;
  std::size_t alphabet = 0;
  std::vector<double> log_weight;
  std::vector<double> log_derivative;

  [[nodiscard]] std::size_t size() const noexcept { return log_weight.size(); }
};

struct WordTreeOptions {
  std::size_t grid = 64;
  unsigned threads = 1;
};

/// Enumerates I_M^depth depth-first, prepending symbols so each child costs
/// O(grid): phi_{iw} = phi_i o phi_w and S_{iw} = f^(i) o phi_w + S_w.
[[nodiscard]] WordTable build_word_table(const IfsSystem& system, const PotentialFamily& family,
                                         std::size_t depth, std::size_t alphabet,
                                         const WordTreeOptions& options = {});

/// log sum_w exp(q log||e^{S_w}|| + t log||phi_w'||), overflow-safe.
[[nodiscard]] double log_word_sum(const WordTable& table, double q, double t);

/// Overflow-safe log(sum exp(x_k)); -inf for an empty range.
[[nodiscard]] double log_sum_exp(const std::vector<double>& terms);

}  // namespace qdim
