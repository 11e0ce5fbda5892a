#include "qdim/word_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <variant>

#include "qdim/error.hpp"

namespace qdim {

namespace {

struct Level {
  std::vector<double> value;
  std::vector<double> log_derivative;
  std::vector<double> birkhoff;
};

class TreeWalker {
 public:
  TreeWalker(const std::vector<ContractionMap>& maps, const PotentialFamily& family,
             std::size_t depth, const std::vector<double>& grid)
      : maps_(maps), family_(family), depth_(depth), levels_(depth + 1) {
    if (const auto* c = std::get_if<ConstantLogWeights>(&family.family())) {
      for (Symbol i = 1; i <= maps.size(); ++i) log_weight_.push_back(c->log_weight(i) - family.shift());
    } else {
      const auto& g = std::get<GeometricFamily>(family.family());
      exponent_ = g.exponent;
      zero_base_ = g.base_name == "zero";
    }
    for (auto& level : levels_) {
      level.value.resize(grid.size());
      level.log_derivative.resize(grid.size());
      level.birkhoff.resize(grid.size());
    }
    levels_[0].value = grid;
    std::fill(levels_[0].log_derivative.begin(), levels_[0].log_derivative.end(), 0.0);
    std::fill(levels_[0].birkhoff.begin(), levels_[0].birkhoff.end(), 0.0);
  }

  void walk_from(Symbol first, std::vector<double>& log_weight,
                 std::vector<double>& log_derivative) {
    out_weight_ = &log_weight;
    out_derivative_ = &log_derivative;
    descend(0, first);
  }

 private:
  void descend(std::size_t level, Symbol i) {
    const Level& parent = levels_[level];
    Level& child = levels_[level + 1];
    const ContractionMap& m = maps_[i - 1];
    const bool constant = !log_weight_.empty();
    for (std::size_t g = 0; g < parent.value.size(); ++g) {
      const double y = parent.value[g];
      const double ld = std::log(std::abs(m.derivative(y)));
      double f = 0.0;
      if (constant) {
        f = log_weight_[i - 1];
      } else if (zero_base_) {
        f = exponent_ * ld - family_.shift();
      } else {
        f = family_.value(m, i, y);
      }
      child.birkhoff[g] = parent.birkhoff[g] + f;
      child.log_derivative[g] = parent.log_derivative[g] + ld;
      child.value[g] = m(y);
    }
    if (level + 1 == depth_) {
      out_weight_->push_back(*std::max_element(child.birkhoff.begin(), child.birkhoff.end()));
      out_derivative_->push_back(
          *std::max_element(child.log_derivative.begin(), child.log_derivative.end()));
      return;
    }
    for (Symbol j = 1; j <= maps_.size(); ++j) descend(level + 1, j);
  }

  const std::vector<ContractionMap>& maps_;
  const PotentialFamily& family_;
  std::size_t depth_;
  std::vector<Level> levels_;
  std::vector<double> log_weight_;
  double exponent_ = 0.0;
  bool zero_base_ = false;
  std::vector<double>* out_weight_ = nullptr;
  std::vector<double>* out_derivative_ = nullptr;
};

}  // namespace

WordTable build_word_table(const IfsSystem& system, const PotentialFamily& family,
                           std::size_t depth, std::size_t alphabet,
                           const WordTreeOptions& options) {
  if (depth == 0) throw SpecError("word tables need depth >= 1");
  const std::size_t m = system.effective_size(alphabet);
  const double words = std::pow(static_cast<double>(m), static_cast<double>(depth));
  if (words > 1e8) throw SpecError("word table too large: M^n = " + std::to_string(words));

  const std::vector<ContractionMap> maps = system.maps(m);
  // Constant weights with similarities are grid-independent.
  const bool exact = system.is_similarity() && family.is_constant();
  const std::vector<double> grid =
      exact ? std::vector<double>{system.domain().midpoint()}
            : grid_points(system.domain(), std::max<std::size_t>(2, options.grid));

  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(m)));
  std::vector<std::vector<double>> weights(m), derivs(m);
  auto run = [&](unsigned worker) {
    TreeWalker walker(maps, family, depth, grid);
    for (Symbol first = 1 + worker; first <= m; first += workers) {
      walker.walk_from(first, weights[first - 1], derivs[first - 1]);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  WordTable table;
  table.depth = depth;
  table.alphabet = m;
  table.log_weight.reserve(static_cast<std::size_t>(words));
  table.log_derivative.reserve(static_cast<std::size_t>(words));
  for (std::size_t k = 0; k < m; ++k) {
    table.log_weight.insert(table.log_weight.end(), weights[k].begin(), weights[k].end());
    table.log_derivative.insert(table.log_derivative.end(), derivs[k].begin(), derivs[k].end());
  }
  return table;
}

double log_word_sum(const WordTable& table, double q, double t) {
  const std::size_t n = table.size();
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    peak = std::max(peak, q * table.log_weight[k] + t * table.log_derivative[k]);
  }
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += std::exp(q * table.log_weight[k] + t * table.log_derivative[k] - peak);
  }
  return peak + std::log(sum);
}

double log_sum_exp(const std::vector<double>& terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double peak = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double x : terms) sum += std::exp(x - peak);
  return peak + std::log(sum);
}

}  // namespace qdim
