#include "qdim/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "qdim/error.hpp"
#include "qdim/word_tree.hpp"

namespace qdim {

double quant_error(const std::vector<double>& sample, const std::vector<double>& codebook,
                   double r) {
  if (codebook.empty()) throw SpecError("codebook is empty");
  if (sample.empty()) throw SpecError("sample is empty");
  if (!(r > 0.0)) throw SpecError("quantization order r must be positive");
  std::size_t j = 0;
  long double sum = 0.0L;
  for (double x : sample) {
    while (j + 1 < codebook.size() && std::abs(codebook[j + 1] - x) <= std::abs(codebook[j] - x)) {
      ++j;
    }
    const double d = std::abs(x - codebook[j]);
    sum += r == 2.0 ? d * d : std::pow(d, r);
  }
  return static_cast<double>(sum / static_cast<long double>(sample.size()));
}

double quant_error(const SampleSet& sample, const Codebook& codebook, double r) {
  return quant_error(sample.points, codebook.points, r);
}

namespace {

/// Sorted sample with prefix sums of x and x^2 for O(1) squared-error cells.
class CellEngine {
 public:
  CellEngine(const std::vector<double>& x, double r) : x_(x), r_(r) {
    if (r_ == 1.0) {
      kind_ = Power::one;
    } else if (r_ == 0.5) {
      kind_ = Power::half;
    } else if (r_ == 3.0) {
      kind_ = Power::cube;
    }
    if (r_ == 2.0) {
      s1_.resize(x.size() + 1, 0.0L);
      s2_.resize(x.size() + 1, 0.0L);
      for (std::size_t k = 0; k < x.size(); ++k) {
        s1_[k + 1] = s1_[k] + x[k];
        s2_[k + 1] = s2_[k] + static_cast<long double>(x[k]) * x[k];
      }
    }
    span_ = x.empty() ? 1.0 : std::max(x.back() - x.front(), 1e-300);
  }

  /// Cell boundaries in sample indices: cell j is [bounds[j], bounds[j+1]).
  std::vector<std::size_t> partition(const std::vector<double>& c) const {
    std::vector<std::size_t> b(c.size() + 1);
    b[0] = 0;
    b[c.size()] = x_.size();
    for (std::size_t j = 0; j + 1 < c.size(); ++j) {
      const double mid = 0.5 * (c[j] + c[j + 1]);
      b[j + 1] = static_cast<std::size_t>(std::lower_bound(x_.begin(), x_.end(), mid) - x_.begin());
      b[j + 1] = std::max(b[j + 1], b[j]);
    }
    return b;
  }

  long double cell_cost(std::size_t lo, std::size_t hi, double c) const {
    if (lo >= hi) return 0.0L;
    if (r_ == 2.0) {
      const long double m = static_cast<long double>(hi - lo);
      const long double v = (s2_[hi] - s2_[lo]) - 2.0L * c * (s1_[hi] - s1_[lo]) + m * c * c;
      return std::max(v, 0.0L);
    }
    long double sum = 0.0L;
    for (std::size_t k = lo; k < hi; ++k) sum += power(std::abs(x_[k] - c));
    return sum;
  }

  /// |d|^r for d >= 0.
  double power(double d) const {
    switch (kind_) {
      case Power::one:
        return d;
      case Power::half:
        return std::sqrt(d);
      case Power::cube:
        return d * d * d;
      case Power::general:
        break;
    }
    return std::pow(d, r_);
  }

  /// d/dc of the cell cost divided by r: sum sign(c - x) |c - x|^{r-1}.
  /// Nondecreasing in c when r > 1.
  long double cell_slope(std::size_t lo, std::size_t hi, double c) const {
    long double sum = 0.0L;
    if (kind_ == Power::cube) {
      for (std::size_t k = lo; k < hi; ++k) {
        const double d = c - x_[k];
        sum += d * std::abs(d);
      }
      return sum;
    }
    const double e = r_ - 1.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const double d = c - x_[k];
      sum += d >= 0.0 ? std::pow(d, e) : -std::pow(-d, e);
    }
    return sum;
  }

  double error(const std::vector<double>& c, const std::vector<std::size_t>& b) const {
    long double sum = 0.0L;
    for (std::size_t j = 0; j < c.size(); ++j) sum += cell_cost(b[j], b[j + 1], c[j]);
    return static_cast<double>(sum / static_cast<long double>(x_.size()));
  }

  double best_center(std::size_t lo, std::size_t hi) const {
    if (r_ == 2.0) {
      return static_cast<double>((s1_[hi] - s1_[lo]) / static_cast<long double>(hi - lo));
    }
    if (r_ == 1.0) return x_[lo + (hi - lo - 1) / 2];
    double a = x_[lo];
    double b = x_[hi - 1];
    if (b - a <= 0.0) return a;
    auto f = [&](double c) { return cell_cost(lo, hi, c); };
    if (r_ < 1.0) {
      // Nonconvex objective: locate the best of a coarse grid first.
      constexpr int kScan = 64;
      double best = a;
      long double best_v = f(a);
      int best_k = 0;
      for (int k = 1; k <= kScan; ++k) {
        const double c = a + (b - a) * k / kScan;
        const long double v = f(c);
        if (v < best_v) {
          best_v = v;
          best = c;
          best_k = k;
        }
      }
      const double h = (b - a) / kScan;
      const double na = std::max(a, a + (best_k - 1) * h);
      const double nb = std::min(b, a + (best_k + 1) * h);
      // Between consecutive samples the cost is concave, so the minimum sits
      // on a sample point: shrink the bracket, then test the points left in it.
      auto begin = x_.begin() + static_cast<std::ptrdiff_t>(lo);
      auto end = x_.begin() + static_cast<std::ptrdiff_t>(hi);
      auto few = [&](double u, double v) {
        return std::upper_bound(begin, end, v) - std::lower_bound(begin, end, u) <= 8;
      };
      const auto [ga, gb] = golden_bracket(f, na, nb, few);
      for (auto it = std::lower_bound(begin, end, ga); it != end && *it <= gb; ++it) {
        const long double v = f(*it);
        if (v < best_v) {
          best_v = v;
          best = *it;
        }
      }
      return best;
    }
    return slope_root(lo, hi, a, b);
  }

  /// Root of the cell slope on [a, b] by the Illinois variant of regula falsi.
  double slope_root(std::size_t lo, std::size_t hi, double a, double b) const {
    const double tol = 1e-12 * span_;
    long double ga = cell_slope(lo, hi, a);
    long double gb = cell_slope(lo, hi, b);
    if (ga >= 0.0L) return a;
    if (gb <= 0.0L) return b;
    int side = 0;
    double c = a;
    for (int it = 0; it < 200 && b - a > tol; ++it) {
      c = static_cast<double>((a * gb - b * ga) / (gb - ga));
      if (!(c > a && c < b)) c = 0.5 * (a + b);
      const long double gc = cell_slope(lo, hi, c);
      if (gc == 0.0L) return c;
      if (gc < 0.0L) {
        a = c;
        ga = gc;
        if (side == -1) gb *= 0.5L;
        side = -1;
      } else {
        b = c;
        gb = gc;
        if (side == 1) ga *= 0.5L;
        side = 1;
      }
    }
    return c;
  }

  /// Golden-section shrinking of [a, b] until `done(a, b)`.
  template <class F, class Done>
  std::pair<double, double> golden_bracket(F&& f, double a, double b, Done&& done) const {
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    long double fc = f(c);
    long double fd = f(d);
    for (int it = 0; it < 200 && !done(a, b); ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = f(d);
      }
    }
    return {a, b};
  }

  /// Sample point farthest from the codebook.
  double farthest_point(const std::vector<double>& c) const {
    std::size_t j = 0;
    double far = -1.0;
    double at = x_.front();
    for (double x : x_) {
      while (j + 1 < c.size() && std::abs(c[j + 1] - x) <= std::abs(c[j] - x)) ++j;
      const double d = std::abs(x - c[j]);
      if (d > far) {
        far = d;
        at = x;
      }
    }
    return far > 0.0 ? at : std::numeric_limits<double>::quiet_NaN();
  }

  const std::vector<double>& x() const noexcept { return x_; }
  double r() const noexcept { return r_; }

 private:
  enum class Power { general, one, half, cube };

  const std::vector<double>& x_;
  double r_;
  Power kind_ = Power::general;
  double span_ = 1.0;
  std::vector<long double> s1_;
  std::vector<long double> s2_;
};

QuantizationRun refine(const CellEngine& engine, std::vector<double> c, std::size_t max_iter,
                       double rel_tol) {
  QuantizationRun run;
  run.n = c.size();
  run.r = engine.r();
  std::sort(c.begin(), c.end());
  auto bounds = engine.partition(c);
  double err = engine.error(c, bounds);
  run.trace.push_back(err);
  for (std::size_t it = 0; it < max_iter; ++it) {
    ++run.iterations;
    // Empty cells: move the idle point onto the worst-served sample point.
    bool relocated = false;
    for (std::size_t guard = 0; guard < c.size(); ++guard) {
      std::size_t j = 0;
      while (j < c.size() && bounds[j] != bounds[j + 1]) ++j;
      if (j == c.size()) break;
      const double far = engine.farthest_point(c);
      if (std::isnan(far)) break;
      c[j] = far;
      std::sort(c.begin(), c.end());
      bounds = engine.partition(c);
      relocated = true;
    }
    std::vector<double> next = c;
    for (std::size_t j = 0; j < c.size(); ++j) {
      const std::size_t lo = bounds[j];
      const std::size_t hi = bounds[j + 1];
      if (lo == hi) continue;
      const double cand = engine.best_center(lo, hi);
      if (engine.cell_cost(lo, hi, cand) <= engine.cell_cost(lo, hi, c[j])) next[j] = cand;
    }
    std::sort(next.begin(), next.end());
    auto next_bounds = engine.partition(next);
    const double next_err = engine.error(next, next_bounds);
    const double before = relocated ? engine.error(c, bounds) : err;
    if (next_err > before) {
      // Rounding noise only; keep the previous codebook.
      err = std::min(err, before);
      run.trace.push_back(err);
      run.converged = true;
      break;
    }
    run.trace.push_back(next_err);
    const bool stalled = before - next_err <= rel_tol * before;
    c = std::move(next);
    bounds = std::move(next_bounds);
    err = next_err;
    if (stalled && !relocated) {
      run.converged = true;
      break;
    }
  }
  run.V_hat = err;
  run.e_hat = std::pow(err, 1.0 / run.r);
  run.codebook.points = std::move(c);
  run.codebook.n = run.n;
  return run;
}

std::vector<double> quantile_start(const std::vector<double>& x, std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    c[k] = x[std::min(x.size() - 1, static_cast<std::size_t>(u * static_cast<double>(x.size())))];
  }
  return c;
}

/// k-means++ seeding with D^r weights. Only the segment containing a new
/// center changes, so each insertion costs that segment's length.
std::vector<double> spread_start(const std::vector<double>& x, std::size_t n, double r,
                                 std::mt19937_64& engine) {
  const std::size_t N = x.size();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pw = [r](double d) { return r == 2.0 ? d * d : std::pow(d, r); };
  std::vector<std::size_t> centers;
  std::vector<double> d(N);
  std::vector<long double> seg;

  const std::size_t first = std::min(N - 1, static_cast<std::size_t>(unit(engine) * N));
  centers.push_back(first);
  long double left = 0.0L;
  long double right = 0.0L;
  for (std::size_t k = 0; k < N; ++k) {
    d[k] = pw(std::abs(x[k] - x[first]));
    (k < first ? left : right) += k == first ? 0.0L : d[k];
  }
  seg = {left, right};

  auto segment_range = [&](std::size_t j) {
    const std::size_t lo = j == 0 ? 0 : centers[j - 1] + 1;
    const std::size_t hi = j == centers.size() ? N : centers[j];
    return std::make_pair(lo, hi);
  };
  auto segment_sum = [&](std::size_t j) {
    const auto [lo, hi] = segment_range(j);
    long double s = 0.0L;
    for (std::size_t k = lo; k < hi; ++k) s += d[k];
    return s;
  };

  while (centers.size() < n) {
    const long double total = std::accumulate(seg.begin(), seg.end(), 0.0L);
    if (!(total > 0.0L)) break;
    long double u = static_cast<long double>(unit(engine)) * total;
    std::size_t j = 0;
    while (j + 1 < seg.size() && u >= seg[j]) u -= seg[j++];
    const auto [lo, hi] = segment_range(j);
    std::size_t p = hi == lo ? lo : hi - 1;
    for (std::size_t k = lo; k < hi; ++k) {
      if (u < d[k]) {
        p = k;
        break;
      }
      u -= d[k];
    }
    if (lo >= hi || d[p] <= 0.0) break;
    centers.insert(centers.begin() + static_cast<std::ptrdiff_t>(j), p);
    for (std::size_t k = lo; k < hi; ++k) {
      d[k] = std::min(d[k], pw(std::abs(x[k] - x[p])));
    }
    d[p] = 0.0;
    seg[j] = segment_sum(j);
    seg.insert(seg.begin() + static_cast<std::ptrdiff_t>(j) + 1, segment_sum(j + 1));
  }
  std::vector<double> c;
  c.reserve(n);
  for (std::size_t idx : centers) c.push_back(x[idx]);
  // Fully covered samples: pad with duplicates; refinement relocates them.
  while (c.size() < n) c.push_back(c.back());
  std::sort(c.begin(), c.end());
  return c;
}

bool better(const QuantizationRun& a, const QuantizationRun& b) {
  if (a.V_hat != b.V_hat) return a.V_hat < b.V_hat;
  return std::lexicographical_compare(a.codebook.points.begin(), a.codebook.points.end(),
                                      b.codebook.points.begin(), b.codebook.points.end());
}

}  // namespace

QuantizationRun lloyd_refine(const std::vector<double>& sorted_sample, std::vector<double> codebook,
                             double r, std::size_t max_iter, double rel_tol) {
  if (sorted_sample.empty()) throw SpecError("sample is empty");
  if (codebook.empty()) throw SpecError("codebook is empty");
  if (!(r > 0.0)) throw SpecError("quantization order r must be positive");
  const CellEngine engine(sorted_sample, r);
  QuantizationRun run = refine(engine, std::move(codebook), max_iter, rel_tol);
  run.restarts = 1;
  run.restart_errors = {run.V_hat};
  return run;
}

QuantizationRun lloyd_optimize(const std::vector<double>& x, std::size_t n, double r,
                               const LloydOptions& options) {
  if (n == 0) throw SpecError("codebook size n must be >= 1");
  if (x.empty()) throw SpecError("sample is empty");
  if (!(r > 0.0)) throw SpecError("quantization order r must be positive");
  if (!std::is_sorted(x.begin(), x.end())) throw SpecError("sample must be sorted");

  std::vector<double> distinct;
  std::unique_copy(x.begin(), x.end(), std::back_inserter(distinct));
  if (n >= distinct.size()) {
    QuantizationRun run;
    run.n = n;
    run.r = r;
    run.codebook.points = distinct;
    run.codebook.n = n;
    run.converged = true;
    run.restarts = 0;
    run.trace = {0.0};
    return run;
  }

  const CellEngine engine(x, r);
  const std::size_t runs = std::max<std::size_t>(1, options.restarts);
  std::vector<QuantizationRun> results(runs);
  auto work = [&](std::size_t k) {
    std::vector<double> start;
    if (k == 0) {
      start = quantile_start(x, n);
    } else {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                        static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(n)};
      std::mt19937_64 rng(seq);
      start = spread_start(x, n, r, rng);
    }
    results[k] = refine(engine, std::move(start), options.max_iter, options.rel_tol);
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, options.threads), runs));
  if (workers <= 1) {
    for (std::size_t k = 0; k < runs; ++k) work(k);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < runs; k += workers) work(k);
      });
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < runs; ++k) {
    if (better(results[k], results[best])) best = k;
  }
  QuantizationRun out = std::move(results[best]);
  out.n = n;
  out.codebook.n = n;
  out.restarts = runs;
  for (const auto& res : results) out.restart_errors.push_back(res.V_hat);
  out.restart_errors[best] = out.V_hat;
  return out;
}

QuantizationRun lloyd_optimize(const SampleSet& sample, std::size_t n, double r,
                               const LloydOptions& options) {
  return lloyd_optimize(sample.points, n, r, options);
}

AntichainResult antichain_codebook(const IfsSystem& system, const PotentialFamily& family,
                                   double r, std::size_t n, std::size_t truncation,
                                   double kappa_r, const AntichainOptions& options) {
  if (n == 0) throw SpecError("antichain size n must be >= 1");
  if (!(r > 0.0)) throw SpecError("quantization order r must be positive");
  if (!(kappa_r > 0.0)) throw SpecError("kappa_r must be positive");

  AntichainResult out;
  out.r = r;
  out.n = n;
  out.kappa_r = kappa_r;
  const std::size_t m = system.effective_size(truncation);
  out.truncation = system.is_finite() ? 0 : m;
  out.C = options.C.value_or(family.ratio_constant(system));
  out.K = options.K.value_or(system.distortion());
  out.eta = kappa_r / (r + kappa_r);
  out.L = std::pow(out.C * std::pow(out.K, r), out.eta);
  const GridOptions grid{options.grid};

  // Depth-one data; masses are normalized over the truncated alphabet.
  std::vector<double> log_mass1(m);
  std::vector<double> log_deriv1(m);
  for (Symbol i = 1; i <= m; ++i) {
    log_mass1[i - 1] = std::log(sup_norm_exp_birkhoff(family, system, Word{i}, grid).norm);
    log_deriv1[i - 1] = std::log(derivative_sup_norm(system, Word{i}, grid).norm);
  }
  const double log_z = log_sum_exp(log_mass1);
  for (double& v : log_mass1) v -= log_z;
  const double min_mass = *std::min_element(log_mass1.begin(), log_mass1.end());
  const double min_deriv = *std::min_element(log_deriv1.begin(), log_deriv1.end());
  const double log_rho = out.eta * (-3.0 * std::log(out.C) - r * std::log(out.K) + min_mass +
                                    r * min_deriv);
  out.rho_N = std::exp(log_rho);
  const double log_threshold = std::log(out.L) - std::log(static_cast<double>(n)) - log_rho;
  out.threshold = std::exp(log_threshold);

  const bool exact = system.is_similarity() && family.is_constant();
  auto log_weight = [&](const Word& w, double parent, Symbol i) {
    if (exact) return parent + out.eta * (log_mass1[i - 1] + r * log_deriv1[i - 1]);
    const double mass = std::log(sup_norm_exp_birkhoff(family, system, w, grid).norm) -
                        static_cast<double>(w.size()) * log_z;
    const double deriv = std::log(derivative_sup_norm(system, w, grid).norm);
    return out.eta * (mass + r * deriv);
  };

  const double slack = 1e-9;
  std::deque<std::pair<Word, double>> queue;
  queue.emplace_back(Word{}, 0.0);
  while (!queue.empty()) {
    auto [word, lw] = std::move(queue.front());
    queue.pop_front();
    if (lw <= log_threshold + slack) {
      out.words.push_back(word);
      if (out.words.size() > n) {
        throw NumericalError("antichain exceeded n = " + std::to_string(n) + " words");
      }
      continue;
    }
    if (word.size() >= options.max_depth) {
      throw NumericalError("antichain expansion exceeded depth " +
                           std::to_string(options.max_depth));
    }
    for (Symbol i = 1; i <= m; ++i) {
      Word child = word.extended(i);
      const double cw = log_weight(child, lw, i);
      queue.emplace_back(std::move(child), cw);
    }
  }

  std::sort(out.words.begin(), out.words.end());
  out.cardinality = out.words.size();
  for (const Word& w : out.words) {
    out.max_word_length = std::max(out.max_word_length, w.size());
    const double rep = w.empty() ? system.domain().midpoint()
                                 : compose_and_derivative(system, w, system.domain().midpoint()).value;
    out.codebook.points.push_back(rep);
  }
  std::sort(out.codebook.points.begin(), out.codebook.points.end());
  out.codebook.n = n;

  out.prefix_free = true;
  for (std::size_t k = 1; k < out.words.size(); ++k) {
    if (out.words[k - 1].is_prefix_of(out.words[k])) out.prefix_free = false;
  }

  const std::set<Word> members(out.words.begin(), out.words.end());
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<Symbol> pick(1, static_cast<Symbol>(m));
  out.maximal = true;
  for (std::size_t k = 0; k < options.check_words; ++k) {
    std::vector<Symbol> symbols;
    std::size_t hits = members.count(Word{});
    for (std::size_t len = 1; len <= out.max_word_length; ++len) {
      symbols.push_back(pick(rng));
      hits += members.count(Word(symbols));
    }
    if (hits != 1) out.maximal = false;
  }
  out.checked_words = options.check_words;
  return out;
}

DimensionEstimate loglog_dimension(const std::vector<std::size_t>& n, const std::vector<double>& V,
                                   double r) {
  if (n.size() != V.size()) throw SpecError("n and V must have equal length");
  if (n.size() < 2) throw SpecError("a log-log fit needs at least 2 points");
  if (!(r > 0.0)) throw SpecError("quantization order r must be positive");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (n[k] == 0) throw SpecError("codebook sizes must be >= 1");
    if (!(V[k] > 0.0)) throw NumericalError("quantization errors must be positive for a log fit");
    lx.push_back(std::log(static_cast<double>(n[k])));
    ly.push_back(std::log(V[k]));
  }
  const double k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    sxx += (lx[j] - mx) * (lx[j] - mx);
    sxy += (lx[j] - mx) * (ly[j] - my);
  }
  if (!(sxx > 0.0)) throw SpecError("codebook sizes must be distinct");
  DimensionEstimate out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  if (!(out.slope < 0.0)) throw NumericalError("quantization error does not decrease with n");
  out.D_hat = -r / out.slope;
  double ss = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    const double e = ly[j] - (out.intercept + out.slope * lx[j]);
    ss += e * e;
  }
  out.rms_residual = std::sqrt(ss / k);
  out.n = n;
  out.V = V;
  return out;
}

DimensionEstimate estimate_Dr(const std::vector<QuantizationRun>& runs, double kappa_hint) {
  if (runs.size() < 3) throw SpecError("estimate_Dr needs at least 3 runs");
  const double r = runs.front().r;
  std::vector<std::size_t> n;
  std::vector<double> V;
  for (const auto& run : runs) {
    if (run.r != r) throw SpecError("runs must share the quantization order r");
    n.push_back(run.n);
    V.push_back(run.V_hat);
  }
  DimensionEstimate out = loglog_dimension(n, V, r);
  if (kappa_hint > 0.0) {
    for (double f : {0.9, 1.0, 1.1}) {
      CoefficientSeries series{f * kappa_hint, {}};
      for (std::size_t k = 0; k < n.size(); ++k) {
        series.values.push_back(static_cast<double>(n[k]) * std::pow(V[k], series.t / r));
      }
      out.coefficients.push_back(std::move(series));
    }
  }
  return out;
}

}  // namespace qdim
