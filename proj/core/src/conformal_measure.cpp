#include "qdim/conformal_measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "qdim/error.hpp"

namespace qdim {

CylinderMass cylinder_mass(const IfsSystem& system, const PotentialFamily& family,
                           const Word& word, MassMode mode, GridOptions grid) {
  CylinderMass out{word, 1.0, 1.0};
  if (word.empty()) return out;
  const NormEstimate weight = sup_norm_exp_birkhoff(family, system, word, grid);
  const double c = family.ratio_constant(system);
  if (mode.kind == MassMode::Kind::conformal) {
    out.upper = weight.norm;
    out.lower = weight.norm / c;
    return out;
  }
  if (!(mode.q > 0.0 && mode.q < 1.0)) throw SpecError("m_q masses need q in (0, 1)");
  if (!(mode.r > 0.0)) throw SpecError("m_q masses need r > 0");
  const NormEstimate deriv = derivative_sup_norm(system, word, grid);
  out.upper = std::pow(weight.norm * std::pow(deriv.norm, mode.r), mode.q);
  out.lower = out.upper / std::pow(c * std::pow(system.distortion(), mode.r), mode.q);
  return out;
}

std::size_t default_sample_depth(const IfsSystem& system) {
  const double s = system.contraction();
  if (s >= 1.0) return 60;
  return static_cast<std::size_t>(std::ceil(std::log(1e-12) / std::log(s)));
}

namespace {

/// Upper bound on sum_{i > m} ||e^{f^(i)}|| from the weight tail.
double tail_mass(const TailDescriptor& tail, std::size_t m) {
  const double x = static_cast<double>(m);
  if (tail.kind == TailKind::power_law) {
    if (tail.p <= 1.0) return std::numeric_limits<double>::infinity();
    return tail.c * std::pow(std::max(x, 1.0), 1.0 - tail.p) / (tail.p - 1.0);
  }
  return tail.c * std::pow(tail.p, x + 1.0) / (1.0 - tail.p);
}

double symbol_norm(const PotentialFamily& family, const IfsSystem& system, Symbol i) {
  return sup_norm_exp_birkhoff(family, system, Word{i}).norm;
}

double truncated_deficit(const IfsSystem& system, const PotentialFamily& family, std::size_t m) {
  if (system.is_finite()) return 0.0;
  if (family.is_constant()) {
    // Exact against the total mass 1 of a normalized family.
    double kept = 0.0;
    for (Symbol i = 1; i <= m; ++i) kept += std::exp(family.log_weight(i));
    const auto tail = family.weight_tail(system);
    if (!tail) return std::max(0.0, 1.0 - kept);
    return std::min(std::max(0.0, 1.0 - kept), tail_mass(*tail, m));
  }
  const auto tail = family.weight_tail(system);
  if (!tail) throw SpecError("infinite alphabets need a weight tail descriptor");
  double kept = 0.0;
  for (Symbol i = 1; i <= m; ++i) kept += symbol_norm(family, system, i);
  const double rest = tail_mass(*tail, m);
  return rest / (kept + rest);
}

struct ChunkContext {
  const IfsSystem& system;
  const PotentialFamily& family;
  std::size_t depth;
  std::size_t alphabet;
  std::uint64_t seed;
  std::size_t grid;
};

std::mt19937_64 chunk_engine(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

/// Constant weights: symbols are i.i.d., so applying maps in draw order has
/// the law of phi_{w|d}(x0).
void sample_constant_chunk(const ChunkContext& ctx, const std::vector<double>& cdf,
                           const std::vector<ContractionMap>& maps, std::size_t chunk,
                           double* out, std::size_t count) {
  auto engine = chunk_engine(ctx.seed, chunk);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double x0 = ctx.system.domain().midpoint();
  std::vector<Similarity> sims;
  const bool affine = ctx.system.is_similarity();
  if (affine) {
    for (const auto& m : maps) sims.push_back(*m.similarity());
  }
  for (std::size_t k = 0; k < count; ++k) {
    double x = x0;
    for (std::size_t j = 0; j < ctx.depth; ++j) {
      const double u = unit(engine) * cdf.back();
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const std::size_t i = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
      x = affine ? sims[i](x) : maps[i](x);
    }
    out[k] = x;
  }
}

/// Non-constant families: symbols are chosen left to right with
/// P(i | w) proportional to ||exp S_{wi}||, tracking S_w on a grid.
void sample_geometric_chunk(const ChunkContext& ctx, const std::vector<ContractionMap>& maps,
                            std::size_t chunk, double* out, std::size_t count) {
  auto engine = chunk_engine(ctx.seed, chunk);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Interval dom = ctx.system.domain();
  const std::vector<double> grid = grid_points(dom, ctx.grid);
  const std::size_t g = grid.size();
  const std::size_t m = maps.size();
  const double step = g > 1 ? (grid[g - 1] - grid[0]) / static_cast<double>(g - 1) : 1.0;

  // Per-symbol images of the grid and potential values there.
  std::vector<double> image(m * g);
  std::vector<double> f(m * g);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < g; ++k) {
      image[i * g + k] = maps[i](grid[k]);
      f[i * g + k] = ctx.family.value(maps[i], static_cast<Symbol>(i + 1), grid[k]);
    }
  }
  auto interpolate = [&](const std::vector<double>& s, double y) {
    if (g == 1) return s[0];
    const double pos = std::clamp((y - grid[0]) / step, 0.0, static_cast<double>(g - 1));
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(pos), g - 2);
    const double w = pos - static_cast<double>(k);
    return (1.0 - w) * s[k] + w * s[k + 1];
  };

  std::vector<double> s(g);
  std::vector<double> child(m * g);
  std::vector<double> log_norm(m);
  std::vector<double> weight(m);
  std::vector<std::size_t> word(ctx.depth);
  for (std::size_t n = 0; n < count; ++n) {
    std::fill(s.begin(), s.end(), 0.0);
    for (std::size_t j = 0; j < ctx.depth; ++j) {
      // S_{wi}(x) = S_w(phi_i x) + f^(i)(x)
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < g; ++k) {
          const double v = interpolate(s, image[i * g + k]) + f[i * g + k];
          child[i * g + k] = v;
          hi = std::max(hi, v);
        }
        log_norm[i] = hi;
        peak = std::max(peak, hi);
      }
      double total = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        total += std::exp(log_norm[i] - peak);
        weight[i] = total;
      }
      const double u = unit(engine) * total;
      std::size_t pick =
          std::upper_bound(weight.begin(), weight.end(), u) - weight.begin();
      pick = std::min(pick, m - 1);
      word[j] = pick;
      for (std::size_t k = 0; k < g; ++k) s[k] = child[pick * g + k] - log_norm[pick];
    }
    double x = dom.midpoint();
    for (std::size_t j = ctx.depth; j-- > 0;) x = maps[word[j]](x);
    out[n] = x;
  }
}

}  // namespace

std::size_t auto_truncation(const IfsSystem& system, const PotentialFamily& family,
                            double max_deficit, std::size_t limit) {
  if (system.is_finite()) return *system.alphabet_size();
  const auto tail = family.weight_tail(system);
  if (!tail) throw SpecError("infinite alphabets need a weight tail descriptor");
  std::size_t lo = 1;
  while (lo < limit && tail_mass(*tail, lo) > max_deficit) lo *= 2;
  std::size_t hi = std::min(lo, limit);
  lo = std::max<std::size_t>(1, hi / 2);
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (tail_mass(*tail, mid) > max_deficit) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return hi;
}

SampleSet sample_measure(const IfsSystem& system, const PotentialFamily& family,
                         std::size_t count, std::size_t depth, std::size_t truncation,
                         std::uint64_t seed, const SampleOptions& options) {
  if (count == 0) throw SpecError("sample size N must be >= 1");
  SampleSet out;
  out.seed = seed;
  out.depth = depth == 0 ? default_sample_depth(system) : depth;
  if (!system.is_finite() && truncation == 0) {
    truncation = auto_truncation(system, family, options.max_deficit);
  }
  const std::size_t m = system.effective_size(truncation);
  out.truncation = system.is_finite() ? 0 : m;
  out.deficit = truncated_deficit(system, family, m);
  if (out.deficit > options.max_deficit && !options.allow_deficit) {
    throw NumericalError("truncation deficit " + std::to_string(out.deficit) +
                         " exceeds the allowed " + std::to_string(options.max_deficit));
  }

  const std::vector<ContractionMap> maps = system.maps(m);
  std::vector<double> cdf;
  if (family.is_constant()) {
    // Renormalized weights: the conformal measure of the truncated family.
    double acc = 0.0;
    double peak = -std::numeric_limits<double>::infinity();
    for (Symbol i = 1; i <= m; ++i) peak = std::max(peak, family.log_weight(i));
    for (Symbol i = 1; i <= m; ++i) {
      acc += std::exp(family.log_weight(i) - peak);
      cdf.push_back(acc);
    }
  } else {
    out.bias_bound = family.ratio_constant(system);
  }

  const ChunkContext ctx{system, family, out.depth, m, seed, std::max<std::size_t>(2, options.grid)};
  out.points.resize(count);
  const std::size_t chunk = std::max<std::size_t>(1, options.chunk);
  const std::size_t chunks = (count + chunk - 1) / chunk;
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t n = std::min(chunk, count - begin);
    if (family.is_constant()) {
      sample_constant_chunk(ctx, cdf, maps, c, out.points.data() + begin, n);
    } else {
      sample_geometric_chunk(ctx, maps, c, out.points.data() + begin, n);
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, options.threads), chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
  }
  std::sort(out.points.begin(), out.points.end());
  const Interval dom = system.domain();
  for (double& x : out.points) x = std::clamp(x, dom.lo, dom.hi);
  return out;
}

WassersteinDetail wasserstein_1d_detail(double r, const std::vector<double>& a,
                                        const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw SpecError("Wasserstein distance needs nonempty samples");
  if (!(r > 0.0)) throw SpecError("Wasserstein order r must be positive");
  if (!std::is_sorted(a.begin(), a.end()) || !std::is_sorted(b.begin(), b.end())) {
    std::vector<double> sa = a;
    std::vector<double> sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return wasserstein_1d_detail(r, sa, sb);
  }
  const std::size_t n = std::max(a.size(), b.size());
  const double dn = static_cast<double>(n);
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / dn;
    const double x = a.size() == n ? a[k] : a[std::min(a.size() - 1, static_cast<std::size_t>(u * static_cast<double>(a.size())))];
    const double y = b.size() == n ? b[k] : b[std::min(b.size() - 1, static_cast<std::size_t>(u * static_cast<double>(b.size())))];
    const double c = std::pow(std::abs(x - y), r);
    sum += c;
    sum_sq += static_cast<long double>(c) * c;
  }
  WassersteinDetail out;
  out.pairs = n;
  out.cost = static_cast<double>(sum / dn);
  const double var = n > 1 ? std::max(0.0, static_cast<double>((sum_sq - sum * sum / dn) / (dn - 1.0))) : 0.0;
  out.cost_stderr = std::sqrt(var / dn);
  out.distance = std::pow(out.cost, 1.0 / r);
  out.distance_stderr = out.cost > 0.0 ? out.cost_stderr / (r * std::pow(out.cost, 1.0 - 1.0 / r))
                                       : std::pow(out.cost_stderr, 1.0 / r);
  return out;
}

double wasserstein_1d(double r, const SampleSet& a, const SampleSet& b) {
  return wasserstein_1d_detail(r, a.points, b.points).distance;
}

}  // namespace qdim
