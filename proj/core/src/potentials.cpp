#include "qdim/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qdim/error.hpp"
#include "qdim/word_tree.hpp"

namespace qdim {

double ConstantLogWeights::weight(Symbol i) const {
  if (i == 0) throw SpecError("symbol indices are 1-based");
  return std::visit(
      [i](const auto& src) -> double {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, Listed>) {
          if (i > src.weights.size()) {
            throw SpecError("no weight for symbol " + std::to_string(i));
          }
          return src.weights[i - 1];
        } else if constexpr (std::is_same_v<T, Geometric>) {
          return (1.0 - src.ratio) * std::pow(src.ratio, static_cast<double>(i) - 1.0);
        } else {
          return src.weight(i);
        }
      },
      source);
}

double ConstantLogWeights::log_weight(Symbol i) const {
  if (const auto* g = std::get_if<Geometric>(&source)) {
    if (i == 0) throw SpecError("symbol indices are 1-based");
    return std::log1p(-g->ratio) + (static_cast<double>(i) - 1.0) * std::log(g->ratio);
  }
  return std::log(weight(i));
}

PotentialFamily::PotentialFamily(Variant family, double shift)
    : family_(std::move(family)), shift_(shift) {
  if (const auto* c = std::get_if<ConstantLogWeights>(&family_)) {
    if (const auto* l = std::get_if<ConstantLogWeights::Listed>(&c->source)) {
      if (l->weights.empty()) throw SpecError("weight list is empty");
      for (double p : l->weights) {
        if (!(p > 0.0) || !std::isfinite(p)) throw SpecError("weights must be positive");
      }
    } else if (const auto* g = std::get_if<ConstantLogWeights::Geometric>(&c->source)) {
      if (!(g->ratio > 0.0 && g->ratio < 1.0)) {
        throw SpecError("geometric weight ratio must lie in (0, 1)");
      }
    } else if (!std::get<ConstantLogWeights::Generated>(c->source).weight) {
      throw SpecError("generated weights need a weight function");
    }
  } else {
    const auto& g = std::get<GeometricFamily>(family_);
    if (!(g.exponent > 0.0)) throw SpecError("derivative exponent must be positive");
    if (!g.base) throw SpecError("geometric family needs a base function");
    if (!(g.base_distortion >= 0.0)) throw SpecError("base distortion must be >= 0");
  }
  if (!std::isfinite(shift_)) throw SpecError("normalization shift must be finite");
}

PotentialFamily PotentialFamily::weights(std::vector<double> p) {
  return PotentialFamily(ConstantLogWeights{ConstantLogWeights::Listed{std::move(p)}});
}

PotentialFamily PotentialFamily::geometric_weights(double ratio) {
  return PotentialFamily(ConstantLogWeights{ConstantLogWeights::Geometric{ratio}});
}

PotentialFamily PotentialFamily::derivative_power(double exponent) {
  GeometricFamily g;
  g.exponent = exponent;
  return PotentialFamily(std::move(g));
}

double PotentialFamily::value(const ContractionMap& map, Symbol i, double x) const {
  if (const auto* c = std::get_if<ConstantLogWeights>(&family_)) return c->log_weight(i) - shift_;
  const auto& g = std::get<GeometricFamily>(family_);
  return g.base(x) + g.exponent * std::log(std::abs(map.derivative(x))) - shift_;
}

bool PotentialFamily::is_constant() const noexcept {
  return std::holds_alternative<ConstantLogWeights>(family_);
}

double PotentialFamily::log_weight(Symbol i) const {
  const auto* c = std::get_if<ConstantLogWeights>(&family_);
  if (!c) throw SpecError("log_weight is defined for constant weights only");
  return c->log_weight(i) - shift_;
}

PotentialFamily PotentialFamily::with_shift(double shift) const {
  return PotentialFamily(family_, shift);
}

double PotentialFamily::ratio_constant(const IfsSystem& system) const {
  if (is_constant()) return 1.0;
  const auto& g = std::get<GeometricFamily>(family_);
  return std::pow(system.distortion(), g.exponent) * std::exp(g.base_distortion);
}

std::optional<TailDescriptor> PotentialFamily::weight_tail(const IfsSystem& system) const {
  const double scale = std::exp(-shift_);
  if (const auto* c = std::get_if<ConstantLogWeights>(&family_)) {
    if (const auto* g = std::get_if<ConstantLogWeights::Geometric>(&c->source)) {
      return TailDescriptor{TailKind::exponential, scale * (1.0 - g->ratio) / g->ratio, g->ratio, 1};
    }
    if (const auto* gen = std::get_if<ConstantLogWeights::Generated>(&c->source)) {
      TailDescriptor t = gen->tail;
      t.c *= scale;
      return t;
    }
    return std::nullopt;
  }
  const auto& g = std::get<GeometricFamily>(family_);
  const TailDescriptor* maps = system.tail();
  if (!maps) return std::nullopt;
  // ||e^{f^(i)}|| <= e^{sup g} ||phi_i'||^s; the constant prefactor is taken
  // from g at the midpoint.
  const double base = std::exp(g.base(system.domain().midpoint()) + g.base_distortion);
  TailDescriptor t = *maps;
  t.c = scale * base * std::pow(maps->c, g.exponent);
  t.p = maps->kind == TailKind::power_law ? maps->p * g.exponent : std::pow(maps->p, g.exponent);
  return t;
}

double birkhoff_sum(const PotentialFamily& family, const IfsSystem& system, const Word& word,
                    double x) {
  if (word.empty()) throw SpecError("Birkhoff sums need a nonempty word");
  system.check_point(x);
  double sum = 0.0;
  double y = x;
  for (std::size_t k = word.size(); k-- > 0;) {
    const Symbol i = word[k];
    const ContractionMap m = system.map(i);
    sum += family.value(m, i, y);
    y = m(y);
  }
  return sum;
}

NormEstimate sup_norm_exp_birkhoff(const PotentialFamily& family, const IfsSystem& system,
                                   const Word& word, GridOptions grid) {
  if (word.empty()) throw SpecError("sup_norm_exp_birkhoff needs a nonempty word");
  if (family.is_constant()) {
    double log_norm = 0.0;
    for (Symbol i : word.symbols()) {
      system.check_symbol(i);
      log_norm += family.log_weight(i);
    }
    return {std::exp(log_norm), 1.0};
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : grid_points(system.domain(), grid.points)) {
    const double s = birkhoff_sum(family, system, word, x);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const double factor = std::max(1.0, family.ratio_constant(system) * std::exp(lo - hi));
  return {std::exp(hi), factor};
}

namespace {

/// log ||e^{f^(i)}|| for a single symbol.
double symbol_log_norm(const PotentialFamily& family, const ContractionMap& map, Symbol i,
                       const std::vector<double>& grid) {
  if (family.is_constant()) return family.log_weight(i);
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : grid) hi = std::max(hi, family.value(map, i, x));
  return hi;
}

}  // namespace

SummabilityReport summability_and_holder(const PotentialFamily& family, const IfsSystem& system,
                                         std::size_t sample_depth,
                                         const SummabilityOptions& options) {
  if (sample_depth == 0) throw SpecError("sample_depth must be >= 1");
  SummabilityReport report;
  const std::vector<double> grid = grid_points(system.domain(), options.grid.points);

  std::size_t enumerated = 0;
  if (system.is_finite()) {
    enumerated = *system.alphabet_size();
  } else {
    const auto tail = family.weight_tail(system);
    if (!tail) throw SpecError("infinite alphabets need a weight tail descriptor");
    const double e = static_cast<double>(std::max<std::size_t>(1, options.enumerated_symbols));
    if (tail->kind == TailKind::power_law) {
      if (tail->p <= 1.0) {
        throw SummabilityError("non-summable family: sum of ||e^f_i|| ~ i^-" +
                               std::to_string(tail->p) + " diverges");
      }
      report.tail_upper = tail->c * std::pow(e, 1.0 - tail->p) / (tail->p - 1.0);
      report.tail_lower = tail->c * std::pow(e + 1.0, 1.0 - tail->p) / (tail->p - 1.0);
    } else {
      report.tail_upper = tail->c * std::pow(tail->p, e + 1.0) / (1.0 - tail->p);
      report.tail_lower = tail->c * std::pow(tail->p, e + 1.0) / -std::log(tail->p);
    }
    enumerated = static_cast<std::size_t>(e);
  }

  // Sum smallest terms first.
  std::vector<double> terms;
  terms.reserve(enumerated);
  for (Symbol i = 1; i <= enumerated; ++i) {
    terms.push_back(std::exp(symbol_log_norm(family, system.map(i), i, grid)));
  }
  double partial = 0.0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) partial += *it;
  report.partial_sum = partial;
  report.enumerated = enumerated;
  report.tail_sum = partial + report.tail_upper;

  // Holder variations and the ratio constant, by sampling.
  std::mt19937_64 rng(options.seed);
  const std::size_t alphabet =
      system.is_finite() ? *system.alphabet_size() : std::max<std::size_t>(1, options.symbol_limit);
  std::uniform_int_distribution<Symbol> pick(1, static_cast<Symbol>(alphabet));
  std::uniform_real_distribution<double> point(system.domain().lo, system.domain().hi);
  const std::size_t per_depth = std::max<std::size_t>(1, options.pairs / sample_depth);

  report.certificate.v_n.assign(sample_depth, 0.0);
  double log_ratio = 0.0;
  for (std::size_t n = 1; n <= sample_depth; ++n) {
    for (std::size_t k = 0; k < per_depth; ++k) {
      std::vector<Symbol> symbols(n);
      for (auto& s : symbols) s = pick(rng);
      const Word w(std::move(symbols));
      const double x = point(rng);
      const double y = point(rng);
      // f^(w_1) o phi_{sigma w}
      const Word tail = w.suffix(1);
      const ContractionMap head = system.map(w[0]);
      const double ux = tail.empty() ? x : compose_and_derivative(system, tail, x).value;
      const double uy = tail.empty() ? y : compose_and_derivative(system, tail, y).value;
      const double osc = std::abs(family.value(head, w[0], ux) - family.value(head, w[0], uy));
      report.certificate.v_n[n - 1] = std::max(report.certificate.v_n[n - 1], osc);
      log_ratio = std::max(
          log_ratio, std::abs(birkhoff_sum(family, system, w, x) - birkhoff_sum(family, system, w, y)));
    }
  }

  // Holder order from the decay of log v_n; 1 when there is no variation.
  std::vector<std::pair<double, double>> fit;
  for (std::size_t n = 0; n < sample_depth; ++n) {
    if (report.certificate.v_n[n] > 1e-300) {
      fit.emplace_back(static_cast<double>(n), std::log(report.certificate.v_n[n]));
    }
  }
  double order = 1.0;
  if (fit.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : fit) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(fit.size());
    my /= static_cast<double>(fit.size());
    double sxy = 0, sxx = 0;
    for (auto [x, y] : fit) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    if (sxx > 0 && sxy < 0) order = -sxy / sxx;
  }
  report.certificate.holder_order = order;
  double v_beta = 0.0;
  for (std::size_t n = 0; n < sample_depth; ++n) {
    v_beta = std::max(v_beta, report.certificate.v_n[n] * std::exp(order * static_cast<double>(n)));
  }
  report.certificate.v_beta = v_beta;
  report.ratio = RatioConstant{std::exp(log_ratio), true};
  return report;
}

namespace {

double aitken(double x0, double x1, double x2) {
  const double d1 = x1 - x0;
  const double d2 = x2 - x1;
  const double den = d2 - d1;
  if (std::abs(den) < 1e-15 * std::max({1.0, std::abs(x0), std::abs(x2)})) return x2;
  return x2 - d2 * d2 / den;
}

}  // namespace

PotentialPressure potential_pressure(const PotentialFamily& family, const IfsSystem& system,
                                     std::size_t depth, std::size_t truncation) {
  PotentialPressure out;
  const PotentialFamily raw = family.with_shift(0.0);
  if (raw.is_constant()) {
    const auto& weights = std::get<ConstantLogWeights>(raw.family());
    if (const auto* g = std::get_if<ConstantLogWeights::Geometric>(&weights.source)) {
      out.pressure = (system.is_finite() || truncation == 0)
                         ? 0.0
                         : std::log1p(-std::pow(g->ratio, static_cast<double>(truncation)));
      if (system.is_finite()) {
        // Geometric weights on a finite alphabet: plain finite sum.
        std::vector<double> logs;
        for (Symbol i = 1; i <= *system.alphabet_size(); ++i) logs.push_back(raw.log_weight(i));
        out.pressure = log_sum_exp(logs);
      }
    } else {
      const std::size_t m = system.effective_size(truncation);
      std::vector<double> logs;
      logs.reserve(m);
      for (Symbol i = 1; i <= m; ++i) logs.push_back(raw.log_weight(i));
      out.pressure = log_sum_exp(logs);
    }
    out.exact = true;
    out.depths = {1};
    out.per_depth = {out.pressure};
    return out;
  }

  const std::size_t m = system.effective_size(truncation);
  // Cap the table at ~2^20 words.
  std::size_t d = std::max<std::size_t>(depth, 2);
  if (m > 1) {
    const auto cap = static_cast<std::size_t>(std::floor(20.0 * std::log(2.0) / std::log(static_cast<double>(m))));
    d = std::min(d, std::max<std::size_t>(cap, 2));
  }
  // Telescoped increments y_n = (a_n - a_{n-2}) / 2 converge geometrically
  // under bounded distortion; Aitken accelerates them.
  std::vector<std::size_t> depths;
  for (std::size_t n = d % 2 == 0 ? 2 : 1; n <= d; n += 2) depths.push_back(n);
  std::vector<double> a;
  for (std::size_t n : depths) {
    const WordTable table = build_word_table(system, raw, n, m);
    a.push_back(log_word_sum(table, 1.0, 0.0));
    out.depths.push_back(n);
    out.per_depth.push_back(a.back() / static_cast<double>(n));
  }
  std::vector<double> y;
  for (std::size_t k = 1; k < a.size(); ++k) {
    y.push_back((a[k] - a[k - 1]) / static_cast<double>(depths[k] - depths[k - 1]));
  }
  if (y.empty()) {
    out.pressure = out.per_depth.back();
    out.error_indicator = std::abs(out.pressure);
  } else if (y.size() < 3) {
    out.pressure = y.back();
    out.error_indicator = y.size() == 2 ? std::abs(y[1] - y[0]) : std::abs(y[0] - out.per_depth.back());
  } else {
    const std::size_t k = y.size();
    out.pressure = aitken(y[k - 3], y[k - 2], y[k - 1]);
    out.error_indicator = std::abs(out.pressure - y[k - 1]);
  }
  return out;
}

PotentialFamily normalize_pressure(const PotentialFamily& family, const IfsSystem& system,
                                   std::size_t depth, std::size_t truncation) {
  if (!system.is_finite()) {
    const auto tail = family.weight_tail(system);
    if (tail && tail->kind == TailKind::power_law && tail->p <= 1.0) {
      throw SummabilityError("non-summable family cannot be normalized");
    }
  }
  if (!system.is_finite() && truncation == 0) {
    if (!family.is_constant() ||
        !std::holds_alternative<ConstantLogWeights::Geometric>(
            std::get<ConstantLogWeights>(family.family()).source)) {
      throw SpecError("normalizing an infinite family needs a truncation M");
    }
  }
  const PotentialPressure p = potential_pressure(family, system, depth, truncation);
  return family.with_shift(p.pressure);
}

}  // namespace qdim
