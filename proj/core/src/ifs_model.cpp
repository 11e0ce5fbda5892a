#include "qdim/ifs_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qdim/error.hpp"

namespace qdim {

double ContractionMap::operator()(double x) const {
  return std::visit(
      [x](const auto& m) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Similarity>) {
          return m(x);
        } else {
          return m.eval(x);
        }
      },
      impl_);
}

double ContractionMap::derivative(double x) const {
  return std::visit(
      [x](const auto& m) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Similarity>) {
          return m.derivative(x);
        } else {
          return m.derivative(x);
        }
      },
      impl_);
}

double ContractionMap::derivative_bound() const noexcept {
  if (const auto* s = std::get_if<Similarity>(&impl_)) return s->ratio;
  return std::get<AnalyticBranch>(impl_).derivative_bound;
}

ContractionMap gauss_branch(Symbol i) {
  if (i == 0) throw SpecError("Gauss branches are indexed from 1");
  const double k = static_cast<double>(i);
  return AnalyticBranch{
      [k](double x) { return 1.0 / (k + x); },
      [k](double x) { return -1.0 / ((k + x) * (k + x)); },
      1.0 / (k * k),
  };
}

ContractionMap mobius_branch(double a, double b, double c, double d, const Interval& domain) {
  const double det = a * d - b * c;
  if (det == 0.0) throw SpecError("degenerate Mobius branch (ad - bc = 0)");
  const double den_lo = c * domain.lo + d;
  const double den_hi = c * domain.hi + d;
  if (den_lo == 0.0 || den_hi == 0.0 || (den_lo > 0.0) != (den_hi > 0.0)) {
    throw SpecError("Mobius branch has a pole inside the domain");
  }
  const double min_den = std::min(std::abs(den_lo), std::abs(den_hi));
  return AnalyticBranch{
      [=](double x) { return (a * x + b) / (c * x + d); },
      [=](double x) { return det / ((c * x + d) * (c * x + d)); },
      std::abs(det) / (min_den * min_den),
  };
}

double TailDescriptor::bound(Symbol i) const {
  const double k = static_cast<double>(i);
  return kind == TailKind::power_law ? c * std::pow(k, -p) : c * std::pow(p, k);
}

double TailDescriptor::exp_rate() const {
  return kind == TailKind::exponential ? -std::log(p) : 0.0;
}

IfsSystem::IfsSystem(Interval domain, FiniteAlphabet alphabet, double contraction,
                     double distortion, std::optional<Interval> open_set)
    : domain_(domain),
      alphabet_(std::move(alphabet)),
      contraction_(contraction),
      distortion_(distortion),
      open_set_(open_set.value_or(domain)) {
  validate();
}

IfsSystem::IfsSystem(Interval domain, InfiniteAlphabet alphabet, double contraction,
                     double distortion, std::optional<Interval> open_set)
    : domain_(domain),
      alphabet_(std::move(alphabet)),
      contraction_(contraction),
      distortion_(distortion),
      open_set_(open_set.value_or(domain)) {
  validate();
}

void IfsSystem::validate() {
  if (!(domain_.lo < domain_.hi)) throw SpecError("domain must be a nondegenerate interval");
  if (!(contraction_ > 0.0 && contraction_ <= 1.0)) {
    throw SpecError("contraction bound s must lie in (0, 1]");
  }
  if (!(distortion_ >= 1.0)) throw SpecError("distortion constant K must be >= 1");
  if (is_similarity()) distortion_ = 1.0;

  const std::size_t checked = is_finite() ? *alphabet_size() : std::size_t{8};
  if (checked == 0) throw SpecError("alphabet must be nonempty");
  const double slack = 1e-9 * domain_.diameter();
  for (Symbol i = 1; i <= checked; ++i) {
    const ContractionMap m = map(i);
    if (const auto* sim = m.similarity()) {
      if (!(sim->ratio > 0.0 && sim->ratio < 1.0)) {
        throw SpecError("similarity ratio must lie in (0, 1)");
      }
    }
    if (m.derivative_bound() > contraction_ * (1.0 + 1e-12)) {
      throw SpecError("map " + std::to_string(i) + " violates the contraction bound s");
    }
    if (!domain_.contains(m(domain_.lo), slack) || !domain_.contains(m(domain_.hi), slack)) {
      throw SpecError("map " + std::to_string(i) + " does not send the domain into itself");
    }
  }
  if (const auto* inf = std::get_if<InfiniteAlphabet>(&alphabet_)) {
    if (!inf->generator) throw SpecError("infinite alphabet needs a generator");
    if (!(inf->tail.c > 0.0 && inf->tail.p > 0.0)) throw SpecError("invalid tail descriptor");
    if (inf->tail.kind == TailKind::exponential && !(inf->tail.p < 1.0)) {
      throw SpecError("exponential tail base must lie in (0, 1)");
    }
  }
}

bool IfsSystem::is_finite() const noexcept {
  return std::holds_alternative<FiniteAlphabet>(alphabet_);
}

std::optional<std::size_t> IfsSystem::alphabet_size() const noexcept {
  if (const auto* f = std::get_if<FiniteAlphabet>(&alphabet_)) return f->maps.size();
  return std::nullopt;
}

bool IfsSystem::is_similarity() const noexcept {
  if (const auto* f = std::get_if<FiniteAlphabet>(&alphabet_)) {
    return std::all_of(f->maps.begin(), f->maps.end(),
                       [](const ContractionMap& m) { return m.is_similarity(); });
  }
  return std::get<InfiniteAlphabet>(alphabet_).similarity;
}

std::optional<double> IfsSystem::geometric_ratio() const noexcept {
  if (const auto* inf = std::get_if<InfiniteAlphabet>(&alphabet_)) return inf->geometric_ratio;
  return std::nullopt;
}

const TailDescriptor* IfsSystem::tail() const noexcept {
  if (const auto* inf = std::get_if<InfiniteAlphabet>(&alphabet_)) return &inf->tail;
  return nullptr;
}

void IfsSystem::check_symbol(Symbol i) const {
  if (i == 0) throw SpecError("symbol indices are 1-based");
  if (const auto* f = std::get_if<FiniteAlphabet>(&alphabet_)) {
    if (i > f->maps.size()) {
      throw SpecError("symbol " + std::to_string(i) + " out of range for alphabet of size " +
                      std::to_string(f->maps.size()));
    }
  }
}

void IfsSystem::check_point(double x) const {
  if (!domain_.contains(x, 1e-12 * domain_.diameter())) {
    throw SpecError("point " + std::to_string(x) + " lies outside the domain");
  }
}

ContractionMap IfsSystem::map(Symbol i) const {
  check_symbol(i);
  if (const auto* f = std::get_if<FiniteAlphabet>(&alphabet_)) return f->maps[i - 1];
  return std::get<InfiniteAlphabet>(alphabet_).generator(i);
}

std::vector<ContractionMap> IfsSystem::maps(std::size_t count) const {
  std::vector<ContractionMap> out;
  out.reserve(count);
  for (Symbol i = 1; i <= count; ++i) out.push_back(map(i));
  return out;
}

std::size_t IfsSystem::effective_size(std::size_t truncation) const {
  if (const auto n = alphabet_size()) return *n;
  if (truncation == 0) throw SpecError("infinite alphabets need a truncation M >= 1");
  return truncation;
}

IfsSystem similarity_system(const Interval& domain, std::vector<Similarity> maps) {
  double s = 0.0;
  IfsSystem::FiniteAlphabet alphabet;
  for (const auto& m : maps) {
    s = std::max(s, m.ratio);
    alphabet.maps.emplace_back(m);
  }
  if (alphabet.maps.empty()) throw SpecError("similarity system needs at least one map");
  return IfsSystem(domain, std::move(alphabet), s, 1.0);
}

IfsSystem geometric_system(double ratio) {
  if (!(ratio > 0.0 && ratio <= 0.5)) {
    throw SpecError("geometric system needs ratio in (0, 1/2] for disjoint images");
  }
  IfsSystem::InfiniteAlphabet alphabet;
  alphabet.generator = [ratio](Symbol i) -> ContractionMap {
    const double k = static_cast<double>(i);
    return Similarity{std::pow(ratio, k), 1.0 - std::pow(ratio, k - 1.0), 1};
  };
  alphabet.tail = TailDescriptor{TailKind::exponential, 1.0, ratio, 1};
  alphabet.similarity = true;
  alphabet.geometric_ratio = ratio;
  return IfsSystem(Interval{0.0, 1.0}, std::move(alphabet), ratio, 1.0);
}

IfsSystem gauss_system(std::size_t alphabet_size) {
  if (alphabet_size == 0) throw SpecError("Gauss system needs at least one branch");
  IfsSystem::FiniteAlphabet alphabet;
  for (Symbol i = 1; i <= alphabet_size; ++i) alphabet.maps.push_back(gauss_branch(i));
  // phi_1 has |phi_1'(0)| = 1, so no uniform one-step contraction below 1 exists.
  return IfsSystem(Interval{0.0, 1.0}, std::move(alphabet), 1.0, 4.0);
}

IfsSystem gauss_system_infinite() {
  IfsSystem::InfiniteAlphabet alphabet;
  alphabet.generator = gauss_branch;
  alphabet.tail = TailDescriptor{TailKind::power_law, 1.0, 2.0, 1};
  return IfsSystem(Interval{0.0, 1.0}, std::move(alphabet), 1.0, 4.0);
}

ValueAndDerivative compose_and_derivative(const IfsSystem& system, const Word& word, double x) {
  system.check_point(x);
  ValueAndDerivative out{x, 1.0};
  for (std::size_t k = word.size(); k-- > 0;) {
    const ContractionMap m = system.map(word[k]);
    out.derivative *= std::abs(m.derivative(out.value));
    out.value = m(out.value);
  }
  return out;
}

std::vector<double> grid_points(const Interval& domain, std::size_t count) {
  if (count < 2) return {domain.midpoint()};
  std::vector<double> g(count);
  const double h = domain.diameter() / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) g[k] = domain.lo + h * static_cast<double>(k);
  g.back() = domain.hi;
  return g;
}

NormEstimate derivative_sup_norm(const IfsSystem& system, const Word& word, GridOptions grid) {
  if (word.empty()) throw SpecError("derivative_sup_norm needs a nonempty word");
  bool similar = true;
  double product = 1.0;
  for (Symbol i : word.symbols()) {
    const ContractionMap m = system.map(i);
    if (const auto* sim = m.similarity()) {
      product *= sim->ratio;
    } else {
      similar = false;
    }
  }
  if (similar) return {product, 1.0};

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double x : grid_points(system.domain(), grid.points)) {
    const double d = compose_and_derivative(system, word, x).derivative;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  // true sup <= K * true inf <= K * grid min
  const double factor = std::max(1.0, system.distortion() * lo / hi);
  return {hi, factor};
}

CylinderInfo cylinder_geometry(const IfsSystem& system, const Word& word, GridOptions grid) {
  for (Symbol i : word.symbols()) system.check_symbol(i);
  CylinderInfo info;
  info.word = word;
  const double diam = system.domain().diameter();
  info.representative = compose_and_derivative(system, word, system.domain().midpoint()).value;
  if (word.empty()) {
    info.derivative = {1.0, 1.0};
    info.diameter_bound = diam;
    return info;
  }
  info.derivative = derivative_sup_norm(system, word, grid);
  // Mean value theorem on an interval: diam phi_w(X) <= ||phi_w'|| diam X.
  const double by_derivative = info.derivative.upper() * diam;
  const double by_contraction =
      std::pow(system.contraction(), static_cast<double>(word.size())) * diam;
  info.diameter_bound = std::min(by_derivative, by_contraction);
  return info;
}

Interval cylinder_interval(const IfsSystem& system, const Word& word) {
  const double a = compose_and_derivative(system, word, system.domain().lo).value;
  const double b = compose_and_derivative(system, word, system.domain().hi).value;
  return {std::min(a, b), std::max(a, b)};
}

double sampled_distortion(const IfsSystem& system, std::size_t max_length, std::size_t samples,
                          std::uint64_t seed, std::size_t symbol_limit) {
  std::mt19937_64 rng(seed);
  const std::size_t alphabet = system.effective_size(symbol_limit);
  std::uniform_int_distribution<Symbol> pick(1, static_cast<Symbol>(alphabet));
  std::uniform_int_distribution<std::size_t> length(1, std::max<std::size_t>(1, max_length));
  std::uniform_real_distribution<double> point(system.domain().lo, system.domain().hi);
  double worst = 1.0;
  for (std::size_t k = 0; k < samples; ++k) {
    std::vector<Symbol> symbols(length(rng));
    for (auto& s : symbols) s = pick(rng);
    const Word w(std::move(symbols));
    const double a = compose_and_derivative(system, w, point(rng)).derivative;
    const double b = compose_and_derivative(system, w, point(rng)).derivative;
    if (a > 0.0 && b > 0.0) worst = std::max(worst, std::max(a / b, b / a));
  }
  return worst;
}

}  // namespace qdim
