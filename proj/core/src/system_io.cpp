#include "qdim/system_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qdim/error.hpp"

namespace qdim {

namespace {

using nlohmann::json;

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw SpecError(std::string("missing field \"") + key + "\"");
  if (!j.at(key).is_number()) throw SpecError(std::string("field \"") + key + "\" must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

Interval parse_domain(const json& doc) {
  if (!doc.contains("domain")) throw SpecError("missing field \"domain\"");
  const json& d = doc.at("domain");
  if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number()) {
    throw SpecError("\"domain\" must be [a, b]");
  }
  const Interval x{d[0].get<double>(), d[1].get<double>()};
  if (!(x.lo < x.hi)) throw SpecError("\"domain\" must satisfy a < b");
  return x;
}

TailDescriptor parse_tail(const json& j, TailDescriptor fallback) {
  if (!j.contains("tail")) return fallback;
  const json& t = j.at("tail");
  TailDescriptor out = fallback;
  out.c = number_or(t, "c", fallback.c);
  out.p = number_or(t, "p", fallback.p);
  if (t.contains("kind")) {
    const auto kind = t.at("kind").get<std::string>();
    if (kind == "power") {
      out.kind = TailKind::power_law;
    } else if (kind == "exponential") {
      out.kind = TailKind::exponential;
    } else {
      throw SpecError("tail kind must be \"power\" or \"exponential\"");
    }
  }
  if (!(out.c > 0.0) || !(out.p > 0.0)) throw SpecError("tail constants must be positive");
  return out;
}

IfsSystem parse_ifs(const json& doc) {
  const Interval domain = parse_domain(doc);
  if (!doc.contains("kind") || !doc.at("kind").is_string()) {
    throw SpecError("missing field \"kind\"");
  }
  const std::string kind = doc.at("kind").get<std::string>();
  const bool infinite = doc.contains("infinite");

  if (kind == "similarity") {
    if (infinite) {
      const json& inf = doc.at("infinite");
      const std::string family = inf.value("family", "geometric");
      if (family != "geometric") throw SpecError("similarity systems support the geometric family");
      if (domain.lo != 0.0 || domain.hi != 1.0) {
        throw SpecError("the geometric family lives on [0, 1]");
      }
      return geometric_system(number(inf, "ratio"));
    }
    if (!doc.contains("maps") || !doc.at("maps").is_array()) {
      throw SpecError("similarity systems need \"maps\"");
    }
    std::vector<Similarity> maps;
    for (const json& m : doc.at("maps")) {
      Similarity s;
      s.ratio = number(m, "ratio");
      s.offset = number_or(m, "offset", 0.0);
      const double o = number_or(m, "orientation", 1.0);
      if (o != 1.0 && o != -1.0) throw SpecError("orientation must be +1 or -1");
      s.orientation = static_cast<int>(o);
      maps.push_back(s);
    }
    return similarity_system(domain, std::move(maps));
  }

  if (kind == "gauss") {
    if (domain.lo != 0.0 || domain.hi != 1.0) throw SpecError("Gauss branches live on [0, 1]");
    const double k = number_or(doc, "K", 4.0);
    const double s = number_or(doc, "s", 1.0);
    if (infinite) {
      const json& inf = doc.at("infinite");
      if (inf.value("family", "gauss") != "gauss") {
        throw SpecError("gauss systems support the gauss family");
      }
      IfsSystem::InfiniteAlphabet alphabet;
      alphabet.generator = gauss_branch;
      alphabet.tail = parse_tail(inf, TailDescriptor{TailKind::power_law, 1.0, 2.0, 1});
      return IfsSystem(domain, std::move(alphabet), s, k);
    }
    const double m = number(doc, "alphabet_size");
    if (!(m >= 1.0) || m != std::floor(m)) throw SpecError("alphabet_size must be a positive integer");
    IfsSystem::FiniteAlphabet alphabet;
    for (Symbol i = 1; i <= static_cast<Symbol>(m); ++i) alphabet.maps.push_back(gauss_branch(i));
    return IfsSystem(domain, std::move(alphabet), s, k);
  }

  if (kind == "custom") {
    if (infinite) throw SpecError("custom systems must list their maps");
    if (!doc.contains("maps") || !doc.at("maps").is_array()) {
      throw SpecError("custom systems need \"maps\"");
    }
    IfsSystem::FiniteAlphabet alphabet;
    double bound = 0.0;
    for (const json& m : doc.at("maps")) {
      if (m.contains("mobius")) {
        const json& c = m.at("mobius");
        if (!c.is_array() || c.size() != 4) throw SpecError("\"mobius\" needs [a, b, c, d]");
        alphabet.maps.push_back(mobius_branch(c[0].get<double>(), c[1].get<double>(),
                                              c[2].get<double>(), c[3].get<double>(), domain));
      } else if (m.contains("ratio")) {
        Similarity s{number(m, "ratio"), number_or(m, "offset", 0.0),
                     static_cast<int>(number_or(m, "orientation", 1.0))};
        alphabet.maps.emplace_back(s);
      } else {
        throw SpecError("custom maps need \"mobius\" or \"ratio\"");
      }
      bound = std::max(bound, alphabet.maps.back().derivative_bound());
    }
    if (alphabet.maps.empty()) throw SpecError("custom systems need at least one map");
    return IfsSystem(domain, std::move(alphabet), number_or(doc, "s", bound), number(doc, "K"));
  }

  throw SpecError("unknown system kind \"" + kind + "\"");
}

PotentialFamily parse_potential(const json& doc, const IfsSystem& system) {
  if (!doc.contains("potential")) throw SpecError("missing field \"potential\"");
  const json& p = doc.at("potential");
  const std::string kind = p.value("kind", "");
  if (kind == "logweights") {
    if (!p.contains("weights")) throw SpecError("logweights potential needs \"weights\"");
    const json& w = p.at("weights");
    if (w.is_array()) {
      if (!system.is_finite()) throw SpecError("listed weights need a finite alphabet");
      if (w.size() != *system.alphabet_size()) {
        throw SpecError("weight count does not match the alphabet size");
      }
      return PotentialFamily::weights(w.get<std::vector<double>>());
    }
    if (w.is_object() && w.value("family", "") == "geometric") {
      return PotentialFamily::geometric_weights(number(w, "ratio"));
    }
    throw SpecError("\"weights\" must be a list or {\"family\":\"geometric\",\"ratio\":..}");
  }
  if (kind == "derivative") {
    const std::string g = p.value("g", "zero");
    if (g != "zero") throw SpecError("only g = \"zero\" is supported");
    return PotentialFamily::derivative_power(number(p, "s"));
  }
  throw SpecError("potential kind must be \"logweights\" or \"derivative\"");
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

SystemSpec parse_system_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("system document must be a JSON object");
  try {
    IfsSystem system = parse_ifs(doc);
    PotentialFamily family = parse_potential(doc, system);
    if (doc.contains("assumptions")) {
      system.assumptions = doc.at("assumptions").get<std::vector<std::string>>();
    }
    system.label = doc.value("label", "");
    std::string canonical = doc.dump();
    std::string digest = hex64(fnv1a64(canonical));
    return SystemSpec{std::move(system), std::move(family), std::move(canonical),
                      std::move(digest)};
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed system document: ") + e.what());
  }
}

SystemSpec load_system_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read system file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_system_json(text.str());
}

}  // namespace qdim
