#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "qdim/ifs_model.hpp"
#include "qdim/potentials.hpp"

namespace qdim {

/// A parsed system document: the IFS, its potential family, and a digest of
/// the canonical JSON text for provenance.
struct SystemSpec {
  IfsSystem system;
  PotentialFamily family;
  /// Canonical (sorted-key, compact) JSON of the input.
  std::string canonical;
  /// FNV-1a 64-bit digest of `canonical`, 16 hex digits.
  std::string digest;
};

/// Parses
///   {"domain":[a,b], "kind":"similarity"|"gauss"|"custom",
///    "maps":[{"ratio","offset","orientation"} | {"mobius":[a,b,c,d]}],
///    "alphabet_size":m, "infinite":{"family":"geometric"|"gauss",
///    "ratio":..,"tail":{"c","p"}}, "K":.., "s":..,
///    "potential":{"kind":"logweights","weights":[..]|{"family":"geometric","ratio":..}}
///              | {"kind":"derivative","s":..,"g":"zero"},
///    "assumptions":[..], "label":".."}
/// Throws SpecError on malformed input.
[[nodiscard]] SystemSpec parse_system_json(std::string_view text);
[[nodiscard]] SystemSpec load_system_file(const std::filesystem::path& path);

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;
[[nodiscard]] std::string hex64(std::uint64_t value);

}  // namespace qdim
