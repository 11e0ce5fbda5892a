#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace qdim {

/// 1-based index into the alphabet of an iterated function system.
using Symbol = std::uint32_t;

/// Finite word over the alphabet. The empty word is the identity.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Symbol> symbols);
  explicit Word(std::vector<Symbol> symbols);

  [[nodiscard]] std::size_t size() const noexcept { return symbols_.size(); }
  [[nodiscard]] bool empty() const noexcept { return symbols_.empty(); }
  [[nodiscard]] Symbol operator[](std::size_t k) const { return symbols_[k]; }
  [[nodiscard]] Symbol back() const { return symbols_.back(); }
  [[nodiscard]] std::span<const Symbol> symbols() const noexcept { return symbols_; }

  /// The word with its last symbol removed. Throws on the empty word.
  [[nodiscard]] Word parent() const;
  /// The suffix starting at position k (0-based), i.e. sigma^k applied.
  [[nodiscard]] Word suffix(std::size_t k) const;
  [[nodiscard]] Word prefix(std::size_t k) const;
  [[nodiscard]] Word extended(Symbol s) const;
  [[nodiscard]] Word concat(const Word& tail) const;
  [[nodiscard]] bool is_prefix_of(const Word& other) const noexcept;

  void push_back(Symbol s);

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  std::vector<Symbol> symbols_;
};

}  // namespace qdim
