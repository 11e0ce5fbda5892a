#include "qdim/word.hpp"

#include <algorithm>

#include "qdim/error.hpp"

namespace qdim {

namespace {

void check_symbol(Symbol s) {
  if (s == 0) throw SpecError("symbol indices are 1-based; got 0");
}

}  // namespace

Word::Word(std::initializer_list<Symbol> symbols) : symbols_(symbols) {
  std::for_each(symbols_.begin(), symbols_.end(), check_symbol);
}

Word::Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  std::for_each(symbols_.begin(), symbols_.end(), check_symbol);
}

Word Word::parent() const {
  if (symbols_.empty()) throw SpecError("the empty word has no parent");
  Word w;
  w.symbols_.assign(symbols_.begin(), symbols_.end() - 1);
  return w;
}

Word Word::suffix(std::size_t k) const {
  Word w;
  if (k < symbols_.size()) w.symbols_.assign(symbols_.begin() + static_cast<std::ptrdiff_t>(k), symbols_.end());
  return w;
}

Word Word::prefix(std::size_t k) const {
  Word w;
  k = std::min(k, symbols_.size());
  w.symbols_.assign(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(k));
  return w;
}

Word Word::extended(Symbol s) const {
  Word w = *this;
  w.push_back(s);
  return w;
}

Word Word::concat(const Word& tail) const {
  Word w = *this;
  w.symbols_.insert(w.symbols_.end(), tail.symbols_.begin(), tail.symbols_.end());
  return w;
}

bool Word::is_prefix_of(const Word& other) const noexcept {
  return symbols_.size() <= other.symbols_.size() &&
         std::equal(symbols_.begin(), symbols_.end(), other.symbols_.begin());
}

void Word::push_back(Symbol s) {
  check_symbol(s);
  symbols_.push_back(s);
}

std::string Word::to_string() const {
  std::string out = "(";
  for (std::size_t k = 0; k < symbols_.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(symbols_[k]);
  }
  out += ')';
  return out;
}

}  // namespace qdim
