#include "ragulator/text/tokenize.h"

#include <cctype>

namespace ragulator::text {
namespace {

bool IsAsciiAlnum(unsigned char c) { return std::isalnum(c) != 0 && c < 0x80; }

// Start of the code point that ends just before `end`.
std::size_t PrevCodePoint(std::string_view text, std::size_t end) {
  std::size_t i = end - 1;
  while (i > 0 && (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) --i;
  return i;
}

bool KeepTrailingPeriod(std::string_view text, std::size_t word_start, std::size_t period_pos) {
  if (period_pos == word_start) return false;
  if (!IsAsciiAlnum(static_cast<unsigned char>(text[period_pos - 1]))) {
    return false;
  }
  return text.substr(word_start, period_pos - word_start).find('.') != std::string_view::npos;
}

void TokenizeChunk(std::string_view text, std::size_t begin, std::size_t end,
                   std::vector<Token>& out) {
  while (begin < end) {
    const std::size_t len = PunctuationLength(text, begin);
    if (len == 0) break;
    out.push_back({std::string(text.substr(begin, len)), false});
    begin += len;
  }
  std::vector<Token> trailing;
  while (end > begin) {
    const std::size_t cp = PrevCodePoint(text, end);
    if (PunctuationLength(text, cp) == 0) break;
    if (text[cp] == '.' && KeepTrailingPeriod(text, begin, cp)) break;
    trailing.push_back({std::string(text.substr(cp, end - cp)), false});
    end = cp;
  }
  if (begin < end) {
    out.push_back({std::string(text.substr(begin, end - begin)), true});
  }
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

}  // namespace

std::size_t WhitespaceLength(std::string_view text, std::size_t pos) {
  const auto at = [&](std::size_t k) -> unsigned char {
    return pos + k < text.size() ? static_cast<unsigned char>(text[pos + k]) : 0;
  };
  const unsigned char c = at(0);
  if (c == ' ' || (c >= '\t' && c <= '\r')) return 1;
  if (c == 0xC2 && (at(1) == 0x85 || at(1) == 0xA0)) return 2;
  if (c == 0xE1 && at(1) == 0x9A && at(2) == 0x80) return 3;
  if (c == 0xE2 && at(1) == 0x80 &&
      ((at(2) >= 0x80 && at(2) <= 0x8A) || at(2) == 0xA8 || at(2) == 0xA9 || at(2) == 0xAF)) {
    return 3;
  }
  if (c == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;
  if (c == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;
  return 0;
}

std::size_t PunctuationLength(std::string_view text, std::size_t pos) {
  const auto at = [&](std::size_t k) -> unsigned char {
    return pos + k < text.size() ? static_cast<unsigned char>(text[pos + k]) : 0;
  };
  const unsigned char c = at(0);
  if (c < 0x80) return std::ispunct(c) != 0 ? 1 : 0;
  // Latin-1 punctuation: inverted marks, guillemets, section sign, etc.
  if (c == 0xC2) {
    const unsigned char d = at(1);
    if (d == 0xA1 || d == 0xA7 || d == 0xAB || d == 0xB6 || d == 0xB7 || d == 0xBB || d == 0xBF) {
      return 2;
    }
  }
  // General punctuation block U+2010..U+2027, U+2030..U+205E.
  if (c == 0xE2 && at(1) == 0x80 && at(2) >= 0x90 && at(2) <= 0xA7) return 3;
  if (c == 0xE2 && at(1) == 0x80 && at(2) >= 0xB0 && at(2) <= 0xBF) return 3;
  if (c == 0xE2 && at(1) == 0x81 && at(2) >= 0x80 && at(2) <= 0x9E) return 3;
  return 0;
}

bool IsPunctuationOnly(std::string_view token) {
  if (token.empty()) return false;
  std::size_t i = 0;
  while (i < token.size()) {
    const std::size_t len = PunctuationLength(token, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (const std::size_t ws = WhitespaceLength(text, i); ws > 0) {
      i += ws;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && WhitespaceLength(text, j) == 0) ++j;
    TokenizeChunk(text, i, j, tokens);
    i = j;
  }
  return tokens;
}

std::size_t CountWordTokens(std::string_view text) {
  std::size_t n = 0;
  for (const Token& t : Tokenize(text)) n += t.is_word ? 1 : 0;
  return n;
}

std::string JoinTokens(const std::vector<Token>& tokens) {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.surface;
  }
  return out;
}

}  // namespace ragulator::text
