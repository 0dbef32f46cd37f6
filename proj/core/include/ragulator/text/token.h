#ifndef RAGULATOR_TEXT_TOKEN_H_
#define RAGULATOR_TEXT_TOKEN_H_

#include <cstddef>
#include <string>
#include <vector>

namespace ragulator::text {

struct Token {
  std::string surface;   // non-empty, no whitespace
  bool is_word = false;  // false for punctuation/symbol-only tokens

  friend bool operator==(const Token&, const Token&) = default;
};

// Byte offsets into the source text, [start, end).
struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  friend bool operator==(const SentenceSpan&, const SentenceSpan&) = default;
};

struct PreprocessedText {
  // Lowercased, stemmed word tokens with stopwords and punctuation removed.
  std::vector<std::string> tokens;
  // Number of raw word tokens before any dropping.
  std::size_t source_len = 0;
};

}  // namespace ragulator::text

#endif  // RAGULATOR_TEXT_TOKEN_H_
