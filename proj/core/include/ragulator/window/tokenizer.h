#ifndef RAGULATOR_WINDOW_TOKENIZER_H_
#define RAGULATOR_WINDOW_TOKENIZER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ragulator::window {

// Byte range [start, end) of one token.
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// Token counting scheme behind the window budget. Implementations must be
// safe for concurrent use. Count("") must be 0, and counts of a
// concatenation may differ from the sum of the parts by at most one per join.
class TokenBudgetTokenizer {
 public:
  virtual ~TokenBudgetTokenizer() = default;
  // Non-overlapping, ordered token spans.
  virtual std::vector<TokenSpan> Spans(std::string_view text) const = 0;
  virtual std::size_t Count(std::string_view text) const { return Spans(text).size(); }
  virtual std::string Name() const = 0;
};

// One token per maximal run of non-whitespace code points. Exactly additive
// across joins that contain whitespace.
class WhitespaceTokenizer : public TokenBudgetTokenizer {
 public:
  std::vector<TokenSpan> Spans(std::string_view text) const override;
  std::string Name() const override { return "whitespace"; }
};

}  // namespace ragulator::window

#endif  // RAGULATOR_WINDOW_TOKENIZER_H_
