#ifndef RAGULATOR_TEXT_TOKENIZE_H_
#define RAGULATOR_TEXT_TOKENIZE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ragulator/text/token.h"

namespace ragulator::text {

// Splits on Unicode whitespace, then peels leading and trailing punctuation
// off each chunk, one code point per token. A trailing period stays attached
// when the word already contains a period and the period follows an
// alphanumeric character ("U.S.", "e.g."). Re-tokenizing the space-joined
// output yields the same tokens.
std::vector<Token> Tokenize(std::string_view text);

// Number of word tokens (punctuation excluded). This is the token count used
// for the dataset length bounds.
std::size_t CountWordTokens(std::string_view text);

// Space-joins token surfaces.
std::string JoinTokens(const std::vector<Token>& tokens);

// UTF-8 helpers shared with the sentence splitter. Each returns the byte
// length of the matching code point at `pos`, or 0 when it does not match.
std::size_t WhitespaceLength(std::string_view text, std::size_t pos);
std::size_t PunctuationLength(std::string_view text, std::size_t pos);

// True when every code point of `token` is punctuation.
bool IsPunctuationOnly(std::string_view token);

}  // namespace ragulator::text

#endif  // RAGULATOR_TEXT_TOKENIZE_H_
