#ifndef RAGULATOR_TEXT_SENTENCES_H_
#define RAGULATOR_TEXT_SENTENCES_H_

#include <string>
#include <string_view>
#include <vector>

#include "ragulator/text/token.h"

namespace ragulator::text {

// Rule-based sentence splitter.
//
// A boundary is placed after a run of '.', '!' or '?' (plus any closing
// quotes/brackets) when it is followed by whitespace and then an uppercase
// letter, a digit, or an opening quote/bracket, or when it ends the text.
// A single '.' that ends a known abbreviation ("Dr.", "e.g.") is never a
// boundary. Spans exclude surrounding whitespace; every non-whitespace byte
// of `text` belongs to exactly one span.
std::vector<SentenceSpan> SplitSentences(std::string_view text);

// Convenience: just the span texts.
std::vector<std::string> SplitSentenceTexts(std::string_view text);

// True if `word` (any case, trailing period included) is in the embedded
// abbreviation list.
bool IsAbbreviation(std::string_view word);

}  // namespace ragulator::text

#endif  // RAGULATOR_TEXT_SENTENCES_H_
