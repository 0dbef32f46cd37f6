#ifndef RAGULATOR_TEXT_PREPROCESS_H_
#define RAGULATOR_TEXT_PREPROCESS_H_

#include <string>
#include <string_view>

#include "ragulator/text/token.h"

namespace ragulator::text {

// Classical-feature normalisation: lowercase -> tokenize -> drop
// punctuation-only tokens -> drop stopwords -> Porter stem. Stems that land
// on a stopword ("cans" -> "can") are dropped as well so the output never
// contains a stopword.
PreprocessedText Preprocess(std::string_view text);

// ASCII and Latin-1 supplement lowercasing; other bytes pass through.
std::string ToLower(std::string_view text);

// Membership in the embedded stopword list (exact, lowercase).
bool IsStopword(std::string_view word);

}  // namespace ragulator::text

#endif  // RAGULATOR_TEXT_PREPROCESS_H_
