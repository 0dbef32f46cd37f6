#ifndef RAGULATOR_TEXT_NGRAMS_H_
#define RAGULATOR_TEXT_NGRAMS_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace ragulator::text {

using NGram = std::vector<std::string>;

// All contiguous n-token windows, in order. Returns max(0, |tokens|-n+1)
// n-grams; n < 1 is an InvalidArgument error.
absl::StatusOr<std::vector<NGram>> NGrams(std::span<const std::string> tokens, int n);

// Single-string key for an n-gram (tokens joined with U+001F), suitable for
// hashing.
std::string NGramKey(const NGram& gram);

}  // namespace ragulator::text

#endif  // RAGULATOR_TEXT_NGRAMS_H_
