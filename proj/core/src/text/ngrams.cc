#include "ragulator/text/ngrams.h"

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace ragulator::text {

absl::StatusOr<std::vector<NGram>> NGrams(std::span<const std::string> tokens, int n) {
  if (n < 1) {
    return absl::InvalidArgumentError(absl::StrCat("n-gram order must be >= 1, got ", n));
  }
  std::vector<NGram> out;
  const auto order = static_cast<std::size_t>(n);
  if (tokens.size() < order) return out;
  out.reserve(tokens.size() - order + 1);
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    out.emplace_back(tokens.begin() + i, tokens.begin() + i + order);
  }
  return out;
}

std::string NGramKey(const NGram& gram) { return absl::StrJoin(gram, "\x1f"); }

}  // namespace ragulator::text
