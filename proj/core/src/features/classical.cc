#include "ragulator/features/classical.h"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "ragulator/text/ngrams.h"

namespace ragulator::features {

double PrecisionScore(const text::PreprocessedText& candidate,
                      const text::PreprocessedText& context) {
  const std::unordered_set<std::string> cand(candidate.tokens.begin(), candidate.tokens.end());
  if (cand.empty()) return 0.0;
  const std::unordered_set<std::string> ctx(context.tokens.begin(), context.tokens.end());
  std::size_t shared = 0;
  for (const std::string& t : cand) shared += ctx.contains(t) ? 1 : 0;
  return static_cast<double>(shared) / static_cast<double>(cand.size());
}

absl::StatusOr<double> NgramPerplexity(const text::PreprocessedText& candidate,
                                       const text::PreprocessedText& context, int n) {
  if (n != 1 && n != 2)
    return absl::InvalidArgumentError(absl::StrCat("n must be 1 or 2, got ", n));
  auto cand_grams = text::NGrams(candidate.tokens, n);
  if (!cand_grams.ok()) return cand_grams.status();
  if (cand_grams->empty()) return 0.0;
  auto ctx_grams = text::NGrams(context.tokens, n);
  if (!ctx_grams.ok()) return ctx_grams.status();

  std::unordered_map<std::string, std::size_t> counts;
  for (const text::NGram& g : *ctx_grams) ++counts[text::NGramKey(g)];
  const double denom = static_cast<double>(ctx_grams->size() + counts.size() + 1);

  double nll = 0.0;
  for (const text::NGram& g : *cand_grams) {
    const auto it = counts.find(text::NGramKey(g));
    const double c = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    nll -= std::log((c + 1.0) / denom);
  }
  return nll / static_cast<double>(cand_grams->size());
}

}  // namespace ragulator::features
