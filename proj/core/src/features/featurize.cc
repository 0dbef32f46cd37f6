#include "ragulator/features/featurize.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "absl/strings/str_cat.h"
#include "ragulator/common/parallel.h"
#include "ragulator/common/status.h"
#include "ragulator/common/strings.h"
#include "ragulator/features/classical.h"
#include "ragulator/text/preprocess.h"
#include "ragulator/text/sentences.h"

namespace ragulator::features {
namespace {

constexpr std::size_t kEmbedBatch = 64;

absl::Status WithContext(const absl::Status& status, std::string_view provider,
                         std::string_view what) {
  return AttachProvider(PrefixStatus(status, absl::StrCat(ToAbsl(provider), " provider failed on ",
                                                          ToAbsl(what), ": ")),
                        provider);
}

double Dot(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

}  // namespace

absl::StatusOr<double> MaxEmbeddingSimilarity(std::string_view sentence,
                                              const std::vector<std::string>& context_sentences,
                                              const EmbeddingProvider& provider) {
  if (context_sentences.empty()) return absl::InvalidArgumentError("no context sentences");
  auto query = provider.Embed({std::string(sentence)});
  if (!query.ok()) return WithContext(query.status(), provider.Name(), "candidate sentence");
  if (query->size() != 1)
    return AttachProvider(absl::InternalError("embed provider returned wrong count"),
                          provider.Name());
  const std::vector<float>& q = query->front();

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t begin = 0; begin < context_sentences.size(); begin += kEmbedBatch) {
    const std::size_t end = std::min(begin + kEmbedBatch, context_sentences.size());
    const std::vector<std::string> batch(context_sentences.begin() + begin,
                                         context_sentences.begin() + end);
    auto vectors = provider.Embed(batch);
    const std::string where = absl::StrCat("context sentences [", begin, ", ", end, ")");
    if (!vectors.ok()) return WithContext(vectors.status(), provider.Name(), where);
    if (vectors->size() != batch.size()) {
      return AttachProvider(
          absl::InternalError(absl::StrCat("embed provider returned wrong count for ", where)),
          provider.Name());
    }
    for (const std::vector<float>& v : *vectors) {
      if (v.size() != q.size()) {
        return AttachProvider(
            absl::InternalError(absl::StrCat("embedding dimension mismatch for ", where)),
            provider.Name());
      }
      best = std::max(best, Dot(q, v));
    }
  }
  return best;
}

absl::StatusOr<double> MaxRerankerRelevance(std::string_view sentence,
                                            const std::vector<std::string>& context_sentences,
                                            const RerankerProvider& provider) {
  if (context_sentences.empty()) return absl::InvalidArgumentError("no context sentences");
  auto scores = provider.Score(sentence, context_sentences);
  if (!scores.ok()) {
    return WithContext(scores.status(), provider.Name(),
                       absl::StrCat("context sentences [0, ", context_sentences.size(), ")"));
  }
  if (scores->size() != context_sentences.size()) {
    return AttachProvider(absl::InternalError("rerank provider returned wrong count"),
                          provider.Name());
  }
  return *std::max_element(scores->begin(), scores->end());
}

absl::StatusOr<FeatureVector> Featurize(std::string_view sentence, std::string_view context,
                                        const EmbeddingProvider& embed,
                                        const RerankerProvider& rerank) {
  const text::PreprocessedText cand = text::Preprocess(sentence);
  const text::PreprocessedText ctx = text::Preprocess(context);
  FeatureVector fv;
  fv.precision = PrecisionScore(cand, ctx);
  auto uni = NgramPerplexity(cand, ctx, 1);
  if (!uni.ok()) return uni.status();
  auto bi = NgramPerplexity(cand, ctx, 2);
  if (!bi.ok()) return bi.status();
  fv.unigram_ppl = *uni;
  fv.bigram_ppl = *bi;

  const std::vector<std::string> context_sentences = text::SplitSentenceTexts(context);
  auto sim = MaxEmbeddingSimilarity(sentence, context_sentences, embed);
  if (!sim.ok()) return sim.status();
  auto rel = MaxRerankerRelevance(sentence, context_sentences, rerank);
  if (!rel.ok()) return rel.status();
  fv.max_embed_sim = *sim;
  fv.max_rerank = *rel;
  if (!fv.AllFinite()) return absl::InternalError("provider produced a non-finite feature");
  return fv;
}

absl::StatusOr<FeatureVector> Featurize(const datagen::SentenceContextPair& pair,
                                        const EmbeddingProvider& embed,
                                        const RerankerProvider& rerank) {
  return Featurize(pair.sentence, pair.context, embed, rerank);
}

absl::StatusOr<std::vector<FeatureRow>> FeaturizeAll(
    std::span<const datagen::SentenceContextPair> pairs, const EmbeddingProvider& embed,
    const RerankerProvider& rerank, unsigned max_threads) {
  std::vector<std::optional<absl::StatusOr<FeatureVector>>> results(pairs.size());
  ParallelFor(
      pairs.size(), [&](std::size_t i) { results[i] = Featurize(pairs[i], embed, rerank); },
      max_threads);
  std::vector<FeatureRow> rows;
  rows.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const absl::StatusOr<FeatureVector>& r = *results[i];
    if (!r.ok()) {
      return PrefixStatus(r.status(), absl::StrCat("pair ", pairs[i].pair_id, ": "));
    }
    rows.push_back({pairs[i].pair_id, *r, pairs[i].label});
  }
  return rows;
}

}  // namespace ragulator::features
