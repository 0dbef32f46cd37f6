#ifndef RAGULATOR_FEATURES_FEATURIZE_H_
#define RAGULATOR_FEATURES_FEATURIZE_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ragulator/datagen/records.h"
#include "ragulator/features/feature_vector.h"
#include "ragulator/features/providers.h"

namespace ragulator::features {

// Max cosine similarity between the sentence and any context sentence.
// Context sentences are embedded in batches; a provider failure is returned
// with the provider name and the index range of the failing batch.
absl::StatusOr<double> MaxEmbeddingSimilarity(std::string_view sentence,
                                              const std::vector<std::string>& context_sentences,
                                              const EmbeddingProvider& provider);

absl::StatusOr<double> MaxRerankerRelevance(std::string_view sentence,
                                            const std::vector<std::string>& context_sentences,
                                            const RerankerProvider& provider);

// Classical features on preprocessed text, semantic features on the raw
// sentence against the sentence-split context.
absl::StatusOr<FeatureVector> Featurize(std::string_view sentence, std::string_view context,
                                        const EmbeddingProvider& embed,
                                        const RerankerProvider& rerank);

absl::StatusOr<FeatureVector> Featurize(const datagen::SentenceContextPair& pair,
                                        const EmbeddingProvider& embed,
                                        const RerankerProvider& rerank);

// Featurizes pairs in parallel; the first failure (by pair order) is
// returned with the pair id.
absl::StatusOr<std::vector<FeatureRow>> FeaturizeAll(
    std::span<const datagen::SentenceContextPair> pairs, const EmbeddingProvider& embed,
    const RerankerProvider& rerank, unsigned max_threads = 0);

}  // namespace ragulator::features

#endif  // RAGULATOR_FEATURES_FEATURIZE_H_
