#ifndef RAGULATOR_FEATURES_FEATURE_VECTOR_H_
#define RAGULATOR_FEATURES_FEATURE_VECTOR_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ragulator/datagen/records.h"

namespace ragulator::features {

inline constexpr std::size_t kNumFeatures = 5;
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "precision", "unigram_ppl", "bigram_ppl", "max_embed_sim", "max_rerank"};

// Field order is the model input order.
struct FeatureVector {
  double precision = 0.0;
  double unigram_ppl = 0.0;
  double bigram_ppl = 0.0;
  double max_embed_sim = 0.0;
  double max_rerank = 0.0;

  std::array<double, kNumFeatures> ToArray() const {
    return {precision, unigram_ppl, bigram_ppl, max_embed_sim, max_rerank};
  }
  static FeatureVector FromArray(const std::array<double, kNumFeatures>& a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }
  bool AllFinite() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// One row of a feature JSONL file.
struct FeatureRow {
  std::string pair_id;
  FeatureVector features;
  std::optional<datagen::Label> label;

  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

std::string FeatureRowToJson(const FeatureRow& row);
absl::StatusOr<FeatureRow> ParseFeatureRow(std::string_view json_line);
absl::StatusOr<std::vector<FeatureRow>> ReadFeaturesJsonl(const std::string& path);
absl::Status WriteFeaturesJsonl(const std::string& path, const std::vector<FeatureRow>& rows);

}  // namespace ragulator::features

#endif  // RAGULATOR_FEATURES_FEATURE_VECTOR_H_
