#include "ragulator/features/feature_vector.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "ragulator/common/io.h"

namespace ragulator::features {

bool FeatureVector::AllFinite() const {
  for (double v : ToArray()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string FeatureRowToJson(const FeatureRow& row) {
  nlohmann::ordered_json j;
  j["pair_id"] = row.pair_id;
  const auto values = row.features.ToArray();
  for (std::size_t i = 0; i < kNumFeatures; ++i) j[std::string(kFeatureNames[i])] = values[i];
  if (row.label) j["label"] = static_cast<int>(*row.label);
  return j.dump();
}

absl::StatusOr<FeatureRow> ParseFeatureRow(std::string_view json_line) {
  const auto j = nlohmann::json::parse(json_line.begin(), json_line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return absl::InvalidArgumentError("not a JSON object");
  FeatureRow row;
  const auto id = j.find("pair_id");
  if (id == j.end() || !id->is_string()) {
    return absl::InvalidArgumentError("missing or non-string field 'pair_id'");
  }
  row.pair_id = id->get<std::string>();
  std::array<double, kNumFeatures> values{};
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    const auto it = j.find(kFeatureNames[i]);
    if (it == j.end() || !it->is_number()) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing or non-numeric field '", std::string(kFeatureNames[i]), "'"));
    }
    values[i] = it->get<double>();
  }
  row.features = FeatureVector::FromArray(values);
  if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || (it->get<int>() != 0 && it->get<int>() != 1)) {
      return absl::InvalidArgumentError("'label' must be 0 or 1");
    }
    row.label = static_cast<datagen::Label>(it->get<int>());
  }
  return row;
}

absl::StatusOr<std::vector<FeatureRow>> ReadFeaturesJsonl(const std::string& path) {
  auto lines = ReadJsonLines(path);
  if (!lines.ok()) return lines.status();
  std::vector<FeatureRow> rows;
  rows.reserve(lines->size());
  for (const NumberedLine& line : *lines) {
    auto row = ParseFeatureRow(line.text);
    if (!row.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line.number, ": ", row.status().message()));
    }
    rows.push_back(std::move(*row));
  }
  return rows;
}

absl::Status WriteFeaturesJsonl(const std::string& path, const std::vector<FeatureRow>& rows) {
  std::string out;
  for (const FeatureRow& row : rows) {
    out += FeatureRowToJson(row);
    out += '\n';
  }
  return WriteFile(path, out);
}

}  // namespace ragulator::features
