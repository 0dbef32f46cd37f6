#include "ragulator/datagen/records.h"

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "ragulator/common/io.h"
#include "ragulator/common/strings.h"

namespace ragulator::datagen {
namespace {

using json = nlohmann::json;

// line == 0 means "no line context".
absl::Status SchemaError(std::size_t line, std::string_view what) {
  if (line == 0) return absl::InvalidArgumentError(std::string(what));
  return absl::InvalidArgumentError(absl::StrCat("line ", line, ": ", ToAbsl(what)));
}

absl::StatusOr<std::string> RequiredString(const json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    return SchemaError(line, absl::StrCat("missing or non-string field '", key, "'"));
  }
  return it->get<std::string>();
}

absl::StatusOr<std::size_t> RequiredCount(const json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned()) {
    return SchemaError(line, absl::StrCat("missing or non-integer field '", key, "'"));
  }
  return it->get<std::size_t>();
}

}  // namespace

std::string_view ToString(RecordKind kind) {
  return kind == RecordKind::kSummaryPair ? "summary_pair" : "sts_pair";
}

std::string_view ToString(Split split) { return split == Split::kTrain ? "train" : "test"; }

absl::StatusOr<RecordKind> ParseRecordKind(std::string_view s) {
  if (s == "summary_pair" || s == "summary") return RecordKind::kSummaryPair;
  if (s == "sts_pair" || s == "sts") return RecordKind::kStsPair;
  return absl::InvalidArgumentError(absl::StrCat("unknown record kind '", ToAbsl(s), "'"));
}

absl::StatusOr<Split> ParseSplit(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  return absl::InvalidArgumentError(absl::StrCat("unknown split '", ToAbsl(s), "'"));
}

absl::StatusOr<CorpusRecord> ParseCorpusRecord(std::string_view json_line, std::size_t line_index) {
  const json j = json::parse(json_line.begin(), json_line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return SchemaError(line_index, "not a JSON object");

  CorpusRecord rec;
  auto kind_str = RequiredString(j, "kind", line_index);
  if (!kind_str.ok()) return kind_str.status();
  auto kind = ParseRecordKind(*kind_str);
  if (!kind.ok()) return SchemaError(line_index, std::string(kind.status().message()));
  rec.kind = *kind;

  auto text_a = RequiredString(j, "text_a", line_index);
  if (!text_a.ok()) return text_a.status();
  auto text_b = RequiredString(j, "text_b", line_index);
  if (!text_b.ok()) return text_b.status();
  auto split_str = RequiredString(j, "split", line_index);
  if (!split_str.ok()) return split_str.status();
  auto split = ParseSplit(*split_str);
  if (!split.ok()) return SchemaError(line_index, std::string(split.status().message()));
  auto source = RequiredString(j, "source", line_index);
  if (!source.ok()) return source.status();
  rec.text_a = std::move(*text_a);
  rec.text_b = std::move(*text_b);
  rec.split = *split;
  rec.source = std::move(*source);

  if (const auto it = j.find("raw_label"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) return SchemaError(line_index, "'raw_label' must be a string");
    rec.raw_label = it->get<std::string>();
  }
  if (const auto it = j.find("unanimous"); it != j.end()) {
    if (!it->is_boolean()) return SchemaError(line_index, "'unanimous' must be a boolean");
    rec.unanimous = it->get<bool>();
  }
  if (const auto it = j.find("record_id"); it != j.end()) {
    if (!it->is_string()) return SchemaError(line_index, "'record_id' must be a string");
    rec.record_id = it->get<std::string>();
  } else {
    rec.record_id = absl::StrCat(rec.source, "/", ToAbsl(ToString(rec.split)), "/", line_index);
  }

  if (rec.kind == RecordKind::kSummaryPair && rec.raw_label.has_value()) {
    return SchemaError(line_index, "summary_pair records carry no raw_label");
  }
  if (rec.kind == RecordKind::kStsPair && !rec.raw_label.has_value()) {
    return SchemaError(line_index, "sts_pair records require raw_label");
  }
  return rec;
}

absl::StatusOr<std::vector<CorpusRecord>> ReadCorpusJsonl(const std::string& path) {
  auto lines = ReadJsonLines(path);
  if (!lines.ok()) return lines.status();
  std::vector<CorpusRecord> records;
  records.reserve(lines->size());
  for (const NumberedLine& line : *lines) {
    auto rec = ParseCorpusRecord(line.text, line.number);
    if (!rec.ok()) return rec.status();
    records.push_back(std::move(*rec));
  }
  return records;
}

std::string PairToJson(const SentenceContextPair& pair) {
  json j;
  j["pair_id"] = pair.pair_id;
  j["record_id"] = pair.record_id;
  j["origin"] = ToString(pair.origin);
  j["sentence"] = pair.sentence;
  j["context"] = pair.context;
  j["label"] = static_cast<int>(pair.label);
  j["source"] = pair.source;
  j["split"] = ToString(pair.split);
  j["sentence_token_len"] = pair.sentence_token_len;
  j["context_token_len"] = pair.context_token_len;
  return j.dump();
}

absl::StatusOr<SentenceContextPair> ParsePair(std::string_view json_line) {
  const json j = json::parse(json_line.begin(), json_line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return SchemaError(0, "not a JSON object");
  SentenceContextPair p;
  for (auto [key, dest] : {std::pair{"pair_id", &p.pair_id}, std::pair{"record_id", &p.record_id},
                           std::pair{"sentence", &p.sentence}, std::pair{"context", &p.context},
                           std::pair{"source", &p.source}}) {
    auto v = RequiredString(j, key, 0);
    if (!v.ok()) return v.status();
    *dest = std::move(*v);
  }
  auto origin = RequiredString(j, "origin", 0);
  if (!origin.ok()) return origin.status();
  auto kind = ParseRecordKind(*origin);
  if (!kind.ok()) return kind.status();
  p.origin = *kind;
  auto split_str = RequiredString(j, "split", 0);
  if (!split_str.ok()) return split_str.status();
  auto split = ParseSplit(*split_str);
  if (!split.ok()) return split.status();
  p.split = *split;
  const auto label = j.find("label");
  if (label == j.end() || !label->is_number_integer() ||
      (label->get<int>() != 0 && label->get<int>() != 1)) {
    return SchemaError(0, "'label' must be 0 or 1");
  }
  p.label = static_cast<Label>(label->get<int>());
  auto slen = RequiredCount(j, "sentence_token_len", 0);
  if (!slen.ok()) return slen.status();
  auto clen = RequiredCount(j, "context_token_len", 0);
  if (!clen.ok()) return clen.status();
  p.sentence_token_len = *slen;
  p.context_token_len = *clen;
  return p;
}

absl::StatusOr<std::vector<SentenceContextPair>> ReadPairsJsonl(const std::string& path) {
  auto lines = ReadJsonLines(path);
  if (!lines.ok()) return lines.status();
  std::vector<SentenceContextPair> pairs;
  pairs.reserve(lines->size());
  for (const NumberedLine& line : *lines) {
    auto pair = ParsePair(line.text);
    if (!pair.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line.number, ": ", pair.status().message()));
    }
    pairs.push_back(std::move(*pair));
  }
  return pairs;
}

absl::Status WritePairsJsonl(const std::string& path,
                             const std::vector<SentenceContextPair>& pairs) {
  std::string out;
  for (const SentenceContextPair& p : pairs) {
    out += PairToJson(p);
    out += '\n';
  }
  return WriteFile(path, out);
}

}  // namespace ragulator::datagen
