#ifndef RAGULATOR_DATAGEN_RECORDS_H_
#define RAGULATOR_DATAGEN_RECORDS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace ragulator::datagen {

enum class RecordKind { kSummaryPair, kStsPair };
enum class Split { kTrain, kTest };

// Pair label: 1 = out-of-context (OOC), 0 = in-context.
enum class Label : int { kInContext = 0, kOutOfContext = 1 };

std::string_view ToString(RecordKind kind);
std::string_view ToString(Split split);
absl::StatusOr<RecordKind> ParseRecordKind(std::string_view s);
absl::StatusOr<Split> ParseSplit(std::string_view s);

// One source row. Summary pairs: text_a = abstract, text_b = article.
// STS pairs: text_a / text_b = the two sentences, raw_label set.
struct CorpusRecord {
  std::string record_id;
  RecordKind kind = RecordKind::kSummaryPair;
  std::string text_a;
  std::string text_b;
  std::optional<std::string> raw_label;
  bool unanimous = true;  // STS annotator agreement
  Split split = Split::kTrain;
  std::string source;
};

struct SentenceContextPair {
  std::string pair_id;
  std::string record_id;
  RecordKind origin = RecordKind::kSummaryPair;
  std::string sentence;
  std::string context;
  Label label = Label::kInContext;
  std::string source;
  Split split = Split::kTrain;
  std::size_t sentence_token_len = 0;
  std::size_t context_token_len = 0;

  friend bool operator==(const SentenceContextPair&, const SentenceContextPair&) = default;
};

// JSONL codecs. Record ids default to "<source>/<split>/<line>" when absent.
// Schema violations are InvalidArgument errors naming the offending line.
absl::StatusOr<CorpusRecord> ParseCorpusRecord(std::string_view json_line, std::size_t line_index);
absl::StatusOr<std::vector<CorpusRecord>> ReadCorpusJsonl(const std::string& path);

std::string PairToJson(const SentenceContextPair& pair);
absl::StatusOr<SentenceContextPair> ParsePair(std::string_view json_line);
absl::StatusOr<std::vector<SentenceContextPair>> ReadPairsJsonl(const std::string& path);
absl::Status WritePairsJsonl(const std::string& path,
                             const std::vector<SentenceContextPair>& pairs);

}  // namespace ragulator::datagen

#endif  // RAGULATOR_DATAGEN_RECORDS_H_
