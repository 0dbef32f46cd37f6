#ifndef RAGULATOR_TESTS_TESTING_FIXTURE_H_
#define RAGULATOR_TESTS_TESTING_FIXTURE_H_

// Separable synthetic summarisation corpus. Every record draws its words
// from a private vocabulary, and its abstract sentences appear verbatim in
// its article, so shuffled (OOC) pairs share no content words with their
// context while in-context pairs are fully contained in theirs.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragulator/datagen/records.h"
#include "testing/generators.h"

namespace ragulator::testing_util {

// "q<code>q" with a q-free code, so prefixed words never collide across
// records.
inline std::string RecordPrefix(std::size_t index) {
  static constexpr std::string_view kLetters = "bcfghjswxy";
  std::string code;
  do {
    code += kLetters[index % kLetters.size()];
    index /= kLetters.size();
  } while (index > 0);
  return "q" + code + "q";
}

struct SeparableCorpusOptions {
  std::size_t train_records = 40;
  std::size_t test_records = 20;
  std::size_t abstract_sentences = 3;
  std::size_t article_filler_sentences = 14;
  uint64_t seed = 7;
};

inline std::vector<datagen::CorpusRecord> MakeSeparableCorpus(
    const SeparableCorpusOptions& options = {}) {
  std::mt19937_64 rng(options.seed);
  std::vector<datagen::CorpusRecord> records;
  const std::size_t n = options.train_records + options.test_records;
  for (std::size_t r = 0; r < n; ++r) {
    const std::vector<std::string> vocab = MakeVocabulary(RecordPrefix(r), 60);
    std::vector<std::string> abstract;
    for (std::size_t i = 0; i < options.abstract_sentences; ++i) {
      abstract.push_back(MakeSentence(rng, vocab, 8 + Pick(rng, 5)));
    }
    std::vector<std::string> article;
    for (std::size_t i = 0; i < options.article_filler_sentences; ++i) {
      article.push_back(MakeSentence(rng, vocab, 10 + Pick(rng, 5)));
    }
    for (const std::string& s : abstract) {
      article.insert(article.begin() + static_cast<std::ptrdiff_t>(Pick(rng, article.size() + 1)),
                     s);
    }
    datagen::CorpusRecord rec;
    rec.record_id = "synthetic/" + std::to_string(r);
    rec.kind = datagen::RecordKind::kSummaryPair;
    for (const std::string& s : abstract) rec.text_a += (rec.text_a.empty() ? "" : " ") + s;
    for (const std::string& s : article) rec.text_b += (rec.text_b.empty() ? "" : " ") + s;
    rec.split = r < options.train_records ? datagen::Split::kTrain : datagen::Split::kTest;
    rec.source = "synthetic";
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::string CorpusToJsonl(const std::vector<datagen::CorpusRecord>& records) {
  std::string out;
  for (const datagen::CorpusRecord& r : records) {
    nlohmann::ordered_json j;
    j["record_id"] = r.record_id;
    j["kind"] = std::string(datagen::ToString(r.kind));
    j["text_a"] = r.text_a;
    j["text_b"] = r.text_b;
    if (r.raw_label) j["raw_label"] = *r.raw_label;
    j["split"] = std::string(datagen::ToString(r.split));
    j["source"] = r.source;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace ragulator::testing_util

#endif  // RAGULATOR_TESTS_TESTING_FIXTURE_H_
