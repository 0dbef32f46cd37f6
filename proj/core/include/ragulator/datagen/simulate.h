#ifndef RAGULATOR_DATAGEN_SIMULATE_H_
#define RAGULATOR_DATAGEN_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ragulator/datagen/records.h"

namespace ragulator::datagen {

// Inclusive word-token bounds for simulated sentences and contexts.
struct LengthBounds {
  std::size_t sentence_min = 5;
  std::size_t sentence_max = 100;
  std::size_t context_min = 100;
  std::size_t context_max = 5000;
};

struct RecordError {
  std::string record_id;
  std::string message;
};

struct SimulationStats {
  std::size_t records_in = 0;
  std::size_t pairs_out = 0;
  std::size_t dropped_bounds = 0;
  std::size_t dropped_neutral = 0;
  std::size_t dropped_disagreement = 0;
  std::size_t skipped_pool_too_small = 0;
  std::vector<RecordError> rejected;
};

struct SimulationResult {
  std::vector<SentenceContextPair> pairs;
  SimulationStats stats;
};

// Summarisation corpora. Within each split, round(ooc_fraction * n) records
// are chosen uniformly and their abstract is re-paired with a uniformly
// random *other* article of the same split (label 1); the rest keep their
// own article (label 0). Each abstract sentence becomes one pair; pairs
// outside `bounds` are dropped. FailedPrecondition if a split has fewer
// than two records while ooc_fraction > 0.
absl::StatusOr<SimulationResult> SimulateFromSummaries(std::span<const CorpusRecord> records,
                                                       uint64_t rng_seed, double ooc_fraction,
                                                       const LengthBounds& bounds = {});

// STS corpora. Labels map as MRPC equivalent -> 0, not_equivalent -> 1;
// SNLI entailment -> 0, contradiction -> 1; neutral and non-unanimous rows
// are dropped; anything else is rejected per record. text_b becomes the
// candidate sentence; text_a is placed at a uniformly random position among
// distinct filler sentences drawn from `pool` until the context reaches
// bounds.context_min tokens. Records whose pool runs dry are skipped.
absl::StatusOr<SimulationResult> SimulateFromSts(std::span<const CorpusRecord> records,
                                                 std::span<const std::string> pool,
                                                 uint64_t rng_seed,
                                                 const LengthBounds& bounds = {});

enum class StsMapping { kInContext, kOutOfContext, kDropNeutral, kDropDisagreement, kReject };
StsMapping MapStsLabel(std::string_view raw_label, bool unanimous);

// The pair iff both token lengths lie within `bounds`.
std::optional<SentenceContextPair> EnforceBounds(SentenceContextPair pair,
                                                 const LengthBounds& bounds = {});

// Sentences of text_a and text_b of every record, in record order.
std::vector<std::string> BuildFillerPool(std::span<const CorpusRecord> records);

// Downsamples, per split, whichever class is over-represented so each
// split's OOC ratio is as close to `target_ratio` as whole examples allow.
// Deterministic given rng_seed; preserves input order of kept pairs.
std::vector<SentenceContextPair> RebalanceSplits(std::vector<SentenceContextPair> pairs,
                                                 double target_ratio, uint64_t rng_seed);

// Drops test-split pairs whose source is not listed. Train pairs untouched.
std::vector<SentenceContextPair> FilterTestSources(std::vector<SentenceContextPair> pairs,
                                                   std::span<const std::string> sources);

}  // namespace ragulator::datagen

#endif  // RAGULATOR_DATAGEN_SIMULATE_H_
