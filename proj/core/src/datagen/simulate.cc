#include "ragulator/datagen/simulate.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "ragulator/common/parallel.h"
#include "ragulator/common/random.h"
#include "ragulator/common/strings.h"
#include "ragulator/text/sentences.h"
#include "ragulator/text/tokenize.h"

namespace ragulator::datagen {
namespace {

// Streams for seed derivation, kept apart from per-record indices.
constexpr uint64_t kSplitSelectionStream = 1ULL << 40;
constexpr uint64_t kRebalanceStream = 1ULL << 41;

bool InBounds(std::size_t sentence_len, std::size_t context_len, const LengthBounds& b) {
  return sentence_len >= b.sentence_min && sentence_len <= b.sentence_max &&
         context_len >= b.context_min && context_len <= b.context_max;
}

std::string ToLowerAscii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

// Sparse Fisher-Yates: draws distinct indices from [0, n) in O(draws).
class DistinctSampler {
 public:
  DistinctSampler(std::size_t n, Rng& rng) : remaining_(n), rng_(rng) {}

  bool Exhausted() const { return remaining_ == 0; }

  std::size_t Next() {
    const std::size_t pick = rng_.UniformIndex(remaining_);
    const std::size_t last = remaining_ - 1;
    const std::size_t value = Lookup(pick);
    swapped_[pick] = Lookup(last);
    --remaining_;
    return value;
  }

 private:
  std::size_t Lookup(std::size_t i) const {
    const auto it = swapped_.find(i);
    return it == swapped_.end() ? i : it->second;
  }

  std::size_t remaining_;
  Rng& rng_;
  std::unordered_map<std::size_t, std::size_t> swapped_;
};

struct RecordOutput {
  std::vector<SentenceContextPair> pairs;
  std::size_t dropped_bounds = 0;
};

}  // namespace

std::optional<SentenceContextPair> EnforceBounds(SentenceContextPair pair,
                                                 const LengthBounds& bounds) {
  if (!InBounds(pair.sentence_token_len, pair.context_token_len, bounds)) return std::nullopt;
  return pair;
}

absl::StatusOr<SimulationResult> SimulateFromSummaries(std::span<const CorpusRecord> records,
                                                       uint64_t rng_seed, double ooc_fraction,
                                                       const LengthBounds& bounds) {
  if (!(ooc_fraction >= 0.0 && ooc_fraction <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("ooc_fraction must be in [0,1], got ", ooc_fraction));
  }
  for (const CorpusRecord& r : records) {
    if (r.kind != RecordKind::kSummaryPair) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", r.record_id, " is not a summary_pair"));
    }
  }

  // partner[i] = index of the article paired with abstract i.
  std::vector<std::size_t> partner(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) partner[i] = i;

  for (Split split : {Split::kTrain, Split::kTest}) {
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].split == split) group.push_back(i);
    }
    if (group.empty()) continue;
    if (ooc_fraction > 0.0 && group.size() < 2) {
      return absl::FailedPreconditionError(
          absl::StrCat("cannot shuffle: ", ToAbsl(ToString(split)), " split has ", group.size(),
                       " record(s), need at least 2 when ooc_fraction > 0"));
    }
    const auto n_ooc =
        static_cast<std::size_t>(std::llround(ooc_fraction * static_cast<double>(group.size())));
    Rng selection(DeriveSeed(rng_seed, kSplitSelectionStream + static_cast<uint64_t>(split)));
    std::vector<std::size_t> order(group.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    selection.Shuffle(order);
    for (std::size_t k = 0; k < n_ooc; ++k) {
      const std::size_t pos = order[k];
      const std::size_t i = group[pos];
      Rng rng(DeriveSeed(rng_seed, i));
      std::size_t other = rng.UniformIndex(group.size() - 1);
      if (other >= pos) ++other;
      partner[i] = group[other];
    }
  }

  std::vector<RecordOutput> outputs(records.size());
  ParallelFor(records.size(), [&](std::size_t i) {
    const CorpusRecord& rec = records[i];
    const CorpusRecord& article = records[partner[i]];
    const std::size_t context_len = text::CountWordTokens(article.text_b);
    const Label label = partner[i] == i ? Label::kInContext : Label::kOutOfContext;
    const auto sentences = text::SplitSentenceTexts(rec.text_a);
    RecordOutput& out = outputs[i];
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      SentenceContextPair pair;
      pair.pair_id = absl::StrCat(rec.record_id, "#", s);
      pair.record_id = rec.record_id;
      pair.origin = RecordKind::kSummaryPair;
      pair.sentence = sentences[s];
      pair.context = article.text_b;
      pair.label = label;
      pair.source = rec.source;
      pair.split = rec.split;
      pair.sentence_token_len = text::CountWordTokens(pair.sentence);
      pair.context_token_len = context_len;
      if (auto kept = EnforceBounds(std::move(pair), bounds)) {
        out.pairs.push_back(std::move(*kept));
      } else {
        ++out.dropped_bounds;
      }
    }
  });

  SimulationResult result;
  result.stats.records_in = records.size();
  for (RecordOutput& out : outputs) {
    result.stats.dropped_bounds += out.dropped_bounds;
    for (SentenceContextPair& p : out.pairs) result.pairs.push_back(std::move(p));
  }
  result.stats.pairs_out = result.pairs.size();
  return result;
}

StsMapping MapStsLabel(std::string_view raw_label, bool unanimous) {
  const std::string label = ToLowerAscii(TrimAscii(raw_label));
  StsMapping mapped;
  if (label == "equivalent" || label == "entailment") {
    mapped = StsMapping::kInContext;
  } else if (label == "not_equivalent" || label == "not equivalent" || label == "contradiction") {
    mapped = StsMapping::kOutOfContext;
  } else if (label == "neutral") {
    return StsMapping::kDropNeutral;
  } else {
    return StsMapping::kReject;
  }
  return unanimous ? mapped : StsMapping::kDropDisagreement;
}

absl::StatusOr<SimulationResult> SimulateFromSts(std::span<const CorpusRecord> records,
                                                 std::span<const std::string> pool,
                                                 uint64_t rng_seed, const LengthBounds& bounds) {
  if (pool.empty()) return absl::InvalidArgumentError("filler pool is empty");
  for (const CorpusRecord& r : records) {
    if (r.kind != RecordKind::kStsPair) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", r.record_id, " is not an sts_pair"));
    }
  }
  std::vector<std::size_t> pool_lens(pool.size());
  ParallelFor(pool.size(), [&](std::size_t i) { pool_lens[i] = text::CountWordTokens(pool[i]); });

  enum class Outcome {
    kEmitted,
    kDroppedBounds,
    kNeutral,
    kDisagreement,
    kPoolTooSmall,
    kRejected
  };
  struct StsOutput {
    Outcome outcome = Outcome::kRejected;
    SentenceContextPair pair;
    std::string error;
  };
  std::vector<StsOutput> outputs(records.size());

  ParallelFor(records.size(), [&](std::size_t r) {
    const CorpusRecord& rec = records[r];
    StsOutput& out = outputs[r];
    Label label = Label::kInContext;
    switch (MapStsLabel(rec.raw_label.value_or(""), rec.unanimous)) {
      case StsMapping::kInContext:
        label = Label::kInContext;
        break;
      case StsMapping::kOutOfContext:
        label = Label::kOutOfContext;
        break;
      case StsMapping::kDropNeutral:
        out.outcome = Outcome::kNeutral;
        return;
      case StsMapping::kDropDisagreement:
        out.outcome = Outcome::kDisagreement;
        return;
      case StsMapping::kReject:
        out.outcome = Outcome::kRejected;
        out.error = absl::StrCat("unmappable raw_label '", rec.raw_label.value_or(""), "'");
        return;
    }

    Rng rng(DeriveSeed(rng_seed, r));
    DistinctSampler sampler(pool.size(), rng);
    std::vector<std::size_t> fillers;
    std::size_t tokens = text::CountWordTokens(rec.text_a);
    while (tokens < bounds.context_min && !sampler.Exhausted()) {
      const std::size_t idx = sampler.Next();
      if (pool[idx] == rec.text_a || pool[idx] == rec.text_b) continue;
      fillers.push_back(idx);
      tokens += pool_lens[idx];
    }
    if (tokens < bounds.context_min) {
      out.outcome = Outcome::kPoolTooSmall;
      return;
    }
    const std::size_t insert_at = rng.UniformIndex(fillers.size() + 1);
    std::string context;
    for (std::size_t k = 0; k <= fillers.size(); ++k) {
      if (!context.empty()) context += ' ';
      if (k == insert_at) {
        context += rec.text_a;
        if (k < fillers.size()) context += ' ';
      }
      if (k < fillers.size()) context += pool[fillers[k]];
    }

    SentenceContextPair& pair = out.pair;
    pair.pair_id = absl::StrCat(rec.record_id, "#0");
    pair.record_id = rec.record_id;
    pair.origin = RecordKind::kStsPair;
    pair.sentence = rec.text_b;
    pair.context = std::move(context);
    pair.label = label;
    pair.source = rec.source;
    pair.split = rec.split;
    pair.sentence_token_len = text::CountWordTokens(pair.sentence);
    pair.context_token_len = text::CountWordTokens(pair.context);
    out.outcome = InBounds(pair.sentence_token_len, pair.context_token_len, bounds)
                      ? Outcome::kEmitted
                      : Outcome::kDroppedBounds;
  });

  SimulationResult result;
  result.stats.records_in = records.size();
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    StsOutput& out = outputs[r];
    switch (out.outcome) {
      case Outcome::kEmitted:
        result.pairs.push_back(std::move(out.pair));
        break;
      case Outcome::kDroppedBounds:
        ++result.stats.dropped_bounds;
        break;
      case Outcome::kNeutral:
        ++result.stats.dropped_neutral;
        break;
      case Outcome::kDisagreement:
        ++result.stats.dropped_disagreement;
        break;
      case Outcome::kPoolTooSmall:
        ++result.stats.skipped_pool_too_small;
        break;
      case Outcome::kRejected:
        result.stats.rejected.push_back({records[r].record_id, std::move(out.error)});
        break;
    }
  }
  result.stats.pairs_out = result.pairs.size();
  return result;
}

std::vector<std::string> BuildFillerPool(std::span<const CorpusRecord> records) {
  std::vector<std::string> pool;
  for (const CorpusRecord& r : records) {
    for (std::string& s : text::SplitSentenceTexts(r.text_a)) pool.push_back(std::move(s));
    for (std::string& s : text::SplitSentenceTexts(r.text_b)) pool.push_back(std::move(s));
  }
  return pool;
}

std::vector<SentenceContextPair> RebalanceSplits(std::vector<SentenceContextPair> pairs,
                                                 double target_ratio, uint64_t rng_seed) {
  if (!(target_ratio > 0.0 && target_ratio < 1.0)) return pairs;
  std::vector<bool> keep(pairs.size(), true);
  for (Split split : {Split::kTrain, Split::kTest}) {
    std::vector<std::size_t> ooc, in_ctx;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (pairs[i].split != split) continue;
      (pairs[i].label == Label::kOutOfContext ? ooc : in_ctx).push_back(i);
    }
    if (ooc.empty() || in_ctx.empty()) continue;
    const double ratio =
        static_cast<double>(ooc.size()) / static_cast<double>(ooc.size() + in_ctx.size());
    std::vector<std::size_t>* shrink;
    std::size_t target;
    if (ratio > target_ratio) {
      // Keep all in-context, reduce OOC to target * total.
      shrink = &ooc;
      target = static_cast<std::size_t>(
          std::llround(target_ratio / (1.0 - target_ratio) * static_cast<double>(in_ctx.size())));
    } else {
      shrink = &in_ctx;
      target = static_cast<std::size_t>(
          std::llround((1.0 - target_ratio) / target_ratio * static_cast<double>(ooc.size())));
    }
    target = std::clamp<std::size_t>(target, 1, shrink->size());
    Rng rng(DeriveSeed(rng_seed, kRebalanceStream + static_cast<uint64_t>(split)));
    rng.Shuffle(*shrink);
    for (std::size_t k = target; k < shrink->size(); ++k) keep[(*shrink)[k]] = false;
  }
  std::vector<SentenceContextPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i]) out.push_back(std::move(pairs[i]));
  }
  return out;
}

std::vector<SentenceContextPair> FilterTestSources(std::vector<SentenceContextPair> pairs,
                                                   std::span<const std::string> sources) {
  const std::unordered_set<std::string> allowed(sources.begin(), sources.end());
  std::erase_if(pairs, [&](const SentenceContextPair& p) {
    return p.split == Split::kTest && !allowed.contains(p.source);
  });
  return pairs;
}

}  // namespace ragulator::datagen
