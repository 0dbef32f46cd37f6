#ifndef RAGULATOR_WINDOW_WINDOWS_H_
#define RAGULATOR_WINDOW_WINDOWS_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ragulator/datagen/records.h"
#include "ragulator/window/tokenizer.h"

namespace ragulator::window {

inline constexpr int kDefaultWindowLimit = 512;
// [CLS] and [SEP].
inline constexpr int kSpecialTokens = 2;

struct Window {
  // Byte range of the context slice.
  std::size_t context_char_start = 0;
  std::size_t context_char_end = 0;
  // kSpecialTokens + sentence tokens + slice tokens.
  std::size_t token_len = 0;
  // Context sentences overlapping the slice, [first, end). A hard-split
  // sentence is listed by every piece.
  std::size_t first_sentence = 0;
  std::size_t end_sentence = 0;
  std::optional<int> label;
  std::optional<double> probability;

  friend bool operator==(const Window&, const Window&) = default;
};

struct WindowSet {
  std::string pair_id;
  int limit = kDefaultWindowLimit;
  std::size_t sentence_tokens = 0;
  // Size of the context's sentence list, as produced by text::SplitSentences.
  std::size_t num_context_sentences = 0;
  std::vector<Window> windows;

  friend bool operator==(const WindowSet&, const WindowSet&) = default;
};

struct RelevanceAnnotation {
  std::string pair_id;
  // 0-based indices into the context's sentence list.
  std::vector<std::size_t> relevant_sentence_indices;

  friend bool operator==(const RelevanceAnnotation&, const RelevanceAnnotation&) = default;
};

// Greedily packs consecutive context sentences into windows whose slices hold
// at most limit - 2 - tokens(sentence) tokens. A context sentence that does
// not fit an empty window is split at token boundaries; its last piece keeps
// packing the sentences that follow.
// Slices partition [0, context.size()): whitespace between windows belongs to
// the earlier one. InvalidArgument when the sentence leaves no context budget.
absl::StatusOr<WindowSet> BuildWindows(std::string_view pair_id, std::string_view sentence,
                                       std::string_view context,
                                       const TokenBudgetTokenizer& tokenizer,
                                       int limit = kDefaultWindowLimit);
absl::StatusOr<WindowSet> BuildWindows(const datagen::SentenceContextPair& pair,
                                       const TokenBudgetTokenizer& tokenizer,
                                       int limit = kDefaultWindowLimit);

// OOC pairs label every window 1. In-context pairs label a window 0 iff it
// overlaps a relevant sentence. An in-context pair without an annotation is
// only accepted when it has a single window.
absl::StatusOr<WindowSet> PropagateLabels(WindowSet windows,
                                          const std::optional<RelevanceAnnotation>& annotation,
                                          datagen::Label pair_label);

// Minimum of probabilities in [0, 1]. InvalidArgument when empty or out of
// range.
absl::StatusOr<double> AggregateMin(std::span<const double> probabilities);

// Scores (sentence, context slice) for one window. Must be safe for
// concurrent calls.
using WindowScorer =
    std::function<absl::StatusOr<double>(std::string_view sentence, std::string_view slice)>;

// Fills each window's probability. The first failing window (by index) is
// returned with "window <i>: " prefixed and its code kept.
absl::StatusOr<WindowSet> ScoreWindows(WindowSet windows, std::string_view sentence,
                                       std::string_view context, const WindowScorer& scorer,
                                       unsigned max_threads = 0);

struct Decision {
  double probability = 0.0;
  int label = 0;
  std::size_t n_windows = 0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

// Min over window probabilities; label 1 iff probability >= threshold.
// threshold must lie in (0, 1).
absl::StatusOr<Decision> Decide(const WindowSet& scored, double threshold);

// BuildWindows, ScoreWindows and Decide in one call.
absl::StatusOr<Decision> Discriminate(std::string_view sentence, std::string_view context,
                                      const TokenBudgetTokenizer& tokenizer,
                                      const WindowScorer& scorer, double threshold,
                                      int limit = kDefaultWindowLimit, unsigned max_threads = 0);

// One fine-tuning example per window.
struct WindowExample {
  std::string pair_id;
  std::size_t window_index = 0;
  std::string sentence;
  std::string context_slice;
  std::optional<int> label;

  friend bool operator==(const WindowExample&, const WindowExample&) = default;
};

std::vector<WindowExample> ToExamples(const WindowSet& windows, std::string_view sentence,
                                      std::string_view context);

// JSONL rows {pair_id, window_index, sentence, context_slice, label}; label is
// null when unset.
std::string WindowExampleToJson(const WindowExample& example);
absl::StatusOr<WindowExample> ParseWindowExample(std::string_view json_line);
absl::Status WriteWindowExamplesJsonl(const std::string& path,
                                      std::span<const WindowExample> examples);
absl::StatusOr<std::vector<WindowExample>> ReadWindowExamplesJsonl(const std::string& path);

}  // namespace ragulator::window

#endif  // RAGULATOR_WINDOW_WINDOWS_H_
