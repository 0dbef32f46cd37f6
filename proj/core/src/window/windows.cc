#include "ragulator/window/windows.h"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "ragulator/common/io.h"
#include "ragulator/common/parallel.h"
#include "ragulator/common/strings.h"
#include "ragulator/text/sentences.h"

namespace ragulator::window {
namespace {

std::string_view Slice(std::string_view text, std::size_t start, std::size_t end) {
  return text.substr(start, end - start);
}

// Splits context[lo, hi) into pieces of at most `budget` tokens. The first
// piece starts at lo, the last ends at hi, and every cut falls on a token
// start.
absl::Status HardSplit(std::string_view context, std::size_t lo, std::size_t hi,
                       std::size_t sentence_index, std::size_t budget, std::size_t overhead,
                       const TokenBudgetTokenizer& tokenizer, std::vector<Window>& out) {
  const std::string_view region = Slice(context, lo, hi);
  const std::vector<TokenSpan> spans = tokenizer.Spans(region);
  if (spans.empty()) {
    return absl::InternalError(absl::StrCat("tokenizer '", tokenizer.Name(),
                                            "' counts tokens in a region it cannot span"));
  }
  std::size_t t = 0;
  std::size_t piece_start = lo;
  while (t < spans.size()) {
    std::size_t take = std::min(budget, spans.size() - t);
    while (true) {
      const std::size_t piece_end = t + take < spans.size() ? lo + spans[t + take].start : hi;
      const std::size_t count = tokenizer.Count(Slice(context, piece_start, piece_end));
      if (count <= budget) {
        Window w;
        w.context_char_start = piece_start;
        w.context_char_end = piece_end;
        w.token_len = overhead + count;
        w.first_sentence = sentence_index;
        w.end_sentence = sentence_index + 1;
        out.push_back(w);
        piece_start = piece_end;
        break;
      }
      if (--take == 0) {
        return absl::InternalError(absl::StrCat("tokenizer '", tokenizer.Name(),
                                                "' cannot fit a single token in budget ", budget));
      }
    }
    t += take;
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<WindowSet> BuildWindows(std::string_view pair_id, std::string_view sentence,
                                       std::string_view context,
                                       const TokenBudgetTokenizer& tokenizer, int limit) {
  if (limit <= kSpecialTokens) {
    return absl::InvalidArgumentError(absl::StrCat("window limit ", limit, " is too small"));
  }
  WindowSet ws;
  ws.pair_id = std::string(pair_id);
  ws.limit = limit;
  ws.sentence_tokens = tokenizer.Count(sentence);
  const std::size_t overhead = kSpecialTokens + ws.sentence_tokens;
  if (overhead >= static_cast<std::size_t>(limit)) {
    return absl::InvalidArgumentError(absl::StrCat("sentence too long: ", ws.sentence_tokens,
                                                   " tokens leave no context budget under limit ",
                                                   limit));
  }
  const std::size_t budget = static_cast<std::size_t>(limit) - overhead;

  const std::vector<text::SentenceSpan> spans = text::SplitSentences(context);
  const std::size_t n = spans.size();
  ws.num_context_sentences = n;
  if (n == 0) {
    Window w;
    w.context_char_end = context.size();
    w.token_len = overhead + tokenizer.Count(context);
    ws.windows.push_back(w);
    return ws;
  }
  const auto slice_end = [&](std::size_t b) {
    return b + 1 < n ? spans[b + 1].start : context.size();
  };

  std::size_t window_start = 0;
  std::size_t a = 0;
  while (a < n) {
    std::size_t count = tokenizer.Count(Slice(context, window_start, slice_end(a)));
    if (count > budget) {
      if (absl::Status s = HardSplit(context, window_start, slice_end(a), a, budget, overhead,
                                     tokenizer, ws.windows);
          !s.ok()) {
        return s;
      }
      // The last piece stays open for the following sentences.
      window_start = ws.windows.back().context_char_start;
      count = ws.windows.back().token_len - overhead;
      ws.windows.pop_back();
    }
    std::size_t b = a;
    while (b + 1 < n) {
      const std::size_t next = tokenizer.Count(Slice(context, window_start, slice_end(b + 1)));
      if (next > budget) break;
      ++b;
      count = next;
    }
    Window w;
    w.context_char_start = window_start;
    w.context_char_end = slice_end(b);
    w.token_len = overhead + count;
    w.first_sentence = a;
    w.end_sentence = b + 1;
    ws.windows.push_back(w);
    window_start = slice_end(b);
    a = b + 1;
  }
  return ws;
}

absl::StatusOr<WindowSet> BuildWindows(const datagen::SentenceContextPair& pair,
                                       const TokenBudgetTokenizer& tokenizer, int limit) {
  return BuildWindows(pair.pair_id, pair.sentence, pair.context, tokenizer, limit);
}

absl::StatusOr<WindowSet> PropagateLabels(WindowSet ws,
                                          const std::optional<RelevanceAnnotation>& annotation,
                                          datagen::Label pair_label) {
  if (pair_label != datagen::Label::kInContext && pair_label != datagen::Label::kOutOfContext) {
    return absl::InvalidArgumentError("pair label must be 0 or 1");
  }
  if (pair_label == datagen::Label::kOutOfContext) {
    for (Window& w : ws.windows) w.label = 1;
    return ws;
  }
  if (!annotation) {
    if (ws.windows.size() != 1) {
      return absl::FailedPreconditionError(
          absl::StrCat("pair ", ws.pair_id, ": in-context pair with ", ws.windows.size(),
                       " windows needs a relevance annotation"));
    }
    ws.windows[0].label = 0;
    return ws;
  }
  if (!annotation->pair_id.empty() && annotation->pair_id != ws.pair_id) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid annotation: pair id ", annotation->pair_id, " does not match ", ws.pair_id));
  }
  for (std::size_t idx : annotation->relevant_sentence_indices) {
    if (idx >= ws.num_context_sentences) {
      return absl::InvalidArgumentError(absl::StrCat("invalid annotation: sentence index ", idx,
                                                     " out of range [0, ", ws.num_context_sentences,
                                                     ")"));
    }
  }
  for (Window& w : ws.windows) {
    const bool relevant = std::any_of(
        annotation->relevant_sentence_indices.begin(), annotation->relevant_sentence_indices.end(),
        [&](std::size_t idx) { return idx >= w.first_sentence && idx < w.end_sentence; });
    w.label = relevant ? 0 : 1;
  }
  return ws;
}

absl::StatusOr<double> AggregateMin(std::span<const double> probabilities) {
  if (probabilities.empty()) return absl::InvalidArgumentError("no window probabilities");
  double lowest = 1.0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat("probability ", p, " outside [0, 1]"));
    }
    lowest = std::min(lowest, p);
  }
  return lowest;
}

absl::StatusOr<WindowSet> ScoreWindows(WindowSet ws, std::string_view sentence,
                                       std::string_view context, const WindowScorer& scorer,
                                       unsigned max_threads) {
  std::vector<absl::StatusOr<double>> results(ws.windows.size(), 0.0);
  ParallelFor(
      ws.windows.size(),
      [&](std::size_t i) {
        const Window& w = ws.windows[i];
        results[i] = scorer(sentence, Slice(context, w.context_char_start, w.context_char_end));
      },
      max_threads);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok()) {
      return absl::Status(results[i].status().code(),
                          absl::StrCat("window ", i, ": ", results[i].status().message()));
    }
    const double p = *results[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("window ", i, ": scorer returned ", p, " outside [0, 1]"));
    }
    ws.windows[i].probability = p;
  }
  return ws;
}

absl::StatusOr<Decision> Decide(const WindowSet& ws, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat("threshold ", threshold, " outside (0, 1)"));
  }
  std::vector<double> probabilities;
  probabilities.reserve(ws.windows.size());
  for (std::size_t i = 0; i < ws.windows.size(); ++i) {
    if (!ws.windows[i].probability) {
      return absl::FailedPreconditionError(absl::StrCat("window ", i, " is unscored"));
    }
    probabilities.push_back(*ws.windows[i].probability);
  }
  auto lowest = AggregateMin(probabilities);
  if (!lowest.ok()) return lowest.status();
  return Decision{*lowest, *lowest >= threshold ? 1 : 0, ws.windows.size()};
}

absl::StatusOr<Decision> Discriminate(std::string_view sentence, std::string_view context,
                                      const TokenBudgetTokenizer& tokenizer,
                                      const WindowScorer& scorer, double threshold, int limit,
                                      unsigned max_threads) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat("threshold ", threshold, " outside (0, 1)"));
  }
  auto ws = BuildWindows("", sentence, context, tokenizer, limit);
  if (!ws.ok()) return ws.status();
  auto scored = ScoreWindows(*std::move(ws), sentence, context, scorer, max_threads);
  if (!scored.ok()) return scored.status();
  return Decide(*scored, threshold);
}

std::vector<WindowExample> ToExamples(const WindowSet& ws, std::string_view sentence,
                                      std::string_view context) {
  std::vector<WindowExample> out;
  out.reserve(ws.windows.size());
  for (std::size_t i = 0; i < ws.windows.size(); ++i) {
    const Window& w = ws.windows[i];
    out.push_back({ws.pair_id, i, std::string(sentence),
                   std::string(Slice(context, w.context_char_start, w.context_char_end)), w.label});
  }
  return out;
}

std::string WindowExampleToJson(const WindowExample& e) {
  nlohmann::ordered_json j;
  j["pair_id"] = e.pair_id;
  j["window_index"] = e.window_index;
  j["sentence"] = e.sentence;
  j["context_slice"] = e.context_slice;
  j["label"] = e.label ? nlohmann::ordered_json(*e.label) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

absl::StatusOr<WindowExample> ParseWindowExample(std::string_view json_line) {
  const auto j = nlohmann::json::parse(json_line.begin(), json_line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return absl::InvalidArgumentError("not a JSON object");
  WindowExample e;
  for (const char* key : {"pair_id", "sentence", "context_slice"}) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      return absl::InvalidArgumentError(absl::StrCat("missing or non-string field '", key, "'"));
    }
  }
  e.pair_id = j["pair_id"].get<std::string>();
  e.sentence = j["sentence"].get<std::string>();
  e.context_slice = j["context_slice"].get<std::string>();
  const auto index = j.find("window_index");
  if (index == j.end() || !index->is_number_unsigned()) {
    return absl::InvalidArgumentError("missing or invalid field 'window_index'");
  }
  e.window_index = index->get<std::size_t>();
  if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || (it->get<int>() != 0 && it->get<int>() != 1)) {
      return absl::InvalidArgumentError("'label' must be 0, 1 or null");
    }
    e.label = it->get<int>();
  }
  return e;
}

absl::Status WriteWindowExamplesJsonl(const std::string& path,
                                      std::span<const WindowExample> examples) {
  std::string out;
  for (const WindowExample& e : examples) {
    out += WindowExampleToJson(e);
    out += '\n';
  }
  return WriteFile(path, out);
}

absl::StatusOr<std::vector<WindowExample>> ReadWindowExamplesJsonl(const std::string& path) {
  auto lines = ReadJsonLines(path);
  if (!lines.ok()) return lines.status();
  std::vector<WindowExample> out;
  out.reserve(lines->size());
  for (const NumberedLine& line : *lines) {
    auto e = ParseWindowExample(line.text);
    if (!e.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line.number, ": ", e.status().message()));
    }
    out.push_back(std::move(*e));
  }
  return out;
}

}  // namespace ragulator::window
