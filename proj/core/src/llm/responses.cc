#include "ragulator/llm/responses.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "ragulator/common/strings.h"

namespace ragulator::llm {
namespace {

std::string Lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Strips whitespace plus quotes, periods and parentheses around a list item.
std::string_view StripItem(std::string_view item) {
  constexpr std::string_view kJunk = " \t\r\n\"'`.()*";
  const std::size_t b = item.find_first_not_of(kJunk);
  if (b == std::string_view::npos) return {};
  const std::size_t e = item.find_last_not_of(kJunk);
  return item.substr(b, e - b + 1);
}

std::string_view ListSpan(std::string_view segment) {
  if (const std::size_t open = segment.find('['); open != std::string_view::npos) {
    std::size_t close = segment.find(']', open);
    if (close == std::string_view::npos) close = segment.find('\n', open);
    if (close == std::string_view::npos) close = segment.size();
    return segment.substr(open + 1, close - open - 1);
  }
  std::size_t start = 0;
  while (start < segment.size()) {
    std::size_t end = segment.find('\n', start);
    if (end == std::string_view::npos) end = segment.size();
    const std::string_view line = segment.substr(start, end - start);
    if (!TrimAscii(line).empty()) return line;
    start = end + 1;
  }
  return {};
}

}  // namespace

absl::StatusOr<ParsedLabel> ParseLabelResponse(std::string_view text, std::size_t n_sentences,
                                               bool cot) {
  if (n_sentences == 0) return absl::InvalidArgumentError("no context sentences");
  std::string_view segment = text;
  if (cot) {
    const std::size_t pos = Lowercase(text).rfind(Lowercase(kAnswerMarker));
    if (pos == std::string::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("parse failure: missing '", ToAbsl(kAnswerMarker), "'"));
    }
    segment = text.substr(pos + kAnswerMarker.size());
  }
  ParsedLabel out;
  bool any_integer = false;
  std::string_view list = ListSpan(segment);
  while (true) {
    const std::size_t comma = list.find(',');
    const std::string_view item = StripItem(list.substr(0, comma));
    if (!item.empty()) {
      long long value = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
      if (ec != std::errc() || ptr != item.data() + item.size()) {
        out.warnings.push_back(absl::StrCat("ignored non-integer item '", ToAbsl(item), "'"));
      } else {
        any_integer = true;
        if (value < 0 || static_cast<unsigned long long>(value) >= n_sentences) {
          out.warnings.push_back(
              absl::StrCat("dropped index ", value, " outside [0, ", n_sentences, ")"));
        } else {
          out.indices.push_back(static_cast<std::size_t>(value));
        }
      }
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.indices.erase(std::unique(out.indices.begin(), out.indices.end()), out.indices.end());
  if (out.indices.empty()) {
    return absl::InvalidArgumentError(any_integer ? "parse failure: no index in range"
                                                  : "parse failure: no index found");
  }
  return out;
}

absl::StatusOr<JudgeScore> ScoreJudgeLogprobs(std::span<const TokenLogprob> top) {
  if (top.size() > 10) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected at most 10 logprobs, got ", top.size()));
  }
  for (const TokenLogprob& t : top) {
    if (!std::isfinite(t.logprob) || t.logprob > 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid logprob ", t.logprob, " for token '", t.token, "'"));
    }
  }
  const auto find = [&](std::string_view token) -> const TokenLogprob* {
    for (const TokenLogprob& t : top) {
      if (TrimAscii(t.token) == token) return &t;
    }
    return nullptr;
  };
  const TokenLogprob* zero = find("0");
  const TokenLogprob* one = find("1");
  const auto sum_except = [&](const TokenLogprob* skip) {
    double sum = 0.0;
    for (const TokenLogprob& t : top) {
      if (&t != skip) sum += t.logprob;
    }
    return sum;
  };
  JudgeScore score;
  if (zero == nullptr && one == nullptr) {
    score.estimated_0 = score.estimated_1 = true;
    return score;
  }
  if (zero != nullptr && one != nullptr) {
    score.logprob_0 = zero->logprob;
    score.logprob_1 = one->logprob;
  } else if (zero != nullptr) {
    score.logprob_0 = zero->logprob;
    score.logprob_1 = sum_except(zero);
    score.estimated_1 = true;
  } else {
    score.logprob_1 = one->logprob;
    score.logprob_0 = sum_except(one);
    score.estimated_0 = true;
  }
  score.probability = 1.0 / (1.0 + std::exp(score.logprob_0 - score.logprob_1));
  return score;
}

}  // namespace ragulator::llm
