#include "ragulator/text/sentences.h"

#include <cctype>
#include <string>
#include <unordered_set>

#include "ragulator/common/assets.h"
#include "ragulator/common/strings.h"
#include "ragulator/text/preprocess.h"
#include "ragulator/text/tokenize.h"

namespace ragulator::text {
namespace {

const std::unordered_set<std::string>& AbbreviationSet() {
  static const auto* set = [] {
    auto* s = new std::unordered_set<std::string>();
    for (std::string& line : NonEmptyLines(assets::Abbreviations())) {
      s->insert(std::move(line));
    }
    return s;
  }();
  return *set;
}

bool IsTerminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing quote or bracket (ASCII or curly). Returns byte length or 0.
std::size_t CloserLength(std::string_view text, std::size_t pos) {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
  if (text.substr(pos, 3) == "\xE2\x80\x9D" || text.substr(pos, 3) == "\xE2\x80\x99") {
    return 3;
  }
  return 0;
}

bool StartsSentence(std::string_view text, std::size_t pos) {
  const unsigned char c = static_cast<unsigned char>(text[pos]);
  if (std::isupper(c) || std::isdigit(c)) return c < 0x80;
  if (c == '"' || c == '\'' || c == '(' || c == '[') return true;
  return text.substr(pos, 3) == "\xE2\x80\x9C" || text.substr(pos, 3) == "\xE2\x80\x98";
}

// The whitespace-delimited word that ends at `period` (inclusive), with
// leading punctuation other than '.' removed.
std::string_view WordEndingAt(std::string_view text, std::size_t period) {
  std::size_t begin = period;
  while (begin > 0 && WhitespaceLength(text, begin - 1) == 0) --begin;
  while (begin < period && text[begin] != '.' && PunctuationLength(text, begin) > 0) {
    begin += PunctuationLength(text, begin);
  }
  return text.substr(begin, period + 1 - begin);
}

}  // namespace

bool IsAbbreviation(std::string_view word) { return AbbreviationSet().contains(ToLower(word)); }

std::vector<SentenceSpan> SplitSentences(std::string_view text) {
  std::vector<SentenceSpan> spans;
  std::size_t start = std::string_view::npos;

  auto close = [&](std::size_t end) {
    spans.push_back({start, end, std::string(text.substr(start, end - start))});
    start = std::string_view::npos;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    if (const std::size_t ws = WhitespaceLength(text, i); ws > 0) {
      i += ws;
      continue;
    }
    if (start == std::string_view::npos) start = i;
    if (!IsTerminator(text[i])) {
      ++i;
      continue;
    }
    // Consume the terminator run and any closers.
    std::size_t end = i;
    while (end < text.size() && IsTerminator(text[end])) ++end;
    const bool single_period = (end - i == 1) && text[i] == '.';
    while (end < text.size()) {
      const std::size_t len = CloserLength(text, end);
      if (len == 0) break;
      end += len;
    }
    std::size_t next = end;
    while (next < text.size()) {
      const std::size_t ws = WhitespaceLength(text, next);
      if (ws == 0) break;
      next += ws;
    }
    bool boundary = false;
    if (next == text.size()) {
      boundary = true;
    } else if (next > end && StartsSentence(text, next)) {
      boundary = !(single_period && IsAbbreviation(WordEndingAt(text, i)));
    }
    if (boundary) close(end);
    i = end;
  }
  if (start != std::string_view::npos) {
    std::size_t end = text.size();
    while (end > start) {
      std::size_t cp = end - 1;
      while (cp > start && (static_cast<unsigned char>(text[cp]) & 0xC0) == 0x80) --cp;
      if (WhitespaceLength(text, cp) == 0) break;
      end = cp;
    }
    close(end);
  }
  return spans;
}

std::vector<std::string> SplitSentenceTexts(std::string_view text) {
  std::vector<std::string> out;
  for (SentenceSpan& s : SplitSentences(text)) out.push_back(std::move(s.text));
  return out;
}

}  // namespace ragulator::text
