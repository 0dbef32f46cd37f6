#include "ragulator/window/tokenizer.h"

#include "ragulator/text/tokenize.h"

namespace ragulator::window {

std::vector<TokenSpan> WhitespaceTokenizer::Spans(std::string_view text) const {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    if (const std::size_t ws = text::WhitespaceLength(text, i); ws > 0) {
      i += ws;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() && text::WhitespaceLength(text, i) == 0) ++i;
    spans.push_back({start, i});
  }
  return spans;
}

}  // namespace ragulator::window
