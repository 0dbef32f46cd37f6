#include "ragulator/text/preprocess.h"

#include <string>
#include <unordered_set>

#include "ragulator/common/assets.h"
#include "ragulator/common/strings.h"
#include "ragulator/text/porter_stemmer.h"
#include "ragulator/text/tokenize.h"

namespace ragulator::text {
namespace {

const std::unordered_set<std::string>& StopwordSet() {
  static const auto* set = [] {
    auto* s = new std::unordered_set<std::string>();
    for (std::string& line : NonEmptyLines(assets::Stopwords())) {
      s->insert(std::move(line));
    }
    return s;
  }();
  return *set;
}

}  // namespace

bool IsStopword(std::string_view word) { return StopwordSet().contains(std::string(word)); }

std::string ToLower(std::string_view text) {
  std::string out(text);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + ('a' - 'A'));
    } else if (c == 0xC3 && i + 1 < out.size()) {
      // U+00C0..U+00DE except U+00D7 (multiplication sign).
      const auto d = static_cast<unsigned char>(out[i + 1]);
      if (d >= 0x80 && d <= 0x9E && d != 0x97) out[i + 1] = static_cast<char>(d + 0x20);
      ++i;
    }
  }
  return out;
}

PreprocessedText Preprocess(std::string_view text) {
  PreprocessedText result;
  for (Token& token : Tokenize(ToLower(text))) {
    if (!token.is_word) continue;
    ++result.source_len;
    if (IsStopword(token.surface)) continue;
    std::string stem = PorterStem(token.surface);
    if (IsStopword(stem)) continue;
    result.tokens.push_back(std::move(stem));
  }
  return result;
}

}  // namespace ragulator::text
