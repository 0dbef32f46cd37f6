#include "ragulator/text/porter_stemmer.h"

#include <array>
#include <utility>

namespace ragulator::text {
namespace {

// Working buffer for one word; each step rewrites the suffix in place.
class Stemmer {
 public:
  explicit Stemmer(std::string_view word) : b_(word) {}

  std::string Run() {
    Step1a();
    Step1b();
    Step1c();
    Step2();
    Step3();
    Step4();
    Step5a();
    Step5b();
    return b_;
  }

 private:
  bool IsConsonant(std::size_t i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 || !IsConsonant(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b_[0, len).
  int Measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && IsConsonant(i)) ++i;
    while (i < len) {
      while (i < len && !IsConsonant(i)) ++i;
      if (i >= len) break;
      while (i < len && IsConsonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool HasVowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!IsConsonant(i)) return true;
    }
    return false;
  }

  bool EndsDoubleConsonant(std::size_t len) const {
    return len >= 2 && b_[len - 1] == b_[len - 2] && IsConsonant(len - 1);
  }

  // cvc where the final c is not w, x or y.
  bool EndsCvc(std::size_t len) const {
    if (len < 3) return false;
    if (!IsConsonant(len - 1) || IsConsonant(len - 2) || !IsConsonant(len - 3)) {
      return false;
    }
    const char c = b_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool Ends(std::string_view suffix) const {
    return b_.size() >= suffix.size() &&
           std::string_view(b_).substr(b_.size() - suffix.size()) == suffix;
  }

  std::size_t StemLen(std::string_view suffix) const { return b_.size() - suffix.size(); }

  void Replace(std::string_view suffix, std::string_view repl) {
    b_.resize(StemLen(suffix));
    b_.append(repl);
  }

  void Step1a() {
    if (Ends("sses")) {
      Replace("sses", "ss");
    } else if (Ends("ies")) {
      Replace("ies", "i");
    } else if (Ends("ss")) {
      // unchanged
    } else if (Ends("s")) {
      Replace("s", "");
    }
  }

  void Step1b() {
    if (Ends("eed")) {
      if (Measure(StemLen("eed")) > 0) Replace("eed", "ee");
      return;
    }
    bool stripped = false;
    if (Ends("ed") && HasVowel(StemLen("ed"))) {
      Replace("ed", "");
      stripped = true;
    } else if (Ends("ing") && HasVowel(StemLen("ing"))) {
      Replace("ing", "");
      stripped = true;
    }
    if (!stripped) return;
    if (Ends("at") || Ends("bl") || Ends("iz")) {
      b_.push_back('e');
    } else if (EndsDoubleConsonant(b_.size())) {
      const char c = b_.back();
      if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
    } else if (Measure(b_.size()) == 1 && EndsCvc(b_.size())) {
      b_.push_back('e');
    }
  }

  void Step1c() {
    if (Ends("y") && HasVowel(StemLen("y"))) Replace("y", "i");
  }

  void Step2() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 20> kRules = {
        {{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
         {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
         {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
         {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
         {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"}}};
    ApplyLongest(kRules, 0);
  }

  void Step3() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kRules = {
        {{"icate", "ic"},
         {"ative", ""},
         {"alize", "al"},
         {"iciti", "ic"},
         {"ical", "ic"},
         {"ful", ""},
         {"ness", ""}}};
    ApplyLongest(kRules, 0);
  }

  void Step4() {
    static constexpr std::array<std::string_view, 19> kSuffixes = {
        "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
    std::string_view match;
    for (std::string_view s : kSuffixes) {
      if (Ends(s) && s.size() > match.size()) match = s;
    }
    if (match.empty()) return;
    const std::size_t stem = StemLen(match);
    if (Measure(stem) <= 1) return;
    if (match == "ion" && (stem == 0 || (b_[stem - 1] != 's' && b_[stem - 1] != 't'))) {
      return;
    }
    b_.resize(stem);
  }

  void Step5a() {
    if (!Ends("e")) return;
    const std::size_t stem = StemLen("e");
    const int m = Measure(stem);
    if (m > 1 || (m == 1 && !EndsCvc(stem))) b_.resize(stem);
  }

  void Step5b() {
    if (Measure(b_.size()) > 1 && EndsDoubleConsonant(b_.size()) && b_.back() == 'l') {
      b_.pop_back();
    }
  }

  // Longest matching suffix wins; its condition decides, no fallback.
  template <std::size_t N>
  void ApplyLongest(const std::array<std::pair<std::string_view, std::string_view>, N>& rules,
                    int min_m) {
    const std::pair<std::string_view, std::string_view>* best = nullptr;
    for (const auto& rule : rules) {
      if (Ends(rule.first) && (best == nullptr || rule.first.size() > best->first.size())) {
        best = &rule;
      }
    }
    if (best != nullptr && Measure(StemLen(best->first)) > min_m) {
      Replace(best->first, best->second);
    }
  }

  std::string b_;
};

bool AllLowerAscii(std::string_view word) {
  for (char c : word) {
    if (c < 'a' || c > 'z') return false;
  }
  return !word.empty();
}

}  // namespace

std::string PorterStem(std::string_view word) {
  if (!AllLowerAscii(word)) return std::string(word);
  return Stemmer(word).Run();
}

}  // namespace ragulator::text
