#ifndef RAGULATOR_TESTS_TESTING_GENERATORS_H_
#define RAGULATOR_TESTS_TESTING_GENERATORS_H_

// Hand-rolled generators for property-style tests.

#include <array>
#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ragulator::testing_util {

inline std::size_t Pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Messy prose: mixed case words, stopwords, abbreviations, numbers,
// punctuation runs, curly quotes and assorted whitespace.
inline std::string RandomText(std::mt19937_64& rng, std::size_t max_pieces) {
  // clang-format off
  static constexpr std::array<std::string_view, 40> kPieces = {
      "The", "the", "cat", "Cats", "running", "are", "of", "a", "Dr.", "e.g.", "U.S.", "Smith",
      "left.", "ran!", "why?", "4%", "3.5", "(note)", "\"quoted\"", "--", "...", "growth:", "it's",
      "Hello,", "WORLD", "x-ray", "\xE2\x80\x9Csmart\xE2\x80\x9D", "caf\xC3\xA9",
      "\xC3\x89t\xC3\xA9", "relational", "nationally", "happiness", "2024.", "?!", "'", "St.",
      "Inc.", "end.", "A", "#tag"};
  // clang-format on
  static constexpr std::array<std::string_view, 6> kSpaces = {" ",  " ",  "  ",
                                                              "\n", "\t", "\xC2\xA0"};
  std::string out;
  const std::size_t n = Pick(rng, max_pieces + 1);
  if (Pick(rng, 5) == 0) out += kSpaces[Pick(rng, kSpaces.size())];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out += kSpaces[Pick(rng, kSpaces.size())];
    out += kPieces[Pick(rng, kPieces.size())];
  }
  if (Pick(rng, 5) == 0) out += kSpaces[Pick(rng, kSpaces.size())];
  return out;
}

// A sentence of `words` lowercase words drawn from `vocab`, capitalised and
// terminated with a period.
inline std::string MakeSentence(std::mt19937_64& rng, const std::vector<std::string>& vocab,
                                std::size_t words) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i > 0) s += ' ';
    s += vocab[Pick(rng, vocab.size())];
  }
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  s += '.';
  return s;
}

// Pseudo-words over a fixed prefix so vocabularies can be made disjoint.
inline std::vector<std::string> MakeVocabulary(std::string_view prefix, std::size_t size) {
  static constexpr std::array<std::string_view, 10> kSyllables = {"ka", "lo", "mi", "ne", "ru",
                                                                  "ta", "vo", "zi", "pe", "do"};
  std::vector<std::string> vocab;
  for (std::size_t i = 0; i < size; ++i) {
    std::string w(prefix);
    std::size_t k = i;
    do {
      w += kSyllables[k % kSyllables.size()];
      k /= kSyllables.size();
    } while (k > 0);
    vocab.push_back(w);
  }
  return vocab;
}

}  // namespace ragulator::testing_util

#endif  // RAGULATOR_TESTS_TESTING_GENERATORS_H_
