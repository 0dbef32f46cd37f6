#ifndef RAGULATOR_TEXT_PORTER_STEMMER_H_
#define RAGULATOR_TEXT_PORTER_STEMMER_H_

#include <string>
#include <string_view>

namespace ragulator::text {

// The original Porter (1980) suffix-stripping algorithm, steps 1a-5b.
// Input must be lowercase; words containing anything other than ASCII
// letters are returned unchanged.
std::string PorterStem(std::string_view word);

}  // namespace ragulator::text

#endif  // RAGULATOR_TEXT_PORTER_STEMMER_H_
