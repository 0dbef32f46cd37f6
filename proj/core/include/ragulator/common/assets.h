#ifndef RAGULATOR_COMMON_ASSETS_H_
#define RAGULATOR_COMMON_ASSETS_H_

#include <string_view>

// Text assets compiled into the library from core/assets/. The same files
// are installed under share/ragulator/ for inspection.
namespace ragulator::assets {

// One stopword per line, lowercase.
std::string_view Stopwords();

// One abbreviation per line, lowercase, including the trailing period.
std::string_view Abbreviations();

// Prompt template by file stem (e.g. "label_0shot"); empty if unknown.
std::string_view Prompt(std::string_view name);

}  // namespace ragulator::assets

#endif  // RAGULATOR_COMMON_ASSETS_H_
