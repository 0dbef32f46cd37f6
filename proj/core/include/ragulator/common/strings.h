#ifndef RAGULATOR_COMMON_STRINGS_H_
#define RAGULATOR_COMMON_STRINGS_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/strings/string_view.h"

namespace ragulator {

// absl here is built without std::string_view aliasing; bridge explicitly.
inline absl::string_view ToAbsl(std::string_view s) {
  return absl::string_view(s.data(), s.size());
}

// Non-empty lines of `text` with surrounding ASCII whitespace trimmed.
std::vector<std::string> NonEmptyLines(std::string_view text);

std::string_view TrimAscii(std::string_view text);

}  // namespace ragulator

#endif  // RAGULATOR_COMMON_STRINGS_H_
