#ifndef RAGULATOR_COMMON_IO_H_
#define RAGULATOR_COMMON_IO_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace ragulator {

// NotFound if the file cannot be opened.
absl::StatusOr<std::string> ReadFile(const std::string& path);

// Non-blank lines of a JSONL file, with their 1-based line numbers.
struct NumberedLine {
  std::size_t number = 0;
  std::string text;
};
absl::StatusOr<std::vector<NumberedLine>> ReadJsonLines(const std::string& path);

// Writes atomically via a sibling temporary file.
absl::Status WriteFile(const std::string& path, const std::string& content);

}  // namespace ragulator

#endif  // RAGULATOR_COMMON_IO_H_
