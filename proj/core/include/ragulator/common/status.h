#ifndef RAGULATOR_COMMON_STATUS_H_
#define RAGULATOR_COMMON_STATUS_H_

#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"

namespace ragulator {

// Tags a failure with the name of the external provider that caused it.
// Payloads survive PrefixStatus.
absl::Status AttachProvider(absl::Status status, std::string_view provider);
std::optional<std::string> FailingProvider(const absl::Status& status);

// InvalidArgument tagged as a configuration problem.
absl::Status ConfigError(std::string_view message);
bool IsConfigError(const absl::Status& status);

// Same code and payloads, message "<prefix><message>".
absl::Status PrefixStatus(const absl::Status& status, std::string_view prefix);

}  // namespace ragulator

#endif  // RAGULATOR_COMMON_STATUS_H_
