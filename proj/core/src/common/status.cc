#include "ragulator/common/status.h"

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"
#include "ragulator/common/strings.h"

namespace ragulator {
namespace {

constexpr std::string_view kProviderUrl = "type.ragulator/provider";
constexpr std::string_view kConfigUrl = "type.ragulator/config";

}  // namespace

absl::Status AttachProvider(absl::Status status, std::string_view provider) {
  if (!status.ok()) status.SetPayload(ToAbsl(kProviderUrl), absl::Cord(ToAbsl(provider)));
  return status;
}

std::optional<std::string> FailingProvider(const absl::Status& status) {
  const auto payload = status.GetPayload(ToAbsl(kProviderUrl));
  if (!payload) return std::nullopt;
  return std::string(*payload);
}

absl::Status ConfigError(std::string_view message) {
  absl::Status status = absl::InvalidArgumentError(ToAbsl(message));
  status.SetPayload(ToAbsl(kConfigUrl), absl::Cord());
  return status;
}

bool IsConfigError(const absl::Status& status) {
  return status.GetPayload(ToAbsl(kConfigUrl)).has_value();
}

absl::Status PrefixStatus(const absl::Status& status, std::string_view prefix) {
  if (status.ok()) return status;
  absl::Status out(status.code(), absl::StrCat(ToAbsl(prefix), status.message()));
  status.ForEachPayload(
      [&out](absl::string_view url, const absl::Cord& payload) { out.SetPayload(url, payload); });
  return out;
}

}  // namespace ragulator
