#include "ragulator/service/config.h"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "ragulator/common/io.h"
#include "ragulator/common/status.h"
#include "ragulator/common/strings.h"

namespace ragulator::service {
namespace {

using Json = nlohmann::ordered_json;

enum class FieldType { kString, kNumber, kStringList };

struct Field {
  std::string_view key;
  FieldType type;
  std::function<Json(const PipelineConfig&)> get;
  // Returns an error message, empty on success.
  std::function<std::string(PipelineConfig&, const Json&)> set;
};

Field StringField(std::string_view key, std::string PipelineConfig::* member) {
  return {key, FieldType::kString, [member](const PipelineConfig& c) { return Json(c.*member); },
          [member](PipelineConfig& c, const Json& j) -> std::string {
            if (!j.is_string()) return "expected a string";
            c.*member = j.get<std::string>();
            return "";
          }};
}

Field IntField(std::string_view key, int PipelineConfig::* member) {
  return {key, FieldType::kNumber, [member](const PipelineConfig& c) { return Json(c.*member); },
          [member](PipelineConfig& c, const Json& j) -> std::string {
            if (!j.is_number_integer()) return "expected an integer";
            const auto v = j.get<int64_t>();
            if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
              return "integer out of range";
            }
            c.*member = static_cast<int>(v);
            return "";
          }};
}

Field DoubleField(std::string_view key, double PipelineConfig::* member) {
  return {key, FieldType::kNumber, [member](const PipelineConfig& c) { return Json(c.*member); },
          [member](PipelineConfig& c, const Json& j) -> std::string {
            if (!j.is_number()) return "expected a number";
            c.*member = j.get<double>();
            return "";
          }};
}

template <typename Enum, typename ParseFn>
Field EnumField(std::string_view key, Enum PipelineConfig::* member, ParseFn parse) {
  return {key, FieldType::kString,
          [member](const PipelineConfig& c) { return Json(std::string(ToString(c.*member))); },
          [member, parse](PipelineConfig& c, const Json& j) -> std::string {
            if (!j.is_string()) return "expected a string";
            auto v = parse(j.get<std::string>());
            if (!v.ok()) return std::string(v.status().message());
            c.*member = *v;
            return "";
          }};
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f = {
        StringField("corpus_path", &PipelineConfig::corpus_path),
        StringField("pairs_path", &PipelineConfig::pairs_path),
        StringField("labels_path", &PipelineConfig::labels_path),
        StringField("features_path", &PipelineConfig::features_path),
        StringField("model_path", &PipelineConfig::model_path),
        StringField("scores_path", &PipelineConfig::scores_path),
        StringField("report_path", &PipelineConfig::report_path),
        StringField("windows_path", &PipelineConfig::windows_path),
        {"rng_seed", FieldType::kNumber, [](const PipelineConfig& c) { return Json(c.rng_seed); },
         [](PipelineConfig& c, const Json& j) -> std::string {
           if (!j.is_number_unsigned()) return "expected a non-negative integer";
           c.rng_seed = j.get<uint64_t>();
           return "";
         }},
        DoubleField("ooc_fraction", &PipelineConfig::ooc_fraction),
        {"test_sources", FieldType::kStringList,
         [](const PipelineConfig& c) { return Json(c.test_sources); },
         [](PipelineConfig& c, const Json& j) -> std::string {
           if (!j.is_array()) return "expected an array of strings";
           std::vector<std::string> v;
           for (const Json& s : j) {
             if (!s.is_string()) return "expected an array of strings";
             v.push_back(s.get<std::string>());
           }
           c.test_sources = std::move(v);
           return "";
         }},
        IntField("window_limit", &PipelineConfig::window_limit),
        DoubleField("threshold", &PipelineConfig::threshold),
        StringField("embed_url", &PipelineConfig::embed_url),
        StringField("rerank_url", &PipelineConfig::rerank_url),
        StringField("window_scorer_url", &PipelineConfig::window_scorer_url),
        StringField("completion_url", &PipelineConfig::completion_url),
        StringField("completion_token", &PipelineConfig::completion_token),
        StringField("completion_model", &PipelineConfig::completion_model),
        EnumField("detector", &PipelineConfig::detector, ParseDetectorKind),
        EnumField("model_kind", &PipelineConfig::model_kind, ensemble::ParseModelKind),
        EnumField("labelling_method", &PipelineConfig::labelling_method,
                  [](std::string_view s) -> absl::StatusOr<llm::TemplateName> {
                    auto name = llm::ParseTemplateName(s);
                    if (name.ok() && !llm::IsLabelTemplate(*name)) {
                      return absl::InvalidArgumentError(
                          absl::StrCat("'", ToAbsl(s), "' is not a labelling template"));
                    }
                    return name;
                  }),
        IntField("cv_folds", &PipelineConfig::cv_folds),
        IntField("max_in_flight", &PipelineConfig::max_in_flight),
        IntField("threads", &PipelineConfig::threads),
        StringField("host", &PipelineConfig::host),
        IntField("port", &PipelineConfig::port),
    };
    return f;
  }();
  return fields;
}

std::string EnvName(std::string_view key) {
  std::string name(kEnvPrefix);
  for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

absl::Status CheckRange(std::string_view key, double value, double lo, double hi,
                        bool open = false) {
  const bool ok = open ? (value > lo && value < hi) : (value >= lo && value <= hi);
  if (ok && std::isfinite(value)) return absl::OkStatus();
  return ConfigError(absl::StrCat("config: ", ToAbsl(key), " = ", value, " outside ",
                                  open ? "(" : "[", lo, ", ", hi, open ? ")" : "]"));
}

}  // namespace

std::string_view ToString(DetectorKind kind) {
  return kind == DetectorKind::kMetaClassifier ? "meta_classifier" : "window_scorer";
}

absl::StatusOr<DetectorKind> ParseDetectorKind(std::string_view s) {
  if (s == "meta_classifier") return DetectorKind::kMetaClassifier;
  if (s == "window_scorer") return DetectorKind::kWindowScorer;
  return absl::InvalidArgumentError(absl::StrCat("unknown detector '", ToAbsl(s),
                                                 "'; expected meta_classifier or window_scorer"));
}

absl::Status Validate(const PipelineConfig& c) {
  for (const absl::Status& s : {
           CheckRange("ooc_fraction", c.ooc_fraction, 0.0, 1.0),
           CheckRange("window_limit", c.window_limit, 3, 65536),
           CheckRange("threshold", c.threshold, 0.0, 1.0, /*open=*/true),
           CheckRange("cv_folds", c.cv_folds, 2, 20),
           CheckRange("max_in_flight", c.max_in_flight, 1, 256),
           CheckRange("threads", c.threads, 0, 1024),
           CheckRange("port", c.port, 0, 65535),
       }) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

std::string ConfigToJson(const PipelineConfig& config) {
  Json j = Json::object();
  for (const Field& f : Fields()) j[std::string(f.key)] = f.get(config);
  return j.dump(2);
}

absl::StatusOr<PipelineConfig> ParseConfigJson(std::string_view json) {
  const Json j = Json::parse(json.begin(), json.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return ConfigError("config: not a JSON object");
  PipelineConfig config;
  for (const auto& [key, value] : j.items()) {
    const Field* field = nullptr;
    for (const Field& f : Fields()) {
      if (f.key == key) field = &f;
    }
    if (field == nullptr) return ConfigError(absl::StrCat("config: unknown key '", key, "'"));
    if (std::string err = field->set(config, value); !err.empty()) {
      return ConfigError(absl::StrCat("config: ", key, ": ", err));
    }
  }
  if (absl::Status s = Validate(config); !s.ok()) return s;
  return config;
}

EnvLookup ProcessEnv() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

absl::StatusOr<PipelineConfig> ApplyEnvOverrides(PipelineConfig config, const EnvLookup& env) {
  for (const Field& f : Fields()) {
    const std::string name = EnvName(f.key);
    const std::optional<std::string> value = env(name);
    if (!value) continue;
    Json j;
    switch (f.type) {
      case FieldType::kString:
        j = *value;
        break;
      case FieldType::kNumber:
        j = Json::parse(*value, nullptr, false);
        if (j.is_discarded()) {
          return ConfigError(absl::StrCat("config: ", name, ": '", *value, "' is not a number"));
        }
        break;
      case FieldType::kStringList:
        j = Json::array();
        for (absl::string_view part : absl::StrSplit(*value, ',')) {
          const std::string_view item = TrimAscii(std::string_view(part.data(), part.size()));
          if (!item.empty()) j.push_back(std::string(item));
        }
        break;
    }
    if (std::string err = f.set(config, j); !err.empty()) {
      return ConfigError(absl::StrCat("config: ", name, ": ", err));
    }
    if (absl::Status s = Validate(config); !s.ok()) {
      return PrefixStatus(s, absl::StrCat(name, ": "));
    }
  }
  if (absl::Status s = Validate(config); !s.ok()) return s;
  return config;
}

absl::StatusOr<PipelineConfig> LoadConfig(const std::string& path, const EnvLookup& env) {
  PipelineConfig config;
  if (!path.empty()) {
    auto text = ReadFile(path);
    if (!text.ok()) return ConfigError(absl::StrCat("config: ", text.status().message()));
    auto parsed = ParseConfigJson(*text);
    if (!parsed.ok()) return PrefixStatus(parsed.status(), absl::StrCat(path, ": "));
    config = *std::move(parsed);
  }
  return ApplyEnvOverrides(std::move(config), env);
}

}  // namespace ragulator::service
