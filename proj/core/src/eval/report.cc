#include "ragulator/eval/report.h"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ragulator/common/io.h"
#include "ragulator/common/strings.h"

namespace ragulator::eval {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string Fixed1(double v) { return absl::StrFormat("%.1f", v); }

}  // namespace

absl::StatusOr<EvalReport> Evaluate(std::string detector, std::span<const ScoredExample> scored,
                                    double threshold, std::optional<double> wall_seconds) {
  EvalReport r;
  r.detector = std::move(detector);
  r.threshold = threshold;
  for (const ScoredExample& s : scored) (s.label == 1 ? r.n_positive : r.n_negative) += 1;
  auto auroc = Auroc(scored);
  if (!auroc.ok()) return auroc.status();
  auto auprc = Auprc(scored);
  if (!auprc.ok()) return auprc.status();
  auto f1 = F1At(scored, threshold);
  if (!f1.ok()) return f1.status();
  r.auroc = *auroc;
  r.auprc = *auprc;
  r.f1 = *f1;
  if (wall_seconds) {
    auto tput = Throughput(scored.size(), *wall_seconds);
    if (!tput.ok()) return tput.status();
    r.examples_per_second = *tput;
  }
  return r;
}

absl::StatusOr<ReportFormat> ParseReportFormat(std::string_view s) {
  if (s == "json") return ReportFormat::kJson;
  if (s == "markdown-table" || s == "markdown") return ReportFormat::kMarkdownTable;
  return absl::InvalidArgumentError(absl::StrCat("unknown report format '", ToAbsl(s), "'"));
}

std::string RenderReports(std::span<const EvalReport> reports, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json arr = ordered_json::array();
    for (const EvalReport& r : reports) {
      ordered_json j;
      j["detector"] = r.detector;
      j["auroc"] = r.auroc;
      j["auprc"] = r.auprc;
      j["f1"] = r.f1;
      j["examples_per_second"] =
          r.examples_per_second ? ordered_json(*r.examples_per_second) : ordered_json(nullptr);
      j["threshold"] = r.threshold;
      j["n_positive"] = r.n_positive;
      j["n_negative"] = r.n_negative;
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }
  std::string out =
      "| Detector | AUROC | AUPRC | F1 | Speed (examples/s) |\n"
      "|---|---:|---:|---:|---:|\n";
  for (const EvalReport& r : reports) {
    absl::StrAppend(&out, "| ", r.detector, " | ", Fixed1(r.auroc), " | ", Fixed1(r.auprc), " | ",
                    Fixed1(r.f1), " | ",
                    r.examples_per_second ? Fixed1(*r.examples_per_second) : "-", " |\n");
  }
  return out;
}

absl::StatusOr<std::vector<EvalReport>> ParseReportsJson(std::string_view json) {
  const auto arr = nlohmann::json::parse(json.begin(), json.end(), nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) {
    return absl::InvalidArgumentError("report JSON must be an array");
  }
  std::vector<EvalReport> reports;
  try {
    for (const auto& j : arr) {
      EvalReport r;
      r.detector = j.at("detector").get<std::string>();
      r.auroc = j.at("auroc").get<double>();
      r.auprc = j.at("auprc").get<double>();
      r.f1 = j.at("f1").get<double>();
      if (const auto& eps = j.at("examples_per_second"); !eps.is_null()) {
        r.examples_per_second = eps.get<double>();
      }
      r.threshold = j.at("threshold").get<double>();
      r.n_positive = j.at("n_positive").get<std::size_t>();
      r.n_negative = j.at("n_negative").get<std::size_t>();
      reports.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed report: ", e.what()));
  }
  return reports;
}

absl::StatusOr<std::vector<ScoredExample>> ReadScoresJsonl(const std::string& path) {
  auto lines = ReadJsonLines(path);
  if (!lines.ok()) return lines.status();
  std::vector<ScoredExample> out;
  for (const NumberedLine& line : *lines) {
    const auto j = nlohmann::json::parse(line.text, nullptr, false);
    auto fail = [&](std::string_view what) {
      return absl::InvalidArgumentError(absl::StrCat(path, ":", line.number, ": ", ToAbsl(what)));
    };
    if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
    ScoredExample s;
    if (const auto it = j.find("pair_id"); it != j.end() && it->is_string()) {
      s.pair_id = it->get<std::string>();
    }
    const auto score = j.find("score");
    if (score == j.end() || !score->is_number()) return fail("missing numeric 'score'");
    s.score = score->get<double>();
    if (!(s.score >= 0.0 && s.score <= 1.0)) return fail("'score' outside [0,1]");
    const auto label = j.find("label");
    if (label == j.end() || !label->is_number_integer() ||
        (label->get<int>() != 0 && label->get<int>() != 1)) {
      return fail("'label' must be 0 or 1");
    }
    s.label = label->get<int>();
    if (const auto it = j.find("latency"); it != j.end() && it->is_number()) {
      s.latency_seconds = it->get<double>();
    }
    out.push_back(std::move(s));
  }
  return out;
}

absl::Status WriteScoresJsonl(const std::string& path, std::span<const ScoredExample> scored) {
  std::string out;
  for (const ScoredExample& s : scored) {
    ordered_json j;
    j["pair_id"] = s.pair_id;
    j["score"] = s.score;
    j["label"] = s.label;
    if (s.latency_seconds) j["latency"] = *s.latency_seconds;
    out += j.dump();
    out += '\n';
  }
  return WriteFile(path, out);
}

}  // namespace ragulator::eval
