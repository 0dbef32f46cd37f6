#include "ragulator/datagen/manifest.h"

#include <cmath>

#include <nlohmann/json.hpp>

namespace ragulator::datagen {

std::size_t DatasetManifest::Count(std::string_view source, Split split, Label label) const {
  const auto it = counts.find({std::string(source), split, label});
  return it == counts.end() ? 0 : it->second;
}

DatasetManifest BuildManifest(std::span<const SentenceContextPair> pairs, uint64_t rng_seed,
                              double ratio_tolerance) {
  DatasetManifest m;
  m.rng_seed = rng_seed;
  m.ratio_tolerance = ratio_tolerance;
  std::map<Split, std::pair<std::size_t, std::size_t>> per_split;  // (ooc, total)
  for (const SentenceContextPair& p : pairs) {
    ++m.counts[{p.source, p.split, p.label}];
    auto& [ooc, total] = per_split[p.split];
    ooc += p.label == Label::kOutOfContext ? 1 : 0;
    ++total;
  }
  for (const auto& [split, c] : per_split) {
    m.ooc_ratio[split] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  if (m.ooc_ratio.size() == 2) {
    m.ratio_consistent =
        std::abs(m.ooc_ratio[Split::kTrain] - m.ooc_ratio[Split::kTest]) <= ratio_tolerance;
  }
  return m;
}

std::string ManifestToJson(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["rng_seed"] = m.rng_seed;
  nlohmann::ordered_json counts = nlohmann::ordered_json::array();
  for (const auto& [key, n] : m.counts) {
    const auto& [source, split, label] = key;
    counts.push_back({{"source", source},
                      {"split", ToString(split)},
                      {"label", static_cast<int>(label)},
                      {"count", n}});
  }
  j["counts"] = std::move(counts);
  nlohmann::ordered_json ratios = nlohmann::ordered_json::object();
  for (const auto& [split, r] : m.ooc_ratio) ratios[std::string(ToString(split))] = r;
  j["ooc_ratio"] = std::move(ratios);
  j["ratio_tolerance"] = m.ratio_tolerance;
  j["ratio_consistent"] = m.ratio_consistent;
  if (m.stats) {
    const SimulationStats& s = *m.stats;
    nlohmann::ordered_json stats;
    stats["records_in"] = s.records_in;
    stats["pairs_out"] = s.pairs_out;
    stats["dropped_bounds"] = s.dropped_bounds;
    stats["dropped_neutral"] = s.dropped_neutral;
    stats["dropped_disagreement"] = s.dropped_disagreement;
    stats["skipped_pool_too_small"] = s.skipped_pool_too_small;
    nlohmann::ordered_json rejected = nlohmann::ordered_json::array();
    for (const RecordError& e : s.rejected) {
      rejected.push_back({{"record_id", e.record_id}, {"message", e.message}});
    }
    stats["rejected"] = std::move(rejected);
    j["stats"] = std::move(stats);
  }
  return j.dump(2) + "\n";
}

}  // namespace ragulator::datagen
