#ifndef RAGULATOR_DATAGEN_MANIFEST_H_
#define RAGULATOR_DATAGEN_MANIFEST_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>

#include "ragulator/datagen/records.h"
#include "ragulator/datagen/simulate.h"

namespace ragulator::datagen {

struct DatasetManifest {
  uint64_t rng_seed = 0;
  // (source, split, label) -> number of pairs.
  std::map<std::tuple<std::string, Split, Label>, std::size_t> counts;
  // Present only for splits that have at least one pair.
  std::map<Split, double> ooc_ratio;
  double ratio_tolerance = 0.05;
  bool ratio_consistent = true;
  std::optional<SimulationStats> stats;

  std::size_t Count(std::string_view source, Split split, Label label) const;
};

DatasetManifest BuildManifest(std::span<const SentenceContextPair> pairs, uint64_t rng_seed = 0,
                              double ratio_tolerance = 0.05);

std::string ManifestToJson(const DatasetManifest& manifest);

}  // namespace ragulator::datagen

#endif  // RAGULATOR_DATAGEN_MANIFEST_H_
