#ifndef RAGULATOR_FEATURES_CLASSICAL_H_
#define RAGULATOR_FEATURES_CLASSICAL_H_

#include "absl/status/statusor.h"
#include "ragulator/text/token.h"

namespace ragulator::features {

// |set(candidate) ∩ set(context)| / |set(candidate)|; 0 for an empty candidate.
double PrecisionScore(const text::PreprocessedText& candidate,
                      const text::PreprocessedText& context);

// Mean negative log-likelihood (nats) of the candidate's n-grams under an
// add-one smoothed model of the context's n-grams:
//   P(g) = (count(g) + 1) / (N + |V| + 1)
// with N the number of context n-grams and |V| the number of distinct ones
// (the +1 is the unknown bucket). 0 when the candidate has no n-grams.
// InvalidArgument unless n is 1 or 2.
absl::StatusOr<double> NgramPerplexity(const text::PreprocessedText& candidate,
                                       const text::PreprocessedText& context, int n);

}  // namespace ragulator::features

#endif  // RAGULATOR_FEATURES_CLASSICAL_H_
