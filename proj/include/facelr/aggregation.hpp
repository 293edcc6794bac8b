#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "facelr/embedding_store.hpp"

namespace facelr {

enum class WeightScheme { avg, serfiq, cs };

const char* weight_scheme_name(WeightScheme s);

// Non-negative weights summing to 1 within 1e-12.
struct WeightVector {
  std::vector<double> weights;
  WeightScheme scheme = WeightScheme::avg;
};

struct AggregatedDescriptor {
  std::vector<double> vector;  // componentwise sum of w_i * trace_i
  TraceSet source_set;
  WeightScheme scheme = WeightScheme::avg;
};

// Equal weights 1/n.
WeightVector avg_weights(std::size_t n);

// w_i = s_i / sum(s_j); scores must be >= 0 with at least one positive.
WeightVector serfiq_weights(std::span<const double> scores);

// w_i = (1 - cs_i) / sum(1 - cs_j); scores in [0,1] with at least one < 1.
WeightVector cs_weights(std::span<const double> scores);

// Weighted linear combination of the set's trace descriptors. The result is
// not re-normalized; cosine scoring divides by norms anyway.
AggregatedDescriptor aggregate(const TraceSet& trace_set,
                               const WeightVector& weights,
                               const EmbeddingStore& store);

}  // namespace facelr
