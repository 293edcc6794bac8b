#include "facelr/aggregation.hpp"

#include <cmath>

#include "facelr/error.hpp"

namespace facelr {

const char* weight_scheme_name(WeightScheme s) {
  switch (s) {
    case WeightScheme::avg: return "avg";
    case WeightScheme::serfiq: return "serfiq";
    case WeightScheme::cs: return "cs";
  }
  return "?";
}

WeightVector avg_weights(std::size_t n) {
  if (n == 0) throw Error("avg_weights: trace set is empty");
  return WeightVector{std::vector<double>(n, 1.0 / static_cast<double>(n)),
                      WeightScheme::avg};
}

WeightVector serfiq_weights(std::span<const double> scores) {
  if (scores.empty()) throw Error("serfiq_weights: no scores given");
  double sum = 0.0;
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0)
      throw Error("serfiq_weights: scores must be finite and >= 0");
    sum += s;
  }
  if (sum <= 0.0)
    throw Error("serfiq_weights: all scores are zero, weights are undefined");
  WeightVector w{std::vector<double>(scores.size()), WeightScheme::serfiq};
  for (std::size_t i = 0; i < scores.size(); ++i) w.weights[i] = scores[i] / sum;
  return w;
}

WeightVector cs_weights(std::span<const double> scores) {
  if (scores.empty()) throw Error("cs_weights: no scores given");
  double sum = 0.0;
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0 || s > 1.0)
      throw Error("cs_weights: confusion scores must lie in [0,1]");
    sum += 1.0 - s;
  }
  if (sum <= 0.0)
    throw Error("cs_weights: all confusion scores are 1, weights are undefined");
  WeightVector w{std::vector<double>(scores.size()), WeightScheme::cs};
  for (std::size_t i = 0; i < scores.size(); ++i)
    w.weights[i] = (1.0 - scores[i]) / sum;
  return w;
}

AggregatedDescriptor aggregate(const TraceSet& trace_set,
                               const WeightVector& weights,
                               const EmbeddingStore& store) {
  const std::size_t n = trace_set.member_ids.size();
  if (weights.weights.size() != n)
    throw Error("aggregate: " + std::to_string(weights.weights.size()) +
                " weights for " + std::to_string(n) + " traces");
  if (n == 0) throw Error("aggregate: trace set is empty");

  AggregatedDescriptor out;
  out.source_set = trace_set;
  out.scheme = weights.scheme;
  out.vector.assign(store.dim(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Embedding& e = store.by_image(trace_set.member_ids[i]);
    if (e.vector.size() != out.vector.size())
      throw Error("aggregate: dimension mismatch for image '" + e.image_id + "'");
    const double w = weights.weights[i];
    for (std::size_t c = 0; c < out.vector.size(); ++c)
      out.vector[c] += w * e.vector[c];
  }
  return out;
}

}  // namespace facelr
