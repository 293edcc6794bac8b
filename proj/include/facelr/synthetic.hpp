#pragma once

#include <cstdint>
#include <string>

#include "facelr/embedding_store.hpp"

namespace facelr {

// Quality-dependent noise model: each identity has a unit mean direction;
// a trace of quality q gets isotropic gaussian noise of scale
// sigma(q) = noise_at_q0 + q * (noise_at_q1 - noise_at_q0), then is
// re-normalized. quality_serfiq = q, quality_cs = 1 - q.
struct SyntheticConfig {
  std::size_t dim = 128;
  std::size_t n_identities = 0;
  std::size_t traces_per_identity = 0;
  double noise_at_q1 = 0.0;  // scale at quality 1 (best images)
  double noise_at_q0 = 0.0;  // scale at quality 0 (worst), >= noise_at_q1
  std::uint64_t seed = 0;
  std::string dataset_id = "synthetic";
};

// Deterministic given the seed. References use the quality-1 noise scale and
// carry serfiq 1, cs 0; traces are timestamped 10 s apart per identity.
EmbeddingStore generate(const SyntheticConfig& config);

}  // namespace facelr
