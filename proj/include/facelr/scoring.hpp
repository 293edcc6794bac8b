#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "facelr/embedding_store.hpp"

namespace facelr {

enum class Strategy { baseline, avg_score, max_score, avg_pool, cs_pool, serfiq_pool };

inline constexpr std::array<Strategy, 6> kAllStrategies = {
    Strategy::baseline, Strategy::avg_score,   Strategy::max_score,
    Strategy::avg_pool, Strategy::cs_pool, Strategy::serfiq_pool};

const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

// Serial keeps the reference implementation; parallel runs the OpenMP path.
// Both produce bitwise-identical results.
enum class Exec { serial, parallel };

// One reference-vs-traceset comparison with its raw score. The subject
// columns exist so downstream identity-aware cross-validation never has to
// re-derive identities from the store.
struct ScoredPair {
  std::string reference_id;
  std::string trace_group;
  Strategy strategy = Strategy::baseline;
  double score = 0.0;  // cosine, finite, in [-1, 1]
  GroundTruth ground_truth = GroundTruth::different_source;
  std::string reference_subject;
  std::string trace_subject;
};

// (a.b) / (||a|| ||b||), clamped to [-1, 1].
double cosine_score(std::span<const double> a, std::span<const double> b);

// baseline: cosine with the single trace (singleton sets only).
// avg_score / max_score: mean / maximum of per-trace cosines.
// *_pool: cosine between the reference and the scheme-weighted aggregate.
// fallback_uniform substitutes equal weights when quality inputs are
// degenerate (missing or zero-sum) instead of failing.
ScoredPair score_pair(const ComparisonPair& pair, Strategy strategy,
                      const EmbeddingStore& store,
                      bool fallback_uniform = false);

// Batch scoring; output sorted by (reference_id, trace_subject, trace_group,
// strategy) regardless of input order or execution mode.
std::vector<ScoredPair> score_pairs(std::span<const ComparisonPair> pairs,
                                    Strategy strategy,
                                    const EmbeddingStore& store,
                                    Exec exec = Exec::parallel,
                                    bool fallback_uniform = false);

bool scored_pair_key_less(const ScoredPair& a, const ScoredPair& b);

// CSV columns: reference_id, trace_group, strategy, score, ground_truth,
// reference_subject, trace_subject. Scores are written with enough digits to
// round-trip bit-exactly.
void write_scores_csv(const std::string& path, std::span<const ScoredPair> rows);
std::vector<ScoredPair> read_scores_csv(const std::string& path);

}  // namespace facelr
