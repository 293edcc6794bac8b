#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facelr/embedding_store.hpp"
#include "facelr/scoring.hpp"

namespace facelr {

// Maximal time-contiguous group of one subject's traces; a new encounter
// starts when the gap to the previous capture exceeds the threshold.
struct Encounter {
  std::string subject_id;
  std::vector<std::string> member_ids;  // time-ordered
  std::int64_t start_time = 0;
  std::int64_t end_time = 0;
};

struct Reassignment {
  std::string image_id;
  std::string old_subject;
  std::string new_subject;
};

struct CleaningReport {
  std::vector<Reassignment> reassigned;
  std::vector<std::string> discarded;
  std::size_t components = 0;
};

// Splits each subject's traces at gaps > threshold_seconds (chaining rule).
// Every trace needs a capture time unless single_group_fallback is set, in
// which case a subject with any untimed trace collapses to one encounter
// ordered by image id.
std::vector<Encounter> group_encounters(const EmbeddingStore& store,
                                        double threshold_seconds = 120.0,
                                        bool single_group_fallback = false);

// TraceSets with group_label = per-subject encounter index ("0", "1", ...).
std::vector<TraceSet> encounter_trace_sets(std::span<const Encounter> encounters);

// Best-combined-ranking reference pick among the subject's fully scored
// images: rank by serfiq descending plus cs ascending, smallest rank sum
// wins, ties broken by lexicographically smallest image id.
std::string select_reference(const EmbeddingStore& store,
                             const std::string& subject_id);

// Rebuilds the store with select_reference applied to every subject: the
// chosen image becomes the reference, everything else a trace.
EmbeddingStore apply_reference_selection(const EmbeddingStore& store);

// Adjacency lists (j > i only) of image pairs with cosine >= threshold.
std::vector<std::vector<std::uint32_t>> similarity_adjacency(
    const EmbeddingStore& store, double threshold, Exec exec = Exec::parallel);

// Connected components of the similarity graph; each component is relabeled
// to its plurality subject (ties discard the component), and components
// smaller than min_component are discarded. Idempotent on its own output.
std::pair<EmbeddingStore, CleaningReport> clean_identities(
    const EmbeddingStore& store, double edge_threshold = 0.5,
    std::size_t min_component = 2, Exec exec = Exec::parallel);

// Removes within-subject bitwise-duplicate vectors beyond the first in
// image-id order. Cross-subject duplicates are left to clean_identities.
std::pair<EmbeddingStore, std::vector<std::string>> dedupe(
    const EmbeddingStore& store);

}  // namespace facelr
