#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace facelr {

enum class Role { reference, trace };

// One face image's descriptor plus identity/quality/time metadata.
struct Embedding {
  std::string dataset_id;
  std::string subject_id;
  std::string image_id;  // unique across the store
  Role role = Role::trace;
  std::vector<double> vector;
  std::optional<double> quality_serfiq;      // [0,1], higher is better
  std::optional<double> quality_cs;          // [0,1], lower is better
  std::optional<std::int64_t> capture_time;  // UTC epoch seconds
};

// Ordered pool of trace images belonging to one comparison.
struct TraceSet {
  std::string subject_id;
  std::vector<std::string> member_ids;
  std::string group_label;  // encounter index, single image id, or "all"
};

enum class GroundTruth { same_source, different_source };

struct ComparisonPair {
  std::string reference_id;
  TraceSet trace_set;
  GroundTruth ground_truth = GroundTruth::different_source;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<std::string> errors;  // one entry per rejected line
};

// Immutable after ingest; reads are re-entrant and safe to share across
// threads.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Validates all embedding invariants (finite entries, positive norm,
  // consistent dimension, unique image id) and throws Error on violation.
  void add(Embedding e);

  std::size_t size() const { return embeddings_.size(); }
  bool empty() const { return embeddings_.empty(); }
  std::size_t dim() const { return dim_; }  // 0 while empty

  const Embedding& at(std::size_t i) const { return embeddings_[i]; }
  std::span<const Embedding> all() const { return embeddings_; }

  const Embedding& by_image(const std::string& image_id) const;
  const Embedding* find_image(const std::string& image_id) const;
  std::size_t index_of(const std::string& image_id) const;

  // Sorted unique subject ids.
  std::vector<std::string> subjects() const;
  // Store-order indices of a subject's embeddings, optionally role-filtered.
  std::vector<std::size_t> indices_of(const std::string& subject_id) const;
  std::vector<std::size_t> references_of(const std::string& subject_id) const;
  std::vector<std::size_t> traces_of(const std::string& subject_id) const;

 private:
  std::vector<Embedding> embeddings_;
  std::unordered_map<std::string, std::size_t> by_image_;
  std::map<std::string, std::vector<std::size_t>> by_subject_;
  std::size_t dim_ = 0;
};

// Reads a JSON Lines file, one record per line:
//   {"dataset": str, "subject": str, "image": str,
//    "role": "reference"|"trace", "vector": [...],
//    "serfiq": num|null, "cs": num|null, "time": "YYYY-MM-DDThh:mm:ssZ"|null}
// Default mode throws on the first invalid record with its line number;
// skip_bad instead skips invalid records and reports them.
EmbeddingStore ingest(const std::string& path,
                      std::optional<std::size_t> expected_dim = {},
                      IngestReport* report = nullptr, bool skip_bad = false);

// Inverse of ingest; vector payloads round-trip bit-exactly.
void write_jsonl(const EmbeddingStore& store, const std::string& path);

enum class Grouping { per_image, per_subject_all, per_group };

const char* grouping_name(Grouping g);
std::optional<Grouping> parse_grouping(std::string_view name);

// Pairs every reference against every trace set of the chosen grouping.
// per_group requires the encounter-derived sets in `groups`.
std::vector<ComparisonPair> enumerate_pairs(const EmbeddingStore& store,
                                            Grouping grouping,
                                            std::span<const TraceSet> groups = {});

// "YYYY-MM-DDThh:mm:ssZ" <-> UTC epoch seconds.
std::int64_t parse_utc_time(const std::string& iso);
std::string format_utc_time(std::int64_t epoch_seconds);

}  // namespace facelr
