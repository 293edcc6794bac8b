#include "facelr/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "facelr/aggregation.hpp"
#include "facelr/error.hpp"

namespace facelr {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::baseline: return "baseline";
    case Strategy::avg_score: return "avg_score";
    case Strategy::max_score: return "max_score";
    case Strategy::avg_pool: return "avg_pool";
    case Strategy::cs_pool: return "cs_pool";
    case Strategy::serfiq_pool: return "serfiq_pool";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies)
    if (name == strategy_name(s)) return s;
  return std::nullopt;
}

double cosine_score(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error("cosine_score: dimension mismatch (" + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()) + ")");
  if (a.empty()) throw Error("cosine_score: empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) throw Error("cosine_score: zero-norm vector");
  const double s = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(s, -1.0, 1.0);
}

namespace {

// Quality scores for the set's members, in member order.
std::vector<double> collect_quality(const TraceSet& set,
                                    const EmbeddingStore& store,
                                    bool serfiq) {
  std::vector<double> scores;
  scores.reserve(set.member_ids.size());
  for (const std::string& id : set.member_ids) {
    const Embedding& e = store.by_image(id);
    const std::optional<double>& q = serfiq ? e.quality_serfiq : e.quality_cs;
    if (!q)
      throw Error(std::string("trace '") + id + "' is missing the " +
                  (serfiq ? "serfiq" : "cs") + " quality score");
    scores.push_back(*q);
  }
  return scores;
}

WeightVector strategy_weights(const TraceSet& set, const EmbeddingStore& store,
                              Strategy strategy, bool fallback_uniform) {
  try {
    switch (strategy) {
      case Strategy::avg_pool:
        return avg_weights(set.member_ids.size());
      case Strategy::serfiq_pool:
        return serfiq_weights(collect_quality(set, store, true));
      case Strategy::cs_pool:
        return cs_weights(collect_quality(set, store, false));
      default:
        throw Error("strategy_weights: not a pooling strategy");
    }
  } catch (const Error&) {
    if (fallback_uniform) return avg_weights(set.member_ids.size());
    throw;
  }
}

}  // namespace

ScoredPair score_pair(const ComparisonPair& pair, Strategy strategy,
                      const EmbeddingStore& store, bool fallback_uniform) {
  const Embedding& ref = store.by_image(pair.reference_id);
  const TraceSet& set = pair.trace_set;
  if (set.member_ids.empty())
    throw Error("score_pair: empty trace set for reference '" +
                pair.reference_id + "'");

  double score = 0.0;
  switch (strategy) {
    case Strategy::baseline: {
      if (set.member_ids.size() != 1)
        throw Error("baseline strategy requires singleton trace sets, got " +
                    std::to_string(set.member_ids.size()) + " members");
      score = cosine_score(ref.vector, store.by_image(set.member_ids[0]).vector);
      break;
    }
    case Strategy::avg_score:
    case Strategy::max_score: {
      double sum = 0.0, best = -2.0;
      for (const std::string& id : set.member_ids) {
        const double s = cosine_score(ref.vector, store.by_image(id).vector);
        sum += s;
        best = std::max(best, s);
      }
      score = strategy == Strategy::avg_score
                  ? sum / static_cast<double>(set.member_ids.size())
                  : best;
      break;
    }
    case Strategy::avg_pool:
    case Strategy::cs_pool:
    case Strategy::serfiq_pool: {
      const WeightVector w =
          strategy_weights(set, store, strategy, fallback_uniform);
      const AggregatedDescriptor agg = aggregate(set, w, store);
      score = cosine_score(ref.vector, agg.vector);
      break;
    }
  }

  return ScoredPair{pair.reference_id, set.group_label,  strategy,
                    score,             pair.ground_truth, ref.subject_id,
                    set.subject_id};
}

bool scored_pair_key_less(const ScoredPair& a, const ScoredPair& b) {
  return std::tie(a.reference_id, a.trace_subject, a.trace_group, a.strategy) <
         std::tie(b.reference_id, b.trace_subject, b.trace_group, b.strategy);
}

std::vector<ScoredPair> score_pairs(std::span<const ComparisonPair> pairs,
                                    Strategy strategy,
                                    const EmbeddingStore& store, Exec exec,
                                    bool fallback_uniform) {
  std::vector<ScoredPair> out(pairs.size());

  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < pairs.size(); ++i)
      out[i] = score_pair(pairs[i], strategy, store, fallback_uniform);
  } else {
    // Each pair is scored independently into its own slot, so the parallel
    // path is bitwise-identical to the serial one.
    std::atomic<bool> failed{false};
    std::string error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (failed.load(std::memory_order_relaxed)) continue;
      try {
        out[i] = score_pair(pairs[i], strategy, store, fallback_uniform);
      } catch (const std::exception& ex) {
#ifdef _OPENMP
#pragma omp critical
#endif
        {
          if (!failed.exchange(true)) error = ex.what();
        }
      }
    }
    if (failed.load()) throw Error(error);
  }

  std::stable_sort(out.begin(), out.end(), scored_pair_key_less);
  return out;
}

namespace {

bool needs_csv_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const std::string& s) {
  if (!needs_csv_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_scores_csv(const std::string& path,
                      std::span<const ScoredPair> rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "reference_id,trace_group,strategy,score,ground_truth,"
         "reference_subject,trace_subject\n";
  for (const ScoredPair& r : rows) {
    out << csv_field(r.reference_id) << ',' << csv_field(r.trace_group) << ','
        << strategy_name(r.strategy) << ',' << format_double(r.score) << ','
        << (r.ground_truth == GroundTruth::same_source ? "same_source"
                                                       : "different_source")
        << ',' << csv_field(r.reference_subject) << ','
        << csv_field(r.trace_subject) << '\n';
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<ScoredPair> read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("empty scores file '" + path + "'");
  const std::vector<std::string> header = split_csv_line(line);
  const std::vector<std::string> wanted = {
      "reference_id",  "trace_group",       "strategy",     "score",
      "ground_truth",  "reference_subject", "trace_subject"};
  std::vector<std::size_t> col(wanted.size());
  for (std::size_t w = 0; w < wanted.size(); ++w) {
    auto it = std::find(header.begin(), header.end(), wanted[w]);
    if (it == header.end())
      throw Error("scores file '" + path + "' is missing column '" +
                  wanted[w] + "'");
    col[w] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<ScoredPair> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() < header.size())
      throw Error(path + " line " + std::to_string(line_no) +
                  ": expected " + std::to_string(header.size()) + " fields");
    ScoredPair r;
    r.reference_id = f[col[0]];
    r.trace_group = f[col[1]];
    const auto strategy = parse_strategy(f[col[2]]);
    if (!strategy)
      throw Error(path + " line " + std::to_string(line_no) +
                  ": unknown strategy '" + f[col[2]] + "'");
    r.strategy = *strategy;
    char* end = nullptr;
    r.score = std::strtod(f[col[3]].c_str(), &end);
    if (end == f[col[3]].c_str() || !std::isfinite(r.score))
      throw Error(path + " line " + std::to_string(line_no) +
                  ": bad score '" + f[col[3]] + "'");
    if (f[col[4]] == "same_source")
      r.ground_truth = GroundTruth::same_source;
    else if (f[col[4]] == "different_source")
      r.ground_truth = GroundTruth::different_source;
    else
      throw Error(path + " line " + std::to_string(line_no) +
                  ": bad ground_truth '" + f[col[4]] + "'");
    r.reference_subject = f[col[5]];
    r.trace_subject = f[col[6]];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace facelr
