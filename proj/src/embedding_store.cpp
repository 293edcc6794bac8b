#include "facelr/embedding_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "facelr/error.hpp"

namespace facelr {

namespace {

bool finite_positive_norm(const std::vector<double>& v) {
  double norm2 = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) return false;
    norm2 += x * x;
  }
  return norm2 > 0.0;
}

void check_quality(const std::optional<double>& q, const char* field,
                   const std::string& image_id) {
  if (!q) return;
  if (!std::isfinite(*q) || *q < 0.0 || *q > 1.0)
    throw Error("quality field '" + std::string(field) + "' of image '" +
                image_id + "' must lie in [0,1]");
}

}  // namespace

void EmbeddingStore::add(Embedding e) {
  if (e.image_id.empty()) throw Error("embedding has empty image id");
  if (e.subject_id.empty())
    throw Error("embedding '" + e.image_id + "' has empty subject id");
  if (e.vector.empty())
    throw Error("embedding '" + e.image_id + "' has an empty vector");
  if (!finite_positive_norm(e.vector))
    throw Error("embedding '" + e.image_id +
                "' has a zero-norm or non-finite vector");
  if (dim_ != 0 && e.vector.size() != dim_)
    throw Error("embedding '" + e.image_id + "' has dimension " +
                std::to_string(e.vector.size()) + ", store uses " +
                std::to_string(dim_));
  check_quality(e.quality_serfiq, "serfiq", e.image_id);
  check_quality(e.quality_cs, "cs", e.image_id);
  if (auto it = by_image_.find(e.image_id); it != by_image_.end()) {
    const Embedding& prev = embeddings_[it->second];
    if (prev.dataset_id == e.dataset_id)
      throw Error("duplicate image id '" + e.image_id + "' in dataset '" +
                  e.dataset_id + "'");
    throw Error("image id '" + e.image_id + "' already present from dataset '" +
                prev.dataset_id + "'; image ids must be unique across the store");
  }
  if (dim_ == 0) dim_ = e.vector.size();
  by_image_.emplace(e.image_id, embeddings_.size());
  by_subject_[e.subject_id].push_back(embeddings_.size());
  embeddings_.push_back(std::move(e));
}

const Embedding& EmbeddingStore::by_image(const std::string& image_id) const {
  const Embedding* e = find_image(image_id);
  if (!e) throw Error("unknown image id '" + image_id + "'");
  return *e;
}

const Embedding* EmbeddingStore::find_image(const std::string& image_id) const {
  auto it = by_image_.find(image_id);
  return it == by_image_.end() ? nullptr : &embeddings_[it->second];
}

std::size_t EmbeddingStore::index_of(const std::string& image_id) const {
  auto it = by_image_.find(image_id);
  if (it == by_image_.end()) throw Error("unknown image id '" + image_id + "'");
  return it->second;
}

std::vector<std::string> EmbeddingStore::subjects() const {
  std::vector<std::string> out;
  out.reserve(by_subject_.size());
  for (const auto& [subject, _] : by_subject_) out.push_back(subject);
  return out;
}

std::vector<std::size_t> EmbeddingStore::indices_of(
    const std::string& subject_id) const {
  auto it = by_subject_.find(subject_id);
  return it == by_subject_.end() ? std::vector<std::size_t>{} : it->second;
}

std::vector<std::size_t> EmbeddingStore::references_of(
    const std::string& subject_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i : indices_of(subject_id))
    if (embeddings_[i].role == Role::reference) out.push_back(i);
  return out;
}

std::vector<std::size_t> EmbeddingStore::traces_of(
    const std::string& subject_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i : indices_of(subject_id))
    if (embeddings_[i].role == Role::trace) out.push_back(i);
  return out;
}

std::int64_t parse_utc_time(const std::string& iso) {
  std::tm tm = {};
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char z = 0;
  if (std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%d%c", &y, &mo, &d, &h, &mi, &s,
                  &z) != 7 ||
      z != 'Z')
    throw Error("invalid UTC timestamp '" + iso +
                "' (expected YYYY-MM-DDThh:mm:ssZ)");
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
      mi > 59 || s < 0 || s > 60)
    throw Error("invalid UTC timestamp '" + iso + "'");
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return static_cast<std::int64_t>(timegm(&tm));
}

std::string format_utc_time(std::int64_t epoch_seconds) {
  std::time_t t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm = {};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

namespace {

Embedding parse_record(const nlohmann::json& j,
                       std::optional<std::size_t> expected_dim) {
  if (!j.is_object()) throw Error("record is not a JSON object");
  Embedding e;
  for (const char* field : {"dataset", "subject", "image", "role", "vector"})
    if (!j.contains(field))
      throw Error("missing required field '" + std::string(field) + "'");
  if (!j["dataset"].is_string() || !j["subject"].is_string() ||
      !j["image"].is_string())
    throw Error("dataset/subject/image must be strings");
  e.dataset_id = j["dataset"].get<std::string>();
  e.subject_id = j["subject"].get<std::string>();
  e.image_id = j["image"].get<std::string>();
  const std::string role = j["role"].is_string() ? j["role"].get<std::string>() : "";
  if (role == "reference")
    e.role = Role::reference;
  else if (role == "trace")
    e.role = Role::trace;
  else
    throw Error("image '" + e.image_id + "': role must be 'reference' or 'trace'");
  if (!j["vector"].is_array() || j["vector"].empty())
    throw Error("image '" + e.image_id + "': vector must be a non-empty array");
  e.vector.reserve(j["vector"].size());
  for (const auto& x : j["vector"]) {
    if (!x.is_number())
      throw Error("image '" + e.image_id + "': vector entries must be numbers");
    e.vector.push_back(x.get<double>());
  }
  if (expected_dim && e.vector.size() != *expected_dim)
    throw Error("image '" + e.image_id + "': vector has dimension " +
                std::to_string(e.vector.size()) + ", expected " +
                std::to_string(*expected_dim));
  if (j.contains("serfiq") && !j["serfiq"].is_null()) {
    if (!j["serfiq"].is_number())
      throw Error("image '" + e.image_id + "': serfiq must be a number or null");
    e.quality_serfiq = j["serfiq"].get<double>();
  }
  if (j.contains("cs") && !j["cs"].is_null()) {
    if (!j["cs"].is_number())
      throw Error("image '" + e.image_id + "': cs must be a number or null");
    e.quality_cs = j["cs"].get<double>();
  }
  if (j.contains("time") && !j["time"].is_null()) {
    if (!j["time"].is_string())
      throw Error("image '" + e.image_id + "': time must be a string or null");
    e.capture_time = parse_utc_time(j["time"].get<std::string>());
  }
  return e;
}

}  // namespace

EmbeddingStore ingest(const std::string& path,
                      std::optional<std::size_t> expected_dim,
                      IngestReport* report, bool skip_bad) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  EmbeddingStore store;
  IngestReport local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed record: ") + ex.what());
      }
      store.add(parse_record(j, expected_dim));
      ++local.accepted;
    } catch (const Error& ex) {
      const std::string msg =
          "line " + std::to_string(line_no) + ": " + ex.what();
      if (!skip_bad) throw Error("ingest " + path + ": " + msg);
      ++local.rejected;
      local.errors.push_back(msg);
    }
  }
  if (report) *report = std::move(local);
  return store;
}

void write_jsonl(const EmbeddingStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (const Embedding& e : store.all()) {
    nlohmann::ordered_json j;
    j["dataset"] = e.dataset_id;
    j["subject"] = e.subject_id;
    j["image"] = e.image_id;
    j["role"] = e.role == Role::reference ? "reference" : "trace";
    j["vector"] = e.vector;
    j["serfiq"] = e.quality_serfiq ? nlohmann::ordered_json(*e.quality_serfiq)
                                   : nlohmann::ordered_json(nullptr);
    j["cs"] = e.quality_cs ? nlohmann::ordered_json(*e.quality_cs)
                           : nlohmann::ordered_json(nullptr);
    j["time"] = e.capture_time
                    ? nlohmann::ordered_json(format_utc_time(*e.capture_time))
                    : nlohmann::ordered_json(nullptr);
    out << j.dump() << '\n';
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

const char* grouping_name(Grouping g) {
  switch (g) {
    case Grouping::per_image: return "per_image";
    case Grouping::per_subject_all: return "per_subject_all";
    case Grouping::per_group: return "per_group";
  }
  return "?";
}

std::optional<Grouping> parse_grouping(std::string_view name) {
  if (name == "per_image") return Grouping::per_image;
  if (name == "per_subject_all") return Grouping::per_subject_all;
  if (name == "per_group") return Grouping::per_group;
  return std::nullopt;
}

std::vector<ComparisonPair> enumerate_pairs(const EmbeddingStore& store,
                                            Grouping grouping,
                                            std::span<const TraceSet> groups) {
  // Every subject contributing traces needs at least one reference.
  for (const std::string& subject : store.subjects()) {
    if (!store.traces_of(subject).empty() &&
        store.references_of(subject).empty())
      throw Error("pair enumeration: subject '" + subject +
                  "' has trace images but no reference");
  }

  std::vector<TraceSet> sets;
  switch (grouping) {
    case Grouping::per_image:
      for (const Embedding& e : store.all())
        if (e.role == Role::trace)
          sets.push_back(TraceSet{e.subject_id, {e.image_id}, e.image_id});
      break;
    case Grouping::per_subject_all:
      for (const std::string& subject : store.subjects()) {
        TraceSet set{subject, {}, "all"};
        for (std::size_t i : store.traces_of(subject))
          set.member_ids.push_back(store.at(i).image_id);
        if (!set.member_ids.empty()) sets.push_back(std::move(set));
      }
      break;
    case Grouping::per_group:
      if (groups.empty())
        throw Error("pair enumeration: per_group requires trace-set groups "
                    "(compute encounters first)");
      sets.assign(groups.begin(), groups.end());
      break;
  }

  for (const TraceSet& set : sets) {
    if (set.member_ids.empty())
      throw Error("pair enumeration: empty trace set for subject '" +
                  set.subject_id + "'");
    std::set<std::string> uniq(set.member_ids.begin(), set.member_ids.end());
    if (uniq.size() != set.member_ids.size())
      throw Error("pair enumeration: duplicate member in trace set '" +
                  set.group_label + "' of subject '" + set.subject_id + "'");
    for (const std::string& id : set.member_ids)
      if (store.by_image(id).role != Role::trace)
        throw Error("pair enumeration: set member '" + id + "' is not a trace");
  }

  std::vector<ComparisonPair> pairs;
  for (const Embedding& e : store.all()) {
    if (e.role != Role::reference) continue;
    for (const TraceSet& set : sets) {
      pairs.push_back(ComparisonPair{
          e.image_id, set,
          e.subject_id == set.subject_id ? GroundTruth::same_source
                                         : GroundTruth::different_source});
    }
  }
  return pairs;
}

}  // namespace facelr
