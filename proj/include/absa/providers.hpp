#pragma once

// Pluggable annotation backends and the corpus-level operations built on
// them: aspect-term annotation, sentiment annotation, sentence embedding
// with a file cache, and training-pair export.
//
// The file-replay backend answers from recorded completions keyed by
// (sentence id, task, term) and makes every pipeline run deterministic;
// the wire backend lives in providers_wire.hpp.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "absa/error.hpp"
#include "absa/io.hpp"
#include "absa/prompts.hpp"
#include "absa/types.hpp"
#include "absa/utf8.hpp"

namespace absa {

enum class Task { ate, asc };

inline const char* to_string(Task t) { return t == Task::ate ? "ate" : "asc"; }

inline Task task_from_string(const std::string& s) {
  if (s == "ate") return Task::ate;
  if (s == "asc") return Task::asc;
  throw ValidationError("unknown task \"" + s + "\"");
}

struct ProviderConfig {
  std::string endpoint = "http://localhost:8080";
  std::string model = "absa-annotator";
  std::string api_key_env = "ABSA_API_KEY";
  int max_in_flight = 1;
  double timeout_seconds = 30.0;
  int retries = 2;
  double backoff_base_seconds = 0.25;
  std::string eos_marker = "</s>";

  void validate() const {
    if (max_in_flight < 1) throw ValidationError("provider config: max in-flight must be >= 1");
    if (retries < 0) throw ValidationError("provider config: retries must be >= 0");
  }
};

struct CompletionRequest {
  std::string sentence_id;
  Task task = Task::ate;
  std::optional<std::string> term;  // set for the sentiment task
  std::string prompt;
};

struct EmbeddingVector {
  std::string sentence_id;
  std::vector<double> values;
};

// Raised by the replay backend for an id the replay file does not cover;
// corpus-level operations collect these and report every missing id at once.
class ReplayMiss : public ValidationError {
 public:
  explicit ReplayMiss(const std::string& id)
      : ValidationError("replay file has no completion for sentence id " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string complete(const CompletionRequest& request) = 0;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& ids,
                                                 const std::vector<std::string>& texts) = 0;
  // Whether corpus operations may issue completions from several threads.
  virtual bool supports_concurrency() const { return false; }

  int completion_calls() const { return completion_calls_.load(); }
  int embedding_calls() const { return embedding_calls_.load(); }

 protected:
  std::atomic<int> completion_calls_{0};
  std::atomic<int> embedding_calls_{0};
};

// --- replay backend ---------------------------------------------------------

struct ReplayRecord {
  std::string id;
  Task task = Task::ate;
  std::optional<std::string> term;
  std::string completion;
};

inline std::vector<ReplayRecord> parse_replay_jsonl(std::istream& in) {
  std::vector<ReplayRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("replay line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      ReplayRecord r;
      r.id = obj.at("id").get<std::string>();
      r.task = task_from_string(obj.at("task").get<std::string>());
      if (!obj.at("term").is_null()) r.term = obj.at("term").get<std::string>();
      r.completion = obj.at("completion").get<std::string>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("replay line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

inline std::string replay_jsonl(const std::vector<ReplayRecord>& records) {
  std::string out;
  for (const ReplayRecord& r : records) {
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["task"] = to_string(r.task);
    obj["term"] = r.term ? nlohmann::ordered_json(*r.term) : nlohmann::ordered_json(nullptr);
    obj["completion"] = r.completion;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<ReplayRecord> read_replay_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open replay file: " + path.string());
  return parse_replay_jsonl(in);
}

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::vector<ReplayRecord> records) {
    for (ReplayRecord& r : records) {
      completions_[key(r.id, r.task, r.term)] = std::move(r.completion);
    }
  }

  explicit ReplayBackend(const std::filesystem::path& path)
      : ReplayBackend(read_replay_file(path)) {}

  std::string complete(const CompletionRequest& request) override {
    ++completion_calls_;
    const auto it = completions_.find(key(request.sentence_id, request.task, request.term));
    if (it == completions_.end()) throw ReplayMiss(request.sentence_id);
    return it->second;
  }

  std::vector<std::vector<double>> embed(const std::vector<std::string>& ids,
                                         const std::vector<std::string>&) override {
    ++embedding_calls_;
    std::string listed;
    for (const std::string& id : ids) {
      if (!listed.empty()) listed += ", ";
      listed += id;
    }
    throw ValidationError("replay backend has no embeddings; the embedding cache misses ids: " +
                          listed);
  }

 private:
  static std::string key(const std::string& id, Task task, const std::optional<std::string>& term) {
    return id + '\x1f' + to_string(task) + '\x1f' + term.value_or("");
  }

  std::map<std::string, std::string> completions_;
};

inline std::istringstream replay_stream(const std::vector<ReplayRecord>& records) {
  return std::istringstream(replay_jsonl(records));
}

// --- rejects report ----------------------------------------------------------

// A completion item the pipeline could not turn into an annotation: an
// aspect term that is not a substring of its sentence, or a sentiment
// string outside the three-class set. Never silently dropped.
struct RejectRecord {
  std::string id;
  Task task = Task::ate;
  std::optional<std::string> term;
  std::string content;
};

inline std::string rejects_jsonl(const std::vector<RejectRecord>& rejects) {
  std::string out;
  for (const RejectRecord& r : rejects) {
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["task"] = to_string(r.task);
    obj["term"] = r.term ? nlohmann::ordered_json(*r.term) : nlohmann::ordered_json(nullptr);
    obj["content"] = r.content;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

// --- shared machinery --------------------------------------------------------

namespace detail {

inline std::string trim(std::string s) {
  std::size_t begin = 0;
  while (begin < s.size() && (s[begin] == ' ' || s[begin] == '\t' || s[begin] == '\n' ||
                              s[begin] == '\r')) {
    ++begin;
  }
  std::size_t end = s.size();
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\n' ||
                         s[end - 1] == '\r')) {
    --end;
  }
  return s.substr(begin, end - begin);
}

// Runs fn(0..count) across up to max_in_flight threads. Exceptions are
// re-thrown by the lowest index so failures are deterministic.
template <typename Fn>
inline void for_each_index(std::size_t count, int max_in_flight, bool concurrent, Fn&& fn) {
  if (!concurrent || max_in_flight <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(max_in_flight, static_cast<int>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Leftmost case-insensitive occurrence of `needle` in `text`, both compared
// after ASCII folding; offsets in scalar values.
inline std::optional<std::pair<int, int>> find_ci(const std::u32string& text_lower,
                                                  const std::string& needle_lower) {
  const std::u32string needle = utf8::decode(needle_lower);
  if (needle.empty()) return std::nullopt;
  const auto pos = text_lower.find(needle);
  if (pos == std::u32string::npos) return std::nullopt;
  return std::make_pair(static_cast<int>(pos), static_cast<int>(pos + needle.size()));
}

}  // namespace detail

// --- aspect-term annotation --------------------------------------------------

struct AteAnnotationResult {
  Corpus corpus;
  std::vector<RejectRecord> rejects;
};

// Splits a completion on commas and locates each item in the sentence text.
// "none" (or an empty completion) is the no-aspect sentinel. Items that are
// not substrings of the text go to the rejects.
inline std::vector<AspectAnnotation> annotations_from_ate_completion(
    const ParsedSentence& sentence, const std::string& completion,
    std::vector<RejectRecord>& rejects) {
  std::vector<AspectAnnotation> annotations;
  const std::string whole = utf8::ascii_lower(detail::trim(completion));
  if (whole.empty() || whole == "none") return annotations;

  const std::u32string text = utf8::decode(sentence.text);
  const std::u32string text_lower = utf8::ascii_lower(text);

  std::size_t start = 0;
  while (start <= whole.size()) {
    const std::size_t comma = whole.find(',', start);
    const std::string item =
        detail::trim(whole.substr(start, comma == std::string::npos ? std::string::npos
                                                                    : comma - start));
    start = comma == std::string::npos ? whole.size() + 1 : comma + 1;
    if (item.empty()) continue;
    const auto span = detail::find_ci(text_lower, item);
    if (!span) {
      rejects.push_back({sentence.id, Task::ate, std::nullopt, item});
      continue;
    }
    AspectAnnotation ann;
    ann.char_start = span->first;
    ann.char_end = span->second;
    ann.term = utf8::encode(std::u32string_view(text).substr(
        static_cast<std::size_t>(span->first),
        static_cast<std::size_t>(span->second - span->first)));
    ann.source = Source::llm;
    annotations.push_back(std::move(ann));
  }

  std::sort(annotations.begin(), annotations.end(),
            [](const AspectAnnotation& a, const AspectAnnotation& b) {
              return std::tie(a.char_start, a.char_end) < std::tie(b.char_start, b.char_end);
            });
  annotations.erase(std::unique(annotations.begin(), annotations.end(),
                                [](const AspectAnnotation& a, const AspectAnnotation& b) {
                                  return a.char_start == b.char_start && a.char_end == b.char_end;
                                }),
                    annotations.end());
  return annotations;
}

inline AteAnnotationResult annotate_ate(const std::vector<ParsedSentence>& corpus,
                                        Backend& backend, const ProviderConfig& config) {
  config.validate();
  std::vector<std::string> completions(corpus.size());
  std::vector<std::optional<ReplayMiss>> misses(corpus.size());
  detail::for_each_index(corpus.size(), config.max_in_flight, backend.supports_concurrency(),
                         [&](std::size_t i) {
                           CompletionRequest request{corpus[i].id, Task::ate, std::nullopt,
                                                     render_ate_prompt(corpus[i]).rendered};
                           try {
                             completions[i] = backend.complete(request);
                           } catch (const ReplayMiss& m) {
                             misses[i] = m;
                           }
                         });

  std::string missing;
  for (const auto& m : misses) {
    if (!m) continue;
    if (!missing.empty()) missing += ", ";
    missing += m->id();
  }
  if (!missing.empty()) {
    throw ValidationError("replay file misses completions for sentence ids: " + missing);
  }

  AteAnnotationResult result;
  result.corpus.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    AnnotatedSentence as;
    as.sentence = corpus[i];
    as.annotations = annotations_from_ate_completion(corpus[i], completions[i], result.rejects);
    result.corpus.push_back(std::move(as));
  }
  return result;
}

// --- sentiment annotation ----------------------------------------------------

struct AscAnnotationResult {
  Corpus corpus;
  std::vector<RejectRecord> rejects;
};

// Normalization applied to sentiment completions before the three-class
// match: trim, drop trailing periods, lowercase.
inline std::string normalize_asc_completion(const std::string& completion) {
  std::string s = detail::trim(completion);
  while (!s.empty() && s.back() == '.') s.pop_back();
  return utf8::ascii_lower(detail::trim(std::move(s)));
}

inline AscAnnotationResult annotate_asc(const Corpus& corpus, Backend& backend,
                                        const ProviderConfig& config) {
  config.validate();
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t j = 0; j < corpus[i].annotations.size(); ++j) {
      if (corpus[i].annotations[j].term.empty()) {
        throw ValidationError("sentence " + corpus[i].sentence.id +
                              ": annotation without a term cannot be classified");
      }
      slots.emplace_back(i, j);
    }
  }

  std::vector<std::string> completions(slots.size());
  std::vector<std::optional<ReplayMiss>> misses(slots.size());
  detail::for_each_index(
      slots.size(), config.max_in_flight, backend.supports_concurrency(), [&](std::size_t k) {
        const auto [i, j] = slots[k];
        const std::string& term = corpus[i].annotations[j].term;
        CompletionRequest request{corpus[i].sentence.id, Task::asc, term,
                                  render_asc_prompt(corpus[i].sentence, term).rendered};
        try {
          completions[k] = backend.complete(request);
        } catch (const ReplayMiss& m) {
          misses[k] = m;
        }
      });

  std::string missing;
  for (const auto& m : misses) {
    if (!m) continue;
    if (!missing.empty()) missing += ", ";
    missing += m->id();
  }
  if (!missing.empty()) {
    throw ValidationError("replay file misses completions for sentence ids: " + missing);
  }

  AscAnnotationResult result;
  result.corpus = corpus;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto [i, j] = slots[k];
    AspectAnnotation& ann = result.corpus[i].annotations[j];
    const std::string normalized = normalize_asc_completion(completions[k]);
    if (normalized == "positive") {
      ann.polarity = Polarity::positive;
    } else if (normalized == "negative") {
      ann.polarity = Polarity::negative;
    } else if (normalized == "neutral") {
      ann.polarity = Polarity::neutral;
    } else {
      ann.polarity.reset();
      result.rejects.push_back({result.corpus[i].sentence.id, Task::asc, ann.term, completions[k]});
    }
  }
  return result;
}

// --- embeddings --------------------------------------------------------------

inline std::vector<EmbeddingVector> parse_embedding_cache(std::istream& in) {
  std::vector<EmbeddingVector> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      EmbeddingVector v;
      v.sentence_id = obj.at("id").get<std::string>();
      v.values = obj.at("vector").get<std::vector<double>>();
      entries.push_back(std::move(v));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("embedding cache line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return entries;
}

inline std::string embedding_cache_line(const EmbeddingVector& v) {
  nlohmann::ordered_json obj;
  obj["id"] = v.sentence_id;
  obj["vector"] = v.values;
  return obj.dump();
}

namespace detail {

inline void check_vector_components(const EmbeddingVector& v) {
  for (double x : v.values) {
    if (!std::isfinite(x)) {
      throw ValidationError("embedding for sentence " + v.sentence_id +
                            " contains a non-finite component");
    }
  }
}

}  // namespace detail

// One vector per sentence, in input order. Vectors already present in the
// cache file skip the backend; fresh vectors are appended to the cache.
inline std::vector<EmbeddingVector> embed(const std::vector<ParsedSentence>& corpus,
                                          Backend& backend, const ProviderConfig& config,
                                          const std::optional<std::filesystem::path>& cache_path) {
  config.validate();
  std::map<std::string, std::vector<double>> cached;
  if (cache_path && std::filesystem::exists(*cache_path)) {
    std::ifstream in(*cache_path);
    if (!in) throw IoError("cannot open embedding cache: " + cache_path->string());
    for (EmbeddingVector& v : parse_embedding_cache(in)) {
      cached[v.sentence_id] = std::move(v.values);
    }
  }

  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!cached.contains(corpus[i].id)) missing.push_back(i);
  }

  std::vector<EmbeddingVector> fresh;
  constexpr std::size_t kBatch = 64;
  for (std::size_t at = 0; at < missing.size(); at += kBatch) {
    const std::size_t n = std::min(kBatch, missing.size() - at);
    std::vector<std::string> ids(n);
    std::vector<std::string> texts(n);
    for (std::size_t k = 0; k < n; ++k) {
      ids[k] = corpus[missing[at + k]].id;
      texts[k] = corpus[missing[at + k]].text;
    }
    auto vectors = backend.embed(ids, texts);
    if (vectors.size() != n) {
      throw ValidationError("embedding backend returned " + std::to_string(vectors.size()) +
                            " vectors for " + std::to_string(n) + " inputs");
    }
    for (std::size_t k = 0; k < n; ++k) {
      fresh.push_back({ids[k], std::move(vectors[k])});
    }
  }

  for (const EmbeddingVector& v : fresh) cached[v.sentence_id] = v.values;

  std::vector<EmbeddingVector> out;
  out.reserve(corpus.size());
  std::size_t dim = 0;
  for (const ParsedSentence& s : corpus) {
    EmbeddingVector v{s.id, cached.at(s.id)};
    detail::check_vector_components(v);
    if (out.empty()) {
      dim = v.values.size();
    } else if (v.values.size() != dim) {
      throw ValidationError("embedding dimension mismatch: sentence " + s.id + " has " +
                            std::to_string(v.values.size()) + " components, expected " +
                            std::to_string(dim));
    }
    out.push_back(std::move(v));
  }

  if (cache_path && !fresh.empty()) {
    std::ofstream app(*cache_path, std::ios::binary | std::ios::app);
    if (!app) throw IoError("cannot open embedding cache for append: " + cache_path->string());
    for (const EmbeddingVector& v : fresh) app << embedding_cache_line(v) << '\n';
    if (!app) throw IoError("write failure on embedding cache: " + cache_path->string());
  }
  return out;
}

// --- training-pair export ----------------------------------------------------

struct TrainingPair {
  std::string input;
  std::string output;
};

struct ExportResult {
  std::vector<TrainingPair> pairs;
  int skipped_missing_polarity = 0;
  int skipped_conflict = 0;
};

// Text-to-text pairs for fine-tuning. The eos marker is appended to both
// sides here and only here. Sentences without aspect terms export the
// "none" sentinel, mirroring the comma-split applied when completions are
// parsed.
inline ExportResult export_training_pairs(const Corpus& corpus, Task task,
                                          const ProviderConfig& config) {
  ExportResult result;
  for (const AnnotatedSentence& as : corpus) {
    if (task == Task::ate) {
      auto sorted = as.annotations;
      std::sort(sorted.begin(), sorted.end(),
                [](const AspectAnnotation& a, const AspectAnnotation& b) {
                  return std::tie(a.char_start, a.char_end) < std::tie(b.char_start, b.char_end);
                });
      std::string target;
      for (const AspectAnnotation& a : sorted) {
        if (!target.empty()) target += ", ";
        target += a.term;
      }
      if (target.empty()) target = "none";
      result.pairs.push_back({render_ate_prompt(as.sentence).rendered + config.eos_marker,
                              target + config.eos_marker});
    } else {
      for (const AspectAnnotation& a : as.annotations) {
        if (!a.polarity) {
          ++result.skipped_missing_polarity;
          continue;
        }
        if (*a.polarity == Polarity::conflict) {
          ++result.skipped_conflict;
          continue;
        }
        result.pairs.push_back(
            {render_asc_prompt(as.sentence, a.term).rendered + config.eos_marker,
             std::string(to_string(*a.polarity)) + config.eos_marker});
      }
    }
  }
  return result;
}

inline std::string training_pairs_jsonl(const std::vector<TrainingPair>& pairs) {
  std::string out;
  for (const TrainingPair& p : pairs) {
    nlohmann::ordered_json obj;
    obj["input"] = p.input;
    obj["output"] = p.output;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

}  // namespace absa
