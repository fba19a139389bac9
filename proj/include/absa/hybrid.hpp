#pragma once

// Hybrid annotation: LLM-annotate a corpus, split it by annotation
// presence, select the unannotated sentences that sit close to the
// annotated ones in embedding space, extend labels with the dependency
// extractor there, and merge with LLM precedence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "absa/deprules.hpp"
#include "absa/error.hpp"
#include "absa/lexicons.hpp"
#include "absa/providers.hpp"
#include "absa/types.hpp"

namespace absa {

enum class SigmaMode { population, sample };

inline const char* to_string(SigmaMode m) {
  return m == SigmaMode::population ? "population" : "sample";
}

inline SigmaMode sigma_mode_from_string(const std::string& s) {
  if (s == "population") return SigmaMode::population;
  if (s == "sample") return SigmaMode::sample;
  throw ValidationError("unknown sigma mode \"" + s + "\"");
}

struct HybridConfig {
  double cf = 0.5;
  SigmaMode sigma_mode = SigmaMode::population;
};

// Similarity scores of the unannotated split against the mean annotated
// vector, plus the derived cutoff c_x = mu_y + sigma_y * cf.
struct SimilarityStats {
  std::vector<std::pair<std::string, double>> scores;  // one per sentence of Q, in Q order
  double mu_y = 0.0;
  double sigma_y = 0.0;
  double cf = 0.0;
  double c_x = 0.0;
};

inline std::vector<double> mean_vector(const std::vector<EmbeddingVector>& vectors) {
  if (vectors.empty()) {
    throw ValidationError("mean vector of an empty embedding set is undefined");
  }
  const std::size_t dim = vectors.front().values.size();
  std::vector<double> mean(dim, 0.0);
  for (const EmbeddingVector& v : vectors) {
    if (v.values.size() != dim) {
      throw ValidationError("embedding dimension mismatch at sentence " + v.sentence_id);
    }
    for (std::size_t i = 0; i < dim; ++i) mean[i] += v.values[i];
  }
  for (double& x : mean) x /= static_cast<double>(vectors.size());
  return mean;
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine similarity of vectors with different dimensions");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw ValidationError("cosine similarity of a zero vector is undefined");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline SimilarityStats compute_cutoff(std::vector<std::pair<std::string, double>> scores,
                                      double cf, SigmaMode sigma_mode) {
  if (scores.empty()) {
    throw ValidationError("cutoff over an empty similarity vector is undefined");
  }
  SimilarityStats stats;
  stats.scores = std::move(scores);
  stats.cf = cf;
  const auto n = static_cast<double>(stats.scores.size());
  double sum = 0.0;
  for (const auto& [id, y] : stats.scores) sum += y;
  stats.mu_y = sum / n;
  double ss = 0.0;
  for (const auto& [id, y] : stats.scores) {
    const double d = y - stats.mu_y;
    ss += d * d;
  }
  if (sigma_mode == SigmaMode::population) {
    stats.sigma_y = std::sqrt(ss / n);
  } else {
    stats.sigma_y = stats.scores.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  stats.c_x = stats.mu_y + stats.sigma_y * cf;
  return stats;
}

// M = sentences with at least one LLM annotation, Q = the rest; both keep
// corpus order.
inline std::pair<CorpusSplit, CorpusSplit> split_by_llm_annotations(const Corpus& corpus) {
  CorpusSplit m{SplitName::M, {}};
  CorpusSplit q{SplitName::Q, {}};
  for (const AnnotatedSentence& as : corpus) {
    const bool has_llm = std::any_of(as.annotations.begin(), as.annotations.end(),
                                     [](const AspectAnnotation& a) { return a.source == Source::llm; });
    (has_llm ? m : q).ids.push_back(as.sentence.id);
  }
  return {std::move(m), std::move(q)};
}

// S = members of Q whose similarity strictly exceeds c_x; ties go to R.
inline std::pair<CorpusSplit, CorpusSplit> select_similar_split(const SimilarityStats& stats) {
  CorpusSplit s{SplitName::S, {}};
  CorpusSplit r{SplitName::R, {}};
  for (const auto& [id, score] : stats.scores) {
    (score > stats.c_x ? s : r).ids.push_back(id);
  }
  return {std::move(s), std::move(r)};
}

struct MergeOutcome {
  AnnotatedSentence sentence;
  int dep_added = 0;
  int dep_dropped_overlap = 0;
};

// Adds each dependency term whose span shares no character with any LLM
// span; LLM annotations pass through unchanged. Output ordered by span,
// duplicate spans collapsed.
inline MergeOutcome merge_annotations(const AnnotatedSentence& sentence,
                                      const std::vector<AspectAnnotation>& dep_terms) {
  MergeOutcome out;
  out.sentence = sentence;
  auto overlaps_llm = [&](const AspectAnnotation& dep) {
    for (const AspectAnnotation& a : sentence.annotations) {
      if (a.source != Source::llm) continue;
      if (std::max(a.char_start, dep.char_start) < std::min(a.char_end, dep.char_end)) return true;
    }
    return false;
  };
  auto span_taken = [&](const AspectAnnotation& dep) {
    for (const AspectAnnotation& a : out.sentence.annotations) {
      if (a.char_start == dep.char_start && a.char_end == dep.char_end) return true;
    }
    return false;
  };
  for (const AspectAnnotation& dep : dep_terms) {
    if (overlaps_llm(dep)) {
      ++out.dep_dropped_overlap;
      continue;
    }
    if (span_taken(dep)) continue;
    out.sentence.annotations.push_back(dep);
    ++out.dep_added;
  }
  std::stable_sort(out.sentence.annotations.begin(), out.sentence.annotations.end(),
                   [](const AspectAnnotation& a, const AspectAnnotation& b) {
                     return std::tie(a.char_start, a.char_end) < std::tie(b.char_start, b.char_end);
                   });
  return out;
}

struct HybridReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t q = 0;
  std::size_t s = 0;
  std::size_t r = 0;
  double mu_y = 0.0;
  double sigma_y = 0.0;
  double cf = 0.0;
  double c_x = 0.0;
  int llm_rejects = 0;
  int dep_terms_added = 0;
  int dep_terms_dropped_overlap = 0;
};

inline nlohmann::ordered_json hybrid_report_json(const HybridReport& report) {
  nlohmann::ordered_json obj;
  obj["n"] = report.n;
  obj["m"] = report.m;
  obj["q"] = report.q;
  obj["s"] = report.s;
  obj["r"] = report.r;
  obj["mu_y"] = report.mu_y;
  obj["sigma_y"] = report.sigma_y;
  obj["cf"] = report.cf;
  obj["c_x"] = report.c_x;
  obj["llm_rejects"] = report.llm_rejects;
  obj["dep_terms_added"] = report.dep_terms_added;
  obj["dep_terms_dropped_overlap"] = report.dep_terms_dropped_overlap;
  return obj;
}

struct HybridResult {
  Corpus corpus;
  HybridReport report;
  std::vector<RejectRecord> llm_rejects;
};

// LLM annotations and embeddings for a corpus, computed once and reusable
// across cutoff values (the expensive stages do not depend on cf).
struct HybridInputs {
  Corpus llm_annotated;  // corpus order, with llm annotations
  std::vector<RejectRecord> llm_rejects;
  std::vector<std::size_t> m_index;  // positions of M within the corpus
  std::vector<std::size_t> q_index;
  std::vector<double> mu_m;
  std::vector<EmbeddingVector> q_embeddings;  // aligned with q_index
};

inline HybridInputs prepare_hybrid_inputs(const std::vector<ParsedSentence>& corpus,
                                          Backend& llm_backend, Backend& embed_backend,
                                          const ProviderConfig& provider_config,
                                          const std::optional<std::filesystem::path>& embed_cache) {
  HybridInputs inputs;

  AteAnnotationResult ate;
  try {
    ate = annotate_ate(corpus, llm_backend, provider_config);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("hybrid stage llm-annotate: ") + e.what());
  } catch (const IoError& e) {
    throw IoError(std::string("hybrid stage llm-annotate: ") + e.what());
  }
  inputs.llm_annotated = std::move(ate.corpus);
  inputs.llm_rejects = std::move(ate.rejects);

  for (std::size_t i = 0; i < inputs.llm_annotated.size(); ++i) {
    const auto& anns = inputs.llm_annotated[i].annotations;
    const bool has_llm = std::any_of(anns.begin(), anns.end(), [](const AspectAnnotation& a) {
      return a.source == Source::llm;
    });
    (has_llm ? inputs.m_index : inputs.q_index).push_back(i);
  }
  if (inputs.m_index.empty()) {
    throw ValidationError(
        "hybrid stage split: the LLM produced zero annotations corpus-wide, so the annotated "
        "split M is empty and no mean vector exists");
  }
  if (inputs.q_index.empty()) return inputs;  // everything annotated; no extension targets

  std::vector<EmbeddingVector> all;
  try {
    all = embed(corpus, embed_backend, provider_config, embed_cache);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("hybrid stage embed: ") + e.what());
  } catch (const IoError& e) {
    throw IoError(std::string("hybrid stage embed: ") + e.what());
  }

  std::vector<EmbeddingVector> m_vectors;
  m_vectors.reserve(inputs.m_index.size());
  for (std::size_t i : inputs.m_index) m_vectors.push_back(all[i]);
  inputs.mu_m = mean_vector(m_vectors);

  inputs.q_embeddings.reserve(inputs.q_index.size());
  for (std::size_t i : inputs.q_index) inputs.q_embeddings.push_back(std::move(all[i]));
  return inputs;
}

namespace detail {

inline double norm_squared(std::span<const double> v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  return n;
}

}  // namespace detail

// Cutoff-dependent tail of the pipeline; cheap enough to rerun per cf.
inline HybridResult hybrid_from_inputs(const HybridInputs& inputs, const RuleConfig& rule_config,
                                       const Lexicons& lexicons, const HybridConfig& hybrid_config) {
  HybridResult result;
  result.llm_rejects = inputs.llm_rejects;
  result.report.n = inputs.llm_annotated.size();
  result.report.m = inputs.m_index.size();
  result.report.q = inputs.q_index.size();
  result.report.cf = hybrid_config.cf;
  result.report.llm_rejects = static_cast<int>(inputs.llm_rejects.size());

  std::vector<bool> in_s(inputs.llm_annotated.size(), false);
  if (!inputs.q_index.empty()) {
    if (detail::norm_squared(inputs.mu_m) == 0.0) {
      throw ValidationError("hybrid stage similarity: mean vector of split M is all-zero");
    }
    std::vector<std::pair<std::string, double>> scores;
    scores.reserve(inputs.q_index.size());
    for (std::size_t k = 0; k < inputs.q_index.size(); ++k) {
      const EmbeddingVector& v = inputs.q_embeddings[k];
      if (detail::norm_squared(v.values) == 0.0) {
        throw ValidationError("hybrid stage similarity: embedding of sentence " + v.sentence_id +
                              " is all-zero");
      }
      scores.emplace_back(v.sentence_id, cosine_similarity(v.values, inputs.mu_m));
    }
    const SimilarityStats stats =
        compute_cutoff(std::move(scores), hybrid_config.cf, hybrid_config.sigma_mode);
    result.report.mu_y = stats.mu_y;
    result.report.sigma_y = stats.sigma_y;
    result.report.c_x = stats.c_x;
    for (std::size_t k = 0; k < inputs.q_index.size(); ++k) {
      if (stats.scores[k].second > stats.c_x) in_s[inputs.q_index[k]] = true;
    }
  }

  std::vector<bool> in_m(inputs.llm_annotated.size(), false);
  for (std::size_t i : inputs.m_index) in_m[i] = true;

  result.corpus.reserve(inputs.llm_annotated.size());
  for (std::size_t i = 0; i < inputs.llm_annotated.size(); ++i) {
    const AnnotatedSentence& as = inputs.llm_annotated[i];
    if (in_m[i] || in_s[i]) {
      const auto dep_terms = extract_dep_terms(as.sentence, rule_config, lexicons);
      MergeOutcome merged = merge_annotations(as, dep_terms);
      merged.sentence.split = in_m[i] ? SplitName::M : SplitName::S;
      result.report.dep_terms_added += merged.dep_added;
      result.report.dep_terms_dropped_overlap += merged.dep_dropped_overlap;
      if (in_s[i]) result.report.s += 1;
      result.corpus.push_back(std::move(merged.sentence));
    } else {
      AnnotatedSentence untouched = as;
      untouched.split = SplitName::R;
      result.report.r += 1;
      result.corpus.push_back(std::move(untouched));
    }
  }

  if (result.report.m + result.report.s + result.report.r != result.report.n) {
    throw std::logic_error("hybrid split algebra violated: |M| + |S| + |R| != |N|");
  }
  return result;
}

// Full pipeline: llm annotate -> split (M, Q) -> embed -> mean vector ->
// similarity scores -> cutoff -> (S, R) -> dependency extraction over
// S and M -> merge with LLM precedence -> merged corpus plus run report.
inline HybridResult hybrid_annotate(const std::vector<ParsedSentence>& corpus, Backend& llm_backend,
                                    Backend& embed_backend, const ProviderConfig& provider_config,
                                    const std::optional<std::filesystem::path>& embed_cache,
                                    const RuleConfig& rule_config, const Lexicons& lexicons,
                                    const HybridConfig& hybrid_config) {
  const HybridInputs inputs =
      prepare_hybrid_inputs(corpus, llm_backend, embed_backend, provider_config, embed_cache);
  return hybrid_from_inputs(inputs, rule_config, lexicons, hybrid_config);
}

}  // namespace absa
