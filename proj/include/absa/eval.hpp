#pragma once

// Scoring: aspect-term extraction P/R/F1 under span or string matching,
// macro-averaged sentiment metrics with conflict exclusion, and the
// cutoff-fraction sweep.

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "absa/error.hpp"
#include "absa/hybrid.hpp"
#include "absa/types.hpp"
#include "absa/utf8.hpp"

namespace absa {

enum class MatchMode { span, string };

inline const char* to_string(MatchMode m) { return m == MatchMode::span ? "span" : "string"; }

inline MatchMode match_mode_from_string(const std::string& s) {
  if (s == "span") return MatchMode::span;
  if (s == "string") return MatchMode::string;
  throw ValidationError("unknown match mode \"" + s + "\"");
}

namespace detail {

// 0/0 is defined as 0 so degenerate corpora do not propagate NaN.
inline double safe_ratio(long num, long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline double f1_of(double precision, double recall) {
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

// Pairs predicted against gold items greedily, one-to-one. Items are
// matched by equality, so greedy pairing and optimal pairing coincide.
inline long multiset_overlap(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  long overlap = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++overlap;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return overlap;
}

inline std::vector<std::string> match_items(const AnnotatedSentence& as, MatchMode mode) {
  std::vector<std::string> items;
  items.reserve(as.annotations.size());
  for (const AspectAnnotation& a : as.annotations) {
    if (mode == MatchMode::span) {
      items.push_back(std::to_string(a.char_start) + ":" + std::to_string(a.char_end));
    } else {
      items.push_back(utf8::ascii_lower(a.term));
    }
  }
  return items;
}

// Index corpora by sentence id, requiring the two id sets to coincide.
inline std::map<std::string, const AnnotatedSentence*> index_by_id(const Corpus& corpus,
                                                                   const char* which) {
  std::map<std::string, const AnnotatedSentence*> index;
  for (const AnnotatedSentence& as : corpus) {
    if (!index.emplace(as.sentence.id, &as).second) {
      throw ValidationError(std::string(which) + " corpus has duplicate sentence id " +
                            as.sentence.id);
    }
  }
  return index;
}

inline void check_same_ids(const std::map<std::string, const AnnotatedSentence*>& pred,
                           const std::map<std::string, const AnnotatedSentence*>& gold) {
  std::string only_pred;
  std::string only_gold;
  for (const auto& [id, as] : pred) {
    if (!gold.contains(id)) only_pred += only_pred.empty() ? id : ", " + id;
  }
  for (const auto& [id, as] : gold) {
    if (!pred.contains(id)) only_gold += only_gold.empty() ? id : ", " + id;
  }
  if (!only_pred.empty() || !only_gold.empty()) {
    std::string msg = "sentence id mismatch between corpora";
    if (!only_pred.empty()) msg += "; only in predictions: " + only_pred;
    if (!only_gold.empty()) msg += "; only in gold: " + only_gold;
    throw ValidationError(msg);
  }
}

}  // namespace detail

struct SentenceCounts {
  std::string id;
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

struct AteEvalReport {
  MatchMode match_mode = MatchMode::span;
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<std::vector<SentenceCounts>> per_sentence;
};

inline nlohmann::ordered_json ate_report_json(const AteEvalReport& r) {
  nlohmann::ordered_json obj;
  obj["match_mode"] = to_string(r.match_mode);
  obj["tp"] = r.tp;
  obj["fp"] = r.fp;
  obj["fn"] = r.fn;
  obj["precision"] = r.precision;
  obj["recall"] = r.recall;
  obj["f1"] = r.f1;
  if (r.per_sentence) {
    auto rows = nlohmann::ordered_json::array();
    for (const SentenceCounts& s : *r.per_sentence) {
      rows.push_back({{"id", s.id}, {"tp", s.tp}, {"fp", s.fp}, {"fn", s.fn}});
    }
    obj["per_sentence"] = std::move(rows);
  }
  return obj;
}

inline AteEvalReport evaluate_ate(const Corpus& predicted, const Corpus& gold, MatchMode mode,
                                  bool with_per_sentence = false) {
  const auto pred_index = detail::index_by_id(predicted, "prediction");
  const auto gold_index = detail::index_by_id(gold, "gold");
  detail::check_same_ids(pred_index, gold_index);

  AteEvalReport report;
  report.match_mode = mode;
  if (with_per_sentence) report.per_sentence.emplace();
  for (const auto& [id, gold_sentence] : gold_index) {
    const auto pred_items = detail::match_items(*pred_index.at(id), mode);
    const auto gold_items = detail::match_items(*gold_sentence, mode);
    const long overlap = detail::multiset_overlap(pred_items, gold_items);
    const long fp = static_cast<long>(pred_items.size()) - overlap;
    const long fn = static_cast<long>(gold_items.size()) - overlap;
    report.tp += overlap;
    report.fp += fp;
    report.fn += fn;
    if (report.per_sentence) report.per_sentence->push_back({id, overlap, fp, fn});
  }
  report.precision = detail::safe_ratio(report.tp, report.tp + report.fp);
  report.recall = detail::safe_ratio(report.tp, report.tp + report.fn);
  report.f1 = detail::f1_of(report.precision, report.recall);
  return report;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct AscEvalReport {
  // Rows gold, columns predicted; class order positive, negative, neutral.
  std::array<std::array<long, 3>, 3> confusion{};
  std::array<ClassMetrics, 3> per_class{};
  std::array<long, 3> absent_by_class{};  // gold aspects with no usable prediction
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  long excluded_conflict = 0;
  long absent_predictions = 0;
};

inline nlohmann::ordered_json asc_report_json(const AscEvalReport& r) {
  static constexpr std::array<const char*, 3> kClasses{"positive", "negative", "neutral"};
  nlohmann::ordered_json obj;
  auto per_class = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < 3; ++c) {
    per_class[kClasses[c]] = {{"precision", r.per_class[c].precision},
                              {"recall", r.per_class[c].recall},
                              {"f1", r.per_class[c].f1}};
  }
  obj["per_class"] = std::move(per_class);
  obj["macro_precision"] = r.macro_precision;
  obj["macro_recall"] = r.macro_recall;
  obj["macro_f1"] = r.macro_f1;
  obj["confusion"] = r.confusion;
  obj["excluded_conflict"] = r.excluded_conflict;
  obj["absent_predictions"] = r.absent_predictions;
  return obj;
}

namespace detail {

inline int class_index(Polarity p) {
  switch (p) {
    case Polarity::positive: return 0;
    case Polarity::negative: return 1;
    case Polarity::neutral: return 2;
    case Polarity::conflict: break;
  }
  return -1;
}

}  // namespace detail

// Gold conflict aspects are excluded and counted; a gold aspect without a
// usable prediction costs recall for its class but no precision anywhere.
inline AscEvalReport evaluate_asc(const Corpus& predicted, const Corpus& gold) {
  const auto pred_index = detail::index_by_id(predicted, "prediction");
  const auto gold_index = detail::index_by_id(gold, "gold");
  detail::check_same_ids(pred_index, gold_index);

  AscEvalReport report;
  for (const auto& [id, gold_sentence] : gold_index) {
    const AnnotatedSentence& pred_sentence = *pred_index.at(id);

    // The task presumes gold terms as input, so a prediction span that is
    // not a gold span means misaligned corpora.
    for (const AspectAnnotation& p : pred_sentence.annotations) {
      const bool known = std::any_of(gold_sentence->annotations.begin(),
                                     gold_sentence->annotations.end(),
                                     [&](const AspectAnnotation& g) {
                                       return g.char_start == p.char_start &&
                                              g.char_end == p.char_end;
                                     });
      if (!known) {
        throw ValidationError("sentence " + id + ": prediction span [" +
                              std::to_string(p.char_start) + ", " + std::to_string(p.char_end) +
                              ") does not correspond to any gold aspect");
      }
    }

    for (const AspectAnnotation& g : gold_sentence->annotations) {
      if (!g.polarity) {
        throw ValidationError("sentence " + id + ": gold aspect \"" + g.term +
                              "\" has no polarity");
      }
      if (*g.polarity == Polarity::conflict) {
        ++report.excluded_conflict;
        continue;
      }
      const int gold_class = detail::class_index(*g.polarity);
      const AspectAnnotation* match = nullptr;
      for (const AspectAnnotation& p : pred_sentence.annotations) {
        if (p.char_start == g.char_start && p.char_end == g.char_end) {
          match = &p;
          break;
        }
      }
      if (match == nullptr || !match->polarity ||
          *match->polarity == Polarity::conflict) {
        ++report.absent_predictions;
        ++report.absent_by_class[static_cast<std::size_t>(gold_class)];
        continue;
      }
      const int pred_class = detail::class_index(*match->polarity);
      ++report.confusion[static_cast<std::size_t>(gold_class)][static_cast<std::size_t>(pred_class)];
    }
  }

  for (std::size_t c = 0; c < 3; ++c) {
    long row = 0;
    long col = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      row += report.confusion[c][k];
      col += report.confusion[k][c];
    }
    const long tp = report.confusion[c][c];
    ClassMetrics& m = report.per_class[c];
    m.precision = detail::safe_ratio(tp, col);
    m.recall = detail::safe_ratio(tp, row + report.absent_by_class[c]);
    m.f1 = detail::f1_of(m.precision, m.recall);
    report.macro_precision += m.precision / 3.0;
    report.macro_recall += m.recall / 3.0;
    report.macro_f1 += m.f1 / 3.0;
  }
  return report;
}

// --- cutoff-fraction sweep ---------------------------------------------------

struct SweepRow {
  double cf = 0.0;
  std::size_t s_size = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  HybridReport report;
};

inline constexpr const char* kSweepCsvHeader = "cf,s_size,precision,recall,f1";

// Reruns the cutoff-dependent pipeline tail per grid value, reusing the
// LLM annotations and embeddings, and scores each merged corpus.
inline std::vector<SweepRow> sweep_cf(const HybridInputs& inputs, const RuleConfig& rule_config,
                                      const Lexicons& lexicons, HybridConfig hybrid_config,
                                      const Corpus& gold, MatchMode mode,
                                      std::vector<double> grid) {
  std::sort(grid.begin(), grid.end());
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double cf : grid) {
    hybrid_config.cf = cf;
    const HybridResult result = hybrid_from_inputs(inputs, rule_config, lexicons, hybrid_config);
    const AteEvalReport eval = evaluate_ate(result.corpus, gold, mode);
    SweepRow row;
    row.cf = cf;
    row.s_size = result.report.s;
    row.precision = eval.precision;
    row.recall = eval.recall;
    row.f1 = eval.f1;
    row.report = result.report;
    rows.push_back(row);
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  char buf[160];
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%g,%zu,%.6f,%.6f,%.6f", row.cf, row.s_size, row.precision,
                  row.recall, row.f1);
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace absa
