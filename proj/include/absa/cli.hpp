#pragma once

// Subcommand implementations behind the command-line tool. Each stage
// reads and writes the JSONL interchange format so stages compose through
// files; every run echoes its resolved configuration next to its outputs.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error.

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "absa/corpus.hpp"
#include "absa/deprules.hpp"
#include "absa/error.hpp"
#include "absa/eval.hpp"
#include "absa/hybrid.hpp"
#include "absa/io.hpp"
#include "absa/lexicons.hpp"
#include "absa/providers.hpp"
#include "absa/providers_wire.hpp"
#include "absa/types.hpp"

namespace absa {

struct RunConfig {
  // Corpus inputs.
  std::filesystem::path input;
  std::string format = "jsonl";  // conllu | semeval | jsonl
  std::optional<std::filesystem::path> parses;  // CoNLL-U to attach by sentence id
  std::optional<std::filesystem::path> gold;
  std::string gold_format = "jsonl";  // semeval | jsonl

  // Provider.
  std::string provider = "replay";  // wire | replay
  std::optional<std::filesystem::path> replay_file;
  std::optional<std::filesystem::path> embed_cache;
  ProviderConfig provider_config;

  // Dependency rules.
  std::optional<std::filesystem::path> rules;
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> lexicon_pos;
  std::optional<std::filesystem::path> lexicon_neg;

  // Hybrid + evaluation.
  HybridConfig hybrid;
  std::string task = "ate";  // ate | asc
  MatchMode match_mode = MatchMode::span;
  double grid_min = -2.0;
  double grid_max = 2.0;
  double grid_step = 0.25;

  std::filesystem::path out_dir = "out";
  long seed = 0;  // reserved; the current pipeline is deterministic
};

namespace detail {

inline nlohmann::ordered_json run_config_json(const RunConfig& c) {
  auto path_or_null = [](const std::optional<std::filesystem::path>& p) {
    return p ? nlohmann::ordered_json(p->string()) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json obj;
  obj["input"] = c.input.string();
  obj["format"] = c.format;
  obj["parses"] = path_or_null(c.parses);
  obj["gold"] = path_or_null(c.gold);
  obj["gold_format"] = c.gold_format;
  obj["provider"] = c.provider;
  obj["replay_file"] = path_or_null(c.replay_file);
  obj["embed_cache"] = path_or_null(c.embed_cache);
  obj["endpoint"] = c.provider_config.endpoint;
  obj["model"] = c.provider_config.model;
  obj["api_key_env"] = c.provider_config.api_key_env;
  obj["max_in_flight"] = c.provider_config.max_in_flight;
  obj["timeout_seconds"] = c.provider_config.timeout_seconds;
  obj["retries"] = c.provider_config.retries;
  obj["backoff_base_seconds"] = c.provider_config.backoff_base_seconds;
  obj["eos_marker"] = c.provider_config.eos_marker;
  obj["rules"] = path_or_null(c.rules);
  obj["stopwords"] = path_or_null(c.stopwords);
  obj["lexicon_pos"] = path_or_null(c.lexicon_pos);
  obj["lexicon_neg"] = path_or_null(c.lexicon_neg);
  obj["cf"] = c.hybrid.cf;
  obj["sigma"] = to_string(c.hybrid.sigma_mode);
  obj["task"] = c.task;
  obj["match_mode"] = to_string(c.match_mode);
  obj["cf_grid"] = {{"min", c.grid_min}, {"max", c.grid_max}, {"step", c.grid_step}};
  obj["out"] = c.out_dir.string();
  obj["seed"] = c.seed;
  return obj;
}

inline void require_exists(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::exists(path)) {
    throw IoError(std::string(what) + " does not exist: " + path.string());
  }
}

inline Corpus load_corpus_file(const std::filesystem::path& path, const std::string& format) {
  require_exists(path, "input file");
  const std::string content = slurp_file(path);
  if (format == "conllu") return corpus_from_parses(parse_conllu(content));
  if (format == "semeval") return parse_semeval_xml(content);
  if (format == "jsonl") return read_jsonl(content);
  throw ValidationError("unknown corpus format \"" + format + "\"");
}

inline Corpus load_input_corpus(const RunConfig& config) {
  Corpus corpus = load_corpus_file(config.input, config.format);
  if (config.parses) {
    if (config.format == "conllu") {
      throw ValidationError("--parses cannot be combined with a conllu input, which already "
                            "carries its own parses");
    }
    require_exists(*config.parses, "parses file");
    corpus = attach_parses(corpus, parse_conllu(slurp_file(*config.parses)));
  }
  return corpus;
}

inline std::vector<ParsedSentence> parsed_sentences(const Corpus& corpus) {
  std::vector<ParsedSentence> out;
  out.reserve(corpus.size());
  for (const AnnotatedSentence& as : corpus) out.push_back(as.sentence);
  return out;
}

inline void require_tokens(const Corpus& corpus) {
  std::string missing;
  for (const AnnotatedSentence& as : corpus) {
    if (as.sentence.tokens.empty()) {
      if (!missing.empty()) missing += ", ";
      missing += as.sentence.id;
    }
  }
  if (!missing.empty()) {
    throw ValidationError("sentences without dependency parses (attach one via --parses or use a "
                          "parsed input): " + missing);
  }
}

inline Lexicons load_lexicons(const RunConfig& config) {
  Lexicons lex = Lexicons::builtin();
  if (config.stopwords) {
    require_exists(*config.stopwords, "stopword list");
    load_stopwords(lex, *config.stopwords);
  }
  if (config.lexicon_pos || config.lexicon_neg) {
    if (!config.lexicon_pos || !config.lexicon_neg) {
      throw ValidationError("--lexicon-pos and --lexicon-neg must be given together");
    }
    require_exists(*config.lexicon_pos, "positive opinion lexicon");
    require_exists(*config.lexicon_neg, "negative opinion lexicon");
    load_opinion_words(lex, *config.lexicon_pos, *config.lexicon_neg);
  }
  return lex;
}

inline RuleConfig load_rules(const RunConfig& config) {
  if (!config.rules) return RuleConfig{};
  require_exists(*config.rules, "rule config");
  return load_rule_config(*config.rules);
}

inline std::unique_ptr<Backend> make_backend(const RunConfig& config) {
  if (config.provider == "replay") {
    if (!config.replay_file) {
      throw ValidationError("provider \"replay\" requires --replay-file");
    }
    require_exists(*config.replay_file, "replay file");
    return std::make_unique<ReplayBackend>(*config.replay_file);
  }
  if (config.provider == "wire") {
    ProviderConfig pc = config.provider_config;
    if (const char* base = std::getenv("ABSA_API_BASE"); base && *base) pc.endpoint = base;
    return std::make_unique<WireBackend>(pc);
  }
  throw ValidationError("unknown provider \"" + config.provider + "\"");
}

inline void prepare_out_dir(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + config.out_dir.string() + ": " +
                  ec.message());
  }
  spill_file(config.out_dir / "run_config.json", run_config_json(config).dump(2) + "\n");
}

inline std::vector<double> cf_grid(const RunConfig& config) {
  if (config.grid_step <= 0.0) throw ValidationError("--cf-grid step must be positive");
  if (config.grid_max < config.grid_min) {
    throw ValidationError("--cf-grid max must not be below min");
  }
  const auto steps =
      static_cast<long>((config.grid_max - config.grid_min) / config.grid_step + 1e-9);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + 1);
  for (long i = 0; i <= steps; ++i) {
    grid.push_back(config.grid_min + static_cast<double>(i) * config.grid_step);
  }
  return grid;
}

// File names every subcommand writes under --out.
inline constexpr const char* kCorpusFile = "corpus.jsonl";
inline constexpr const char* kRejectsFile = "rejects.jsonl";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kSweepCsvFile = "sweep.csv";
inline constexpr const char* kTrainingFile = "training.jsonl";

}  // namespace detail

inline void cmd_annotate_dep(const RunConfig& config) {
  detail::prepare_out_dir(config);
  const Lexicons lexicons = detail::load_lexicons(config);
  const RuleConfig rules = detail::load_rules(config);
  Corpus corpus = detail::load_input_corpus(config);
  detail::require_tokens(corpus);
  for (AnnotatedSentence& as : corpus) {
    as.annotations = extract_dep_terms(as.sentence, rules, lexicons);
  }
  spill_file(config.out_dir / detail::kCorpusFile, write_jsonl(corpus));
}

inline void cmd_annotate_llm(const RunConfig& config) {
  detail::prepare_out_dir(config);
  const Corpus input = detail::load_input_corpus(config);
  const auto backend = detail::make_backend(config);
  const AteAnnotationResult result =
      annotate_ate(detail::parsed_sentences(input), *backend, config.provider_config);
  spill_file(config.out_dir / detail::kCorpusFile, write_jsonl(result.corpus));
  spill_file(config.out_dir / detail::kRejectsFile, rejects_jsonl(result.rejects));
}

inline void cmd_annotate_asc(const RunConfig& config) {
  detail::prepare_out_dir(config);
  const Corpus input = detail::load_input_corpus(config);
  const auto backend = detail::make_backend(config);
  const AscAnnotationResult result = annotate_asc(input, *backend, config.provider_config);
  spill_file(config.out_dir / detail::kCorpusFile, write_jsonl(result.corpus));
  spill_file(config.out_dir / detail::kRejectsFile, rejects_jsonl(result.rejects));
}

inline void cmd_annotate_hybrid(const RunConfig& config) {
  detail::prepare_out_dir(config);
  const Lexicons lexicons = detail::load_lexicons(config);
  const RuleConfig rules = detail::load_rules(config);
  const Corpus input = detail::load_input_corpus(config);
  detail::require_tokens(input);
  const auto backend = detail::make_backend(config);
  const HybridResult result =
      hybrid_annotate(detail::parsed_sentences(input), *backend, *backend,
                      config.provider_config, config.embed_cache, rules, lexicons, config.hybrid);
  spill_file(config.out_dir / detail::kCorpusFile, write_jsonl(result.corpus));
  spill_file(config.out_dir / detail::kReportFile, hybrid_report_json(result.report).dump(2) + "\n");
  spill_file(config.out_dir / detail::kRejectsFile, rejects_jsonl(result.llm_rejects));
}

inline void cmd_evaluate(const RunConfig& config, std::ostream& out = std::cout) {
  detail::prepare_out_dir(config);
  if (!config.gold) throw ValidationError("evaluate requires --gold");
  detail::require_exists(*config.gold, "gold file");
  const Corpus predicted = detail::load_input_corpus(config);
  const Corpus gold = detail::load_corpus_file(*config.gold, config.gold_format);
  if (config.task == "ate") {
    const AteEvalReport report = evaluate_ate(predicted, gold, config.match_mode);
    spill_file(config.out_dir / "ate_report.json", ate_report_json(report).dump(2) + "\n");
    out << "ate " << to_string(report.match_mode) << " precision=" << report.precision
        << " recall=" << report.recall << " f1=" << report.f1 << "\n";
  } else if (config.task == "asc") {
    const AscEvalReport report = evaluate_asc(predicted, gold);
    spill_file(config.out_dir / "asc_report.json", asc_report_json(report).dump(2) + "\n");
    out << "asc macro_precision=" << report.macro_precision
        << " macro_recall=" << report.macro_recall << " macro_f1=" << report.macro_f1 << "\n";
  } else {
    throw ValidationError("unknown task \"" + config.task + "\" (expected ate or asc)");
  }
}

inline void cmd_sweep_cf(const RunConfig& config) {
  detail::prepare_out_dir(config);
  if (!config.gold) throw ValidationError("sweep-cf requires --gold");
  detail::require_exists(*config.gold, "gold file");
  const Lexicons lexicons = detail::load_lexicons(config);
  const RuleConfig rules = detail::load_rules(config);
  const Corpus input = detail::load_input_corpus(config);
  detail::require_tokens(input);
  const Corpus gold = detail::load_corpus_file(*config.gold, config.gold_format);
  const auto backend = detail::make_backend(config);
  const HybridInputs inputs =
      prepare_hybrid_inputs(detail::parsed_sentences(input), *backend, *backend,
                            config.provider_config, config.embed_cache);
  const auto rows = sweep_cf(inputs, rules, lexicons, config.hybrid, gold, config.match_mode,
                             detail::cf_grid(config));
  spill_file(config.out_dir / detail::kSweepCsvFile, sweep_csv(rows));
  for (const SweepRow& row : rows) {
    char name[64];
    std::snprintf(name, sizeof(name), "report_cf_%g.json", row.cf);
    spill_file(config.out_dir / name, hybrid_report_json(row.report).dump(2) + "\n");
  }
}

inline void cmd_export_training(const RunConfig& config, std::ostream& out = std::cout) {
  detail::prepare_out_dir(config);
  const Corpus corpus = detail::load_input_corpus(config);
  const Task task = task_from_string(config.task);
  const ExportResult result = export_training_pairs(corpus, task, config.provider_config);
  spill_file(config.out_dir / detail::kTrainingFile, training_pairs_jsonl(result.pairs));
  out << "exported " << result.pairs.size() << " pairs";
  if (task == Task::asc) {
    out << " (skipped " << result.skipped_missing_polarity << " without polarity, "
        << result.skipped_conflict << " conflict)";
  }
  out << "\n";
}

// Dispatches a subcommand and maps exceptions onto the exit-code contract.
inline int run_cli_command(const std::string& command, const RunConfig& config,
                           std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    if (command == "annotate-dep") cmd_annotate_dep(config);
    else if (command == "annotate-llm") cmd_annotate_llm(config);
    else if (command == "annotate-asc") cmd_annotate_asc(config);
    else if (command == "annotate-hybrid") cmd_annotate_hybrid(config);
    else if (command == "evaluate") cmd_evaluate(config, out);
    else if (command == "sweep-cf") cmd_sweep_cf(config);
    else if (command == "export-training") cmd_export_training(config, out);
    else throw ValidationError("unknown command \"" + command + "\"");
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace absa
