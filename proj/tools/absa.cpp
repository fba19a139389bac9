// Command-line front end for the annotation pipeline. Subcommands compose
// through JSONL files; see README.md for a walkthrough.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "absa/cli.hpp"

namespace {

// "min:max:step" for --cf-grid.
bool parse_grid(const std::string& spec, absa::RunConfig& config) {
  const auto first = spec.find(':');
  const auto second = spec.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos) return false;
  try {
    config.grid_min = std::stod(spec.substr(0, first));
    config.grid_max = std::stod(spec.substr(first + 1, second - first - 1));
    config.grid_step = std::stod(spec.substr(second + 1));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly-supervised aspect-based sentiment annotation pipeline"};
  app.require_subcommand(1);

  absa::RunConfig config;
  std::string sigma = "population";
  std::string match_mode = "span";
  std::string grid_spec;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--input", config.input, "Input corpus file")->required();
    cmd->add_option("--format", config.format, "Input format: conllu, semeval or jsonl")
        ->check(CLI::IsMember({"conllu", "semeval", "jsonl"}));
    cmd->add_option("--parses", config.parses,
                    "CoNLL-U file with dependency parses to attach by sentence id");
    cmd->add_option("--out", config.out_dir, "Output directory");
    cmd->add_option("--seed", config.seed, "Seed echoed into run_config.json (reserved)");
  };
  auto add_provider = [&](CLI::App* cmd) {
    cmd->add_option("--provider", config.provider, "Backend: wire or replay")
        ->check(CLI::IsMember({"wire", "replay"}));
    cmd->add_option("--replay-file", config.replay_file, "Recorded completions (JSONL)");
    cmd->add_option("--embed-cache", config.embed_cache, "Embedding cache file (JSONL)");
    cmd->add_option("--api-base", config.provider_config.endpoint,
                    "Wire endpoint base URL (env ABSA_API_BASE overrides)");
    cmd->add_option("--model", config.provider_config.model, "Wire model name");
    cmd->add_option("--api-key-env", config.provider_config.api_key_env,
                    "Environment variable holding the API key");
    cmd->add_option("--max-in-flight", config.provider_config.max_in_flight,
                    "Concurrent wire requests");
    cmd->add_option("--timeout", config.provider_config.timeout_seconds,
                    "Per-request timeout in seconds");
    cmd->add_option("--retries", config.provider_config.retries, "Retry count per request");
  };
  auto add_lexicons = [&](CLI::App* cmd) {
    cmd->add_option("--stopwords", config.stopwords, "Stopword list (one word per line)");
    cmd->add_option("--lexicon-pos", config.lexicon_pos, "Positive opinion word list");
    cmd->add_option("--lexicon-neg", config.lexicon_neg, "Negative opinion word list");
    cmd->add_option("--rules", config.rules, "Dependency rule config (JSON)");
  };
  auto add_hybrid = [&](CLI::App* cmd) {
    cmd->add_option("--cf", config.hybrid.cf, "Cutoff fraction");
    cmd->add_option("--sigma", sigma, "Standard deviation mode: population or sample")
        ->check(CLI::IsMember({"population", "sample"}));
  };

  CLI::App* dep = app.add_subcommand("annotate-dep", "Dependency-rule aspect-term annotation");
  add_common(dep);
  add_lexicons(dep);

  CLI::App* llm = app.add_subcommand("annotate-llm", "LLM aspect-term annotation");
  add_common(llm);
  add_provider(llm);

  CLI::App* asc = app.add_subcommand("annotate-asc",
                                     "LLM sentiment classification of existing aspect terms");
  add_common(asc);
  add_provider(asc);

  CLI::App* hybrid = app.add_subcommand("annotate-hybrid",
                                        "Hybrid annotation (LLM + similarity-gated dep rules)");
  add_common(hybrid);
  add_provider(hybrid);
  add_lexicons(hybrid);
  add_hybrid(hybrid);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against gold");
  add_common(evaluate);
  evaluate->add_option("--gold", config.gold, "Gold corpus file")->required();
  evaluate->add_option("--gold-format", config.gold_format, "Gold format: semeval or jsonl")
      ->check(CLI::IsMember({"semeval", "jsonl"}));
  evaluate->add_option("--task", config.task, "ate or asc")
      ->check(CLI::IsMember({"ate", "asc"}));
  evaluate->add_option("--match-mode", match_mode, "ATE matching: span or string")
      ->check(CLI::IsMember({"span", "string"}));

  CLI::App* sweep = app.add_subcommand("sweep-cf", "Hybrid run + ATE score per cf grid value");
  add_common(sweep);
  add_provider(sweep);
  add_lexicons(sweep);
  add_hybrid(sweep);
  sweep->add_option("--gold", config.gold, "Gold corpus file")->required();
  sweep->add_option("--gold-format", config.gold_format, "Gold format: semeval or jsonl")
      ->check(CLI::IsMember({"semeval", "jsonl"}));
  sweep->add_option("--match-mode", match_mode, "ATE matching: span or string")
      ->check(CLI::IsMember({"span", "string"}));
  sweep->add_option("--cf-grid", grid_spec, "Grid as min:max:step (default -2:2:0.25)");

  CLI::App* exp = app.add_subcommand("export-training", "Export text-to-text training pairs");
  add_common(exp);
  exp->add_option("--task", config.task, "ate or asc")->check(CLI::IsMember({"ate", "asc"}));
  exp->add_option("--eos", config.provider_config.eos_marker,
                  "End-of-sequence marker appended to inputs and targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  config.hybrid.sigma_mode = absa::sigma_mode_from_string(sigma);
  config.match_mode = absa::match_mode_from_string(match_mode);
  if (!grid_spec.empty() && !parse_grid(grid_spec, config)) {
    std::cerr << "error: --cf-grid expects min:max:step\n";
    return 2;
  }

  return absa::run_cli_command(app.get_subcommands().front()->get_name(), config);
}
