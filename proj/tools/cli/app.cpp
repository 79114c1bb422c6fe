// Copyright 2026 The entrate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <CLI11.hpp>

#include <iostream>

#include "cli/commands.hpp"
#include "entrate/errors.hpp"

namespace entrate::cli {
namespace {

void add_corpus_options(CLI::App* cmd, CorpusOptions& c) {
  cmd->add_option("--include", c.include,
                  "Glob on paths relative to the corpus root (repeatable; default *.txt, "
                  "or *.jsonl for the generated partition)");
  cmd->add_option("--exclude", c.exclude, "Glob of paths to skip (repeatable)");
  cmd->add_option("--partition", c.partition, "written, spoken or generated")
      ->check(CLI::IsMember({"written", "spoken", "generated"}))
      ->capture_default_str();
  cmd->add_option("--granularity", c.granularity, "word or letter")
      ->check(CLI::IsMember({"word", "letter"}))
      ->capture_default_str();
  cmd->add_option("--model", c.models, "Keep generation records of this model (repeatable)");
  cmd->add_option("--temps", c.temperatures, "Keep generation records at these temperatures")
      ->delimiter(',');
  cmd->add_option("--min-temp", c.min_temperature, "Keep records with T >= value");
  cmd->add_option("--max-temp", c.max_temperature, "Keep records with T <= value");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimate the entropy rate of text sources by extrapolating conditional "
               "n-gram entropies.",
               "entrate"};
  app.set_config("--config", "", "Read options from a key=value file; flags take precedence");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ENTRATE_VERSION));

  GenerateConfig gen;
  CLI::App* generate = app.add_subcommand("generate", "Collect essays from chat-completion endpoints");
  generate->add_option("--endpoint", gen.endpoint, "Base URL or full chat/completions URL")
      ->required();
  generate->add_option("--model", gen.models, "Model name (repeatable); one JSONL per model")
      ->required();
  generate->add_option("--items", gen.items, "Item list, one per line")->required();
  generate->add_option("--template", gen.prompt_template, "Prompt with one {item}")
      ->capture_default_str();
  generate->add_option("--temps", gen.temperatures, "Temperatures, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  generate->add_option("--concurrency", gen.concurrency, "Requests in flight")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  generate->add_option("--max-retries", gen.max_retries, "Retries on 429, 5xx and transport errors")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  generate->add_option("--timeout", gen.timeout_seconds, "Per-request timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  generate->add_option("--output-dir", gen.output_dir, "Directory for <model>.jsonl files")
      ->capture_default_str();
  generate->add_option("--api-key-env", gen.api_key_env, "Variable holding the API key")
      ->capture_default_str();
  generate->add_flag("--retry-failed", gen.retry_failed, "Re-run requests recorded as failures");
  generate->add_flag("--dry-run", gen.dry_run, "Print the request plan and exit");

  AnalyzeConfig an;
  CLI::App* analyze = app.add_subcommand("analyze", "Entropy curve, coverage and rate fit of a corpus");
  CLI::Option* corpus_arg = analyze->add_option("corpus", an.corpus.path, "Corpus directory or file");
  add_corpus_options(analyze, an.corpus);
  analyze->add_option("--table", an.table, "Analyze a table written by count instead of a corpus")
      ->excludes(corpus_arg);
  analyze->add_option("--name", an.name, "Source name used in outputs");
  analyze->add_option("--n-max", an.n_max, "Largest n-gram order")
      ->check(CLI::Range(3, 64))
      ->capture_default_str();
  analyze->add_option("--threads", an.threads, "Counting threads, 0 for all cores");
  analyze->add_option("--prune", an.prune_threshold,
                      "Drop top-order grams seen fewer times (biases h low)");
  analyze->add_option("--missing-mass", an.missing_mass_threshold,
                      "Undersampled when Good-Turing missing mass exceeds this")
      ->capture_default_str();
  analyze->add_option("--sample-ratio", an.sample_ratio_threshold,
                      "Undersampled when total < ratio * distinct")
      ->capture_default_str();
  analyze->add_option("--max-iterations", an.max_iterations, "Fit iteration budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze->add_option("--output-dir", an.output_dir,
                      "Directory for <name>.curve.csv, .fit.json and .summary.txt")
      ->capture_default_str();

  CompareConfig cmp;
  CLI::App* compare = app.add_subcommand("compare", "Tabulate several analyses");
  compare->add_option("inputs", cmp.inputs, "Analysis files (<name>.fit.json)")->required();
  compare->add_option("--csv", cmp.table_csv, "Comparison table")->capture_default_str();
  compare->add_option("--text", cmp.table_text, "Also write the aligned table here");
  compare->add_option("--plot", cmp.plot_csv, "Curve and fit values per source")
      ->capture_default_str();

  CountConfig cnt;
  CLI::App* count = app.add_subcommand("count", "Count n-grams of a corpus into a table file");
  count->add_option("corpus", cnt.corpus.path, "Corpus directory or file")->required();
  add_corpus_options(count, cnt.corpus);
  count->add_option("--n-max", cnt.n_max, "Largest n-gram order")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  count->add_option("--threads", cnt.threads, "Counting threads, 0 for all cores");
  count->add_option("--prune", cnt.prune_threshold, "Drop top-order grams seen fewer times");
  count->add_option("-o,--output", cnt.output, "Table path; .tsv for text, binary otherwise")
      ->required();

  SimulateConfig sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Write a synthetic symbol stream");
  simulate->add_option("--source", sim.source, "iid or markov")
      ->check(CLI::IsMember({"iid", "markov"}))
      ->capture_default_str();
  simulate->add_option("--alphabet", sim.alphabet, "Number of symbols")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--order", sim.order, "Markov order")
      ->check(CLI::Range(1, 8))
      ->capture_default_str();
  simulate->add_option("--length", sim.length, "Number of symbols to draw")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--probs", sim.probs, "i.i.d. symbol probabilities")->delimiter(',');
  simulate->add_option("--transition", sim.transition,
                       "Markov rows as \"p,p;p,p\"; random Dirichlet rows when absent");
  simulate->add_option("--concentration", sim.concentration, "Dirichlet concentration")
      ->capture_default_str();
  simulate->add_option("-o,--output", sim.output, "Output text file")->required();

  try {
    app.parse(argc, argv);
    if (analyze->parsed() && an.corpus.path.empty() && an.table.empty()) {
      throw CLI::RequiredError("analyze needs a corpus path or --table");
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out);
    if (analyze->parsed()) return cmd_analyze(an, out);
    if (compare->parsed()) return cmd_compare(cmp, out);
    if (count->parsed()) return cmd_count(cnt, out);
    if (simulate->parsed()) return cmd_simulate(sim, out);
  } catch (const NetworkError& e) {
    err << "entrate: " << e.what() << '\n';
    return kExitNetwork;
  } catch (const std::exception& e) {
    err << "entrate: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace entrate::cli
