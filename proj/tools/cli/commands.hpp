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


#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "entrate/fit.hpp"
#include "entrate/ingest.hpp"
#include "entrate/llmgen.hpp"
#include "entrate/ngram.hpp"
#include "entrate/tokenize.hpp"

namespace entrate::cli {

// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNetwork = 3;

// Corpus selection common to analyze and count.
struct CorpusOptions {
  std::filesystem::path path;
  // Empty means "*.txt", or "*.jsonl" for the generated partition.
  std::vector<std::string> include;
  std::vector<std::string> exclude;
  std::string partition = "written";
  std::vector<std::string> models;
  std::vector<double> temperatures;
  std::optional<double> min_temperature;
  std::optional<double> max_temperature;
  std::string granularity = "word";
};

struct GenerateConfig {
  std::string endpoint;
  std::vector<std::string> models;
  std::filesystem::path items;
  std::string prompt_template = "Write an essay about {item}";
  std::vector<double> temperatures{0.3, 0.5, 0.7};
  int concurrency = 4;
  int max_retries = 5;
  double timeout_seconds = 300.0;
  std::filesystem::path output_dir = ".";
  std::string api_key_env = "ENTRATE_API_KEY";
  bool retry_failed = false;
  bool dry_run = false;
};

struct AnalyzeConfig {
  CorpusOptions corpus;
  std::filesystem::path table;  // use a cached table instead of a corpus
  std::string name;             // defaults to the corpus or table stem
  int n_max = 6;
  unsigned threads = 0;
  std::uint64_t prune_threshold = 0;
  double missing_mass_threshold = 0.05;
  double sample_ratio_threshold = 10.0;
  int max_iterations = 200;
  std::filesystem::path output_dir = ".";
};

struct CompareConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path table_csv = "compare.csv";
  std::filesystem::path table_text;  // stdout only when empty
  std::filesystem::path plot_csv = "compare_plot.csv";
};

struct CountConfig {
  CorpusOptions corpus;
  int n_max = 6;
  unsigned threads = 0;
  std::uint64_t prune_threshold = 0;
  std::filesystem::path output;
};

struct SimulateConfig {
  std::string source = "iid";  // iid | markov
  std::size_t alphabet = 2;
  int order = 1;
  std::size_t length = 1000000;
  std::uint64_t seed = 1;
  std::vector<double> probs;  // iid; uniform when empty
  std::string transition;     // markov rows "p,p;p,p"; random when empty
  double concentration = 1.0;
  std::filesystem::path output;
};

nlohmann::json to_json(const CorpusOptions& c);
nlohmann::json to_json(const GenerateConfig& c);
nlohmann::json to_json(const AnalyzeConfig& c);
nlohmann::json to_json(const CompareConfig& c);
nlohmann::json to_json(const CountConfig& c);
nlohmann::json to_json(const SimulateConfig& c);

int cmd_generate(const GenerateConfig& config, std::ostream& out);
int cmd_analyze(const AnalyzeConfig& config, std::ostream& out);
int cmd_compare(const CompareConfig& config, std::ostream& out);
int cmd_count(const CountConfig& config, std::ostream& out);
int cmd_simulate(const SimulateConfig& config, std::ostream& out);

// Parses arguments, dispatches and maps errors onto exit statuses.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Schema tag of analysis documents written by analyze.
inline constexpr const char* kAnalysisFormat = "entrate-analysis";
inline constexpr int kAnalysisVersion = 1;

}  // namespace entrate::cli
