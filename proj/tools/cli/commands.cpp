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


#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "entrate/diagnose.hpp"
#include "entrate/entropy.hpp"
#include "entrate/errors.hpp"
#include "entrate/simulate.hpp"

namespace entrate::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out = open_output(path);
  out << content;
  if (!out) throw IoError("error while writing " + path.string());
}

// Config echo for CSV outputs: one "# key=value" line per setting.
void write_config_comment(std::ostream& out, std::string_view command, const json& config) {
  out << "# entrate " << command << '\n';
  for (const auto& [key, value] : config.items()) {
    out << "# " << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump())
        << '\n';
  }
}

std::vector<std::string> effective_include(const CorpusOptions& c) {
  if (!c.include.empty()) return c.include;
  if (c.partition == "generated") return {"*.jsonl"};
  return {"*.txt"};
}

ScanOptions scan_options(const CorpusOptions& c) {
  ScanOptions opt;
  opt.include = effective_include(c);
  opt.exclude = c.exclude;
  opt.partition = parse_partition(c.partition);
  opt.records.models = c.models;
  opt.records.temperatures = c.temperatures;
  opt.records.min_temperature = c.min_temperature;
  opt.records.max_temperature = c.max_temperature;
  return opt;
}

std::string sanitize(std::string_view name) {
  std::string out;
  for (char ch : name) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '.' || ch == '-' || ch == '_';
    out.push_back(keep ? ch : '_');
  }
  return out.empty() ? "source" : out;
}

std::string default_name(const fs::path& p) {
  fs::path clean = p;
  if (!clean.has_filename()) clean = clean.parent_path();
  std::string stem = clean.stem().string();
  return stem.empty() || stem == "." ? "corpus" : stem;
}

std::vector<std::vector<double>> parse_rows(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::stringstream rows_in{std::string(text)};
  std::string row;
  while (std::getline(rows_in, row, ';')) {
    std::vector<double> values;
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::logic_error&) {
        throw DataError("bad transition probability '" + cell + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

json json_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string flags_text(const ExpFit& fit) {
  return fit.flags.empty() ? "none" : join(fit.flags, ", ");
}

}  // namespace

json to_json(const CorpusOptions& c) {
  return {{"corpus", c.path.generic_string()},
          {"include", effective_include(c)},
          {"exclude", c.exclude},
          {"partition", c.partition},
          {"models", c.models},
          {"temperatures", c.temperatures},
          {"min_temperature", json_or_null(c.min_temperature)},
          {"max_temperature", json_or_null(c.max_temperature)},
          {"granularity", c.granularity}};
}

json to_json(const GenerateConfig& c) {
  return {{"endpoint", c.endpoint},
          {"models", c.models},
          {"items", c.items.generic_string()},
          {"template", c.prompt_template},
          {"temperatures", c.temperatures},
          {"concurrency", c.concurrency},
          {"max_retries", c.max_retries},
          {"timeout_seconds", c.timeout_seconds},
          {"output_dir", c.output_dir.generic_string()},
          {"api_key_env", c.api_key_env},
          {"retry_failed", c.retry_failed}};
}

json to_json(const AnalyzeConfig& c) {
  json j = c.table.empty() ? to_json(c.corpus) : json{{"table", c.table.generic_string()}};
  j["name"] = c.name;
  j["n_max"] = c.n_max;
  j["prune_threshold"] = c.prune_threshold;
  j["missing_mass_threshold"] = c.missing_mass_threshold;
  j["sample_ratio_threshold"] = c.sample_ratio_threshold;
  j["max_iterations"] = c.max_iterations;
  return j;
}

json to_json(const CompareConfig& c) {
  json inputs = json::array();
  for (const auto& p : c.inputs) inputs.push_back(p.generic_string());
  return {{"inputs", inputs},
          {"table_csv", c.table_csv.generic_string()},
          {"plot_csv", c.plot_csv.generic_string()}};
}

json to_json(const CountConfig& c) {
  json j = to_json(c.corpus);
  j["n_max"] = c.n_max;
  j["prune_threshold"] = c.prune_threshold;
  j["output"] = c.output.generic_string();
  return j;
}

json to_json(const SimulateConfig& c) {
  json j{{"source", c.source}, {"alphabet", c.alphabet}, {"length", c.length},
         {"seed", c.seed}};
  if (c.source == "iid") {
    j["probs"] = c.probs;
  } else {
    j["order"] = c.order;
    j["transition"] = c.transition;
    j["concentration"] = c.concentration;
  }
  return j;
}

int cmd_generate(const GenerateConfig& config, std::ostream& out) {
  if (config.models.empty()) throw DataError("no model given");
  const std::vector<std::string> items = read_items(config.items);
  std::vector<GenerationJob> jobs;
  for (const std::string& model : config.models) {
    GenerationJob job;
    job.endpoint = config.endpoint;
    job.model = model;
    job.prompt_template = config.prompt_template;
    job.items = items;
    job.temperatures = config.temperatures;
    job.concurrency = config.concurrency;
    job.max_retries = config.max_retries;
    job.timeout = std::chrono::milliseconds(
        static_cast<std::int64_t>(std::llround(config.timeout_seconds * 1000.0)));
    job.output = config.output_dir / (sanitize(model) + ".jsonl");
    job.api_key_env = config.api_key_env;
    job.retry_failed = config.retry_failed;
    validate_job(job);
    jobs.push_back(std::move(job));
  }

  if (config.dry_run) {
    const Endpoint ep = parse_endpoint(config.endpoint);
    for (const GenerationJob& job : jobs) {
      const auto plan = plan_job(job);
      out << "# " << job.model << ": " << plan.size() << " requests to " << ep.origin
          << ep.path << " -> " << job.output.generic_string() << '\n';
      for (const PlannedRequest& req : plan) out << req.body << '\n';
    }
    return kExitOk;
  }

  fs::create_directories(config.output_dir);
  write_file(config.output_dir / "generate.config.json", to_json(config).dump(2) + "\n");
  for (const GenerationJob& job : jobs) {
    const RunSummary s = run_job(job);
    out << job.model << ": planned " << s.planned << ", skipped " << s.skipped
        << ", succeeded " << s.succeeded << ", failed " << s.failed << " -> "
        << job.output.generic_string() << '\n';
  }
  return kExitOk;
}

int cmd_analyze(const AnalyzeConfig& input, std::ostream& out) {
  AnalyzeConfig config = input;
  NgramTable table;
  SourceMeta meta;
  std::uint64_t tokens = 0;
  if (!config.table.empty()) {
    table = load_table(config.table);
    config.n_max = table.n_max();
    tokens = table.total(1);
    if (config.name.empty()) config.name = default_name(config.table);
  } else {
    const TokenStream stream = load_stream(scan_corpus(config.corpus.path, scan_options(config.corpus)),
                                           parse_granularity(config.corpus.granularity));
    CountOptions options;
    options.threads = config.threads;
    options.prune_threshold = config.prune_threshold;
    table = count_ngrams(stream, config.n_max, options);
    meta = stream.source_meta;
    meta.erase("root");
    meta.erase("granularity");
    tokens = stream.tokens.size();
    if (config.name.empty()) config.name = default_name(config.corpus.path);
  }

  const EntropyCurve curve = entropy_curve(table);
  const CoverageReport coverage = coverage_report(table);
  UndersamplingThresholds thresholds;
  thresholds.max_missing_mass = config.missing_mass_threshold;
  thresholds.min_samples_per_gram = config.sample_ratio_threshold;
  FitOptions fit_options;
  fit_options.max_iterations = config.max_iterations;
  const ExpFit fit = estimate_rate(curve, coverage, thresholds, fit_options);
  const std::string unit = std::string(to_string(table.granularity()));

  const json config_json = to_json(config);
  json curve_json = json::array();
  for (const CurvePoint& p : curve.points) {
    const OrderCoverage& cov = coverage.at(p.n);
    curve_json.push_back({{"n", p.n},
                          {"h", p.h},
                          {"total", cov.total},
                          {"distinct", cov.distinct},
                          {"coverage", cov.coverage},
                          {"missing_mass", cov.missing_mass},
                          {"undersampled", undersampled(coverage, p.n, thresholds)}});
  }
  json doc{{"format", kAnalysisFormat},
           {"version", kAnalysisVersion},
           {"source", config.name},
           {"granularity", unit},
           {"tokens", tokens},
           {"vocabulary", table.vocab_size()},
           {"pruned", table.pruned()},
           {"source_meta", meta},
           {"config", config_json},
           {"curve", std::move(curve_json)},
           {"fit", fit}};

  const std::string base = sanitize(config.name);
  {
    std::ofstream csv = open_output(config.output_dir / (base + ".curve.csv"));
    write_config_comment(csv, "analyze", config_json);
    write_curve_csv(csv, curve, coverage);
  }
  write_file(config.output_dir / (base + ".fit.json"), doc.dump(2) + "\n");

  std::ostringstream summary;
  summary << "source: " << config.name << '\n'
          << "granularity: " << unit << '\n'
          << "tokens: " << tokens << ", vocabulary: " << table.vocab_size() << '\n';
  for (const auto& [key, value] : meta) summary << key << ": " << value << '\n';
  summary << '\n'
          << std::left << std::setw(4) << "n" << std::setw(14) << "h(n)" << std::setw(14)
          << "total" << std::setw(14) << "distinct" << std::setw(12) << "coverage"
          << "missing_mass\n";
  for (const CurvePoint& p : curve.points) {
    const OrderCoverage& cov = coverage.at(p.n);
    summary << std::setw(4) << p.n << std::setw(14) << fixed(p.h, 6) << std::setw(14)
            << cov.total << std::setw(14) << cov.distinct << std::setw(12)
            << fixed(cov.coverage, 6) << fixed(cov.missing_mass, 6)
            << (undersampled(coverage, p.n, thresholds) ? "  undersampled" : "") << '\n';
  }
  summary << '\n'
          << "fit: h(n) = a * exp(-b n) + c\n"
          << "  a = " << fixed(fit.a, 6) << ", b = " << fixed(fit.b, 6)
          << ", c = " << fixed(fit.c, 6) << '\n'
          << "  sse = " << std::setprecision(6) << std::scientific << fit.sse
          << std::defaultfloat << ", converged: " << (fit.converged ? "yes" : "no")
          << " after " << fit.iterations << " iterations\n"
          << "flags: " << flags_text(fit) << '\n'
          << "entropy rate: " << fixed(fit.c, 3) << " bits/" << unit << '\n';
  write_file(config.output_dir / (base + ".summary.txt"), summary.str());
  out << summary.str();
  return kExitOk;
}

namespace {

struct LoadedAnalysis {
  std::string source;
  std::string granularity;
  std::uint64_t tokens = 0;
  std::vector<CurvePoint> curve;
  ExpFit fit;
};

LoadedAnalysis load_analysis(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ParseError(path.string() + ": not valid JSON");
  if (!doc.is_object() || doc.value("format", "") != kAnalysisFormat) {
    throw SchemaMismatch(path.string() + ": not an entrate analysis document");
  }
  if (doc.value("version", 0) != kAnalysisVersion) {
    throw SchemaMismatch(path.string() + ": unsupported analysis version " +
                         doc["version"].dump());
  }
  try {
    LoadedAnalysis a;
    a.source = doc.at("source").get<std::string>();
    a.granularity = doc.at("granularity").get<std::string>();
    a.tokens = doc.at("tokens").get<std::uint64_t>();
    for (const json& p : doc.at("curve")) {
      a.curve.push_back({p.at("n").get<int>(), p.at("h").get<double>()});
    }
    a.fit = doc.at("fit").get<ExpFit>();
    return a;
  } catch (const json::exception& e) {
    throw SchemaMismatch(path.string() + ": " + e.what());
  }
}

}  // namespace

int cmd_compare(const CompareConfig& config, std::ostream& out) {
  if (config.inputs.size() < 2) {
    throw TooFewInputs("compare needs at least two analysis files, got " +
                       std::to_string(config.inputs.size()));
  }
  std::vector<LoadedAnalysis> rows;
  for (const fs::path& p : config.inputs) rows.push_back(load_analysis(p));
  for (const LoadedAnalysis& r : rows) {
    if (r.granularity != rows.front().granularity) {
      throw SchemaMismatch("cannot compare " + rows.front().granularity +
                           "-level and " + r.granularity + "-level analyses (" +
                           rows.front().source + ", " + r.source + ")");
    }
  }
  const json config_json = to_json(config);
  const std::string unit = rows.front().granularity;

  {
    std::ofstream csv = open_output(config.table_csv);
    write_config_comment(csv, "compare", config_json);
    csv << "source,granularity,tokens,c,a,b,sse,flags\n";
    for (const LoadedAnalysis& r : rows) {
      csv << '"' << r.source << "\"," << r.granularity << ',' << r.tokens << ','
          << fixed(r.fit.c, 6) << ',' << fixed(r.fit.a, 6) << ',' << fixed(r.fit.b, 6)
          << ',' << fixed(r.fit.sse, 12) << ',' << join(r.fit.flags, "|") << '\n';
    }
  }
  {
    std::ofstream csv = open_output(config.plot_csv);
    write_config_comment(csv, "compare", config_json);
    csv << "source,n,h_bits,fit_bits\n";
    for (const LoadedAnalysis& r : rows) {
      for (const CurvePoint& p : r.curve) {
        csv << '"' << r.source << "\"," << p.n << ',' << fixed(p.h, 12) << ','
            << fixed(r.fit(p.n), 12) << '\n';
      }
    }
  }

  std::size_t width = std::string_view("source").size();
  for (const LoadedAnalysis& r : rows) width = std::max(width, r.source.size());
  std::ostringstream text;
  text << std::left << std::setw(static_cast<int>(width) + 2) << "source" << std::right
       << std::setw(14) << ("c [bits/" + unit + "]") << "  flags\n";
  for (const LoadedAnalysis& r : rows) {
    text << std::left << std::setw(static_cast<int>(width) + 2) << r.source << std::right
         << std::setw(14) << fixed(r.fit.c, 3) << "  " << flags_text(r.fit) << '\n';
  }
  if (!config.table_text.empty()) write_file(config.table_text, text.str());
  out << text.str();
  return kExitOk;
}

int cmd_count(const CountConfig& config, std::ostream& out) {
  if (config.output.empty()) throw DataError("count needs an output path");
  const CorpusManifest manifest = scan_corpus(config.corpus.path, scan_options(config.corpus));
  const TokenStream stream = load_stream(manifest, parse_granularity(config.corpus.granularity));
  CountOptions options;
  options.threads = config.threads;
  options.prune_threshold = config.prune_threshold;
  const NgramTable table = count_ngrams(stream, config.n_max, options);
  if (config.output.has_parent_path()) fs::create_directories(config.output.parent_path());
  save_table(table, config.output);

  json m = manifest;
  m.erase("root");
  json sidecar{{"config", to_json(config)}, {"manifest", std::move(m)}};
  write_file(config.output.string() + ".json", sidecar.dump(2) + "\n");

  out << "tokens: " << stream.tokens.size() << ", vocabulary: " << table.vocab_size() << '\n';
  for (int k = 1; k <= table.n_max(); ++k) {
    out << "order " << k << ": total " << table.total(k) << ", distinct "
        << table.distinct(k) << '\n';
  }
  out << "wrote " << config.output.generic_string() << '\n';
  return kExitOk;
}

int cmd_simulate(const SimulateConfig& config, std::ostream& out) {
  if (config.output.empty()) throw DataError("simulate needs an output path");
  if (config.alphabet < 1) throw DataError("alphabet must be at least 1");
  std::vector<TokenId> symbols;
  double rate = 0.0;
  if (config.source == "iid") {
    std::vector<double> probs = config.probs;
    if (probs.empty()) probs.assign(config.alphabet, 1.0 / static_cast<double>(config.alphabet));
    if (probs.size() != config.alphabet) {
      throw DataError("--probs needs exactly " + std::to_string(config.alphabet) + " values");
    }
    rate = shannon_entropy(probs);
    symbols = sample_iid(probs, config.length, config.seed);
  } else if (config.source == "markov") {
    const MarkovSource source =
        config.transition.empty()
            ? MarkovSource::random(config.alphabet, config.order, config.seed,
                                   config.concentration)
            : MarkovSource(config.alphabet, config.order, parse_rows(config.transition));
    rate = source.entropy_rate();
    symbols = source.sample(config.length, config.seed);
  } else {
    throw DataError("unknown source '" + config.source + "' (expected iid or markov)");
  }

  write_file(config.output, symbols_to_text(symbols, config.alphabet));
  json sidecar{{"config", to_json(config)}, {"entropy_rate_bits", rate}};
  write_file(config.output.string() + ".json", sidecar.dump(2) + "\n");
  out << "wrote " << config.length << " symbols to " << config.output.generic_string()
      << "; entropy rate " << fixed(rate, 6) << " bits/symbol\n";
  return kExitOk;
}

}  // namespace entrate::cli
