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


#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <sstream>

#include "cli/commands.hpp"
#include "entrate/simulate.hpp"
#include "support/stub_server.hpp"
#include "support/tempdir.hpp"

namespace entrate::cli {
namespace {

using entrate::testing::slurp;
using entrate::testing::TempDir;

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "entrate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

nlohmann::json read_json(const std::filesystem::path& p) {
  return nlohmann::json::parse(slurp(p));
}

class CliTest : public ::testing::Test {
 protected:
  // Simulated binary corpus shared by the analysis tests.
  std::filesystem::path uniform_corpus() {
    const auto path = dir / "uniform" / "u.txt";
    if (!std::filesystem::exists(path)) {
      const CliResult r = run({"simulate", "--alphabet", "2", "--length", "1000000", "--seed", "3",
                         "-o", path.string()});
      EXPECT_EQ(r.status, 0) << r.err;
    }
    return path.parent_path();
  }

  TempDir dir;
};

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).status, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).status, kExitUsage);
  EXPECT_EQ(run({"analyze", "--n-max", "two", "x"}).status, kExitUsage);
  EXPECT_EQ(run({"analyze"}).status, kExitUsage);
  EXPECT_EQ(run({"--help"}).status, kExitOk);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  const CliResult r = run({"analyze", (dir / "missing").string()});
  EXPECT_EQ(r.status, kExitData);
  EXPECT_NE(r.err.find("not found"), std::string::npos);
  std::filesystem::create_directories(dir / "empty");
  EXPECT_EQ(run({"analyze", (dir / "empty").string()}).status, kExitData);
}

TEST_F(CliTest, AnalyzeUniformBinaryRecoversOneBit) {
  const CliResult r = run({"analyze", uniform_corpus().string(), "--name", "binary", "--output-dir",
                     (dir / "out").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto doc = read_json(dir / "out" / "binary.fit.json");
  EXPECT_EQ(doc["format"], kAnalysisFormat);
  EXPECT_NEAR(doc["fit"]["c"].get<double>(), 1.0, 0.02);
  EXPECT_TRUE(doc["fit"]["flags"].empty());
  EXPECT_EQ(doc["config"]["n_max"], 6);
  EXPECT_EQ(doc["curve"].size(), 6u);
  EXPECT_NE(r.out.find("flags: none"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "binary.curve.csv"));
  EXPECT_EQ(slurp(dir / "out" / "binary.summary.txt"), r.out);
}

TEST_F(CliTest, AnalyzeIsByteDeterministic) {
  const auto corpus = uniform_corpus().string();
  for (const char* sub : {"a", "b"}) {
    ASSERT_EQ(run({"analyze", corpus, "--name", "u", "--n-max", "4", "--output-dir",
                   (dir / sub).string()})
                  .status,
              0);
  }
  for (const char* file : {"u.curve.csv", "u.fit.json", "u.summary.txt"}) {
    EXPECT_EQ(slurp(dir / "a" / file), slurp(dir / "b" / file)) << file;
  }
}

TEST_F(CliTest, SmallWordCorpusIsFlaggedUndersampled) {
  std::ostringstream text;
  const auto words = sample_zipf(20000, 1.0, 140000, 5);
  for (std::size_t i = 0; i < words.size(); ++i) text << 'w' << words[i] << (i % 12 == 11 ? '\n' : ' ');
  dir.write("small/text.txt", text.str());
  const CliResult r = run({"analyze", (dir / "small").string(), "--output-dir", (dir / "o").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("UNDERSAMPLED"), std::string::npos) << r.out;
}

TEST_F(CliTest, CountThenAnalyzeTableMatchesDirectAnalysis) {
  const auto corpus = uniform_corpus().string();
  const auto table = (dir / "cache" / "u.tsv").string();
  ASSERT_EQ(run({"count", corpus, "--n-max", "5", "-o", table}).status, 0);
  EXPECT_TRUE(std::filesystem::exists(table + ".json"));
  ASSERT_EQ(run({"analyze", "--table", table, "--name", "t", "--output-dir",
                 (dir / "o").string()})
                .status,
            0);
  ASSERT_EQ(run({"analyze", corpus, "--n-max", "5", "--name", "d", "--output-dir",
                 (dir / "o").string()})
                .status,
            0);
  const auto t = read_json(dir / "o" / "t.fit.json");
  const auto d = read_json(dir / "o" / "d.fit.json");
  EXPECT_EQ(t["curve"], d["curve"]);
  EXPECT_EQ(t["fit"], d["fit"]);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  const auto corpus = uniform_corpus().string();
  const auto cfg = dir.write("run.ini", "[analyze]\nn-max = 4\nname = \"cfg\"\noutput-dir = \"" +
                                            (dir / "c").generic_string() + "\"\n");
  ASSERT_EQ(run({"--config", cfg.string(), "analyze", corpus}).status, 0);
  EXPECT_EQ(read_json(dir / "c" / "cfg.fit.json")["config"]["n_max"], 4);
  ASSERT_EQ(run({"--config", cfg.string(), "analyze", corpus, "--n-max", "5"}).status, 0);
  EXPECT_EQ(read_json(dir / "c" / "cfg.fit.json")["config"]["n_max"], 5);
}

TEST_F(CliTest, CompareTablesAndPlotData) {
  const auto corpus = uniform_corpus().string();
  const auto out = (dir / "o").string();
  ASSERT_EQ(run({"analyze", corpus, "--name", "one", "--output-dir", out}).status, 0);
  const auto fit = (dir / "o" / "one.fit.json").string();

  EXPECT_EQ(run({"compare", fit}).status, kExitData);

  const CliResult r = run({"compare", fit, fit, "--csv", (dir / "t.csv").string(), "--plot",
                     (dir / "p.csv").string(), "--text", (dir / "t.txt").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream csv(slurp(dir / "t.csv"));
  std::vector<std::string> rows;
  for (std::string line; std::getline(csv, line);) {
    if (!line.starts_with('#')) rows.push_back(line);
  }
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "source,granularity,tokens,c,a,b,sse,flags");
  EXPECT_EQ(rows[1], rows[2]);
  EXPECT_EQ(slurp(dir / "t.txt"), r.out);

  std::istringstream plot(slurp(dir / "p.csv"));
  std::size_t data_lines = 0;
  for (std::string line; std::getline(plot, line);) data_lines += !line.starts_with('#');
  EXPECT_EQ(data_lines, 1u + 2u * 6u);
}

TEST_F(CliTest, CompareRejectsIncompatibleInputs) {
  const auto corpus = uniform_corpus().string();
  const auto out = (dir / "o").string();
  ASSERT_EQ(run({"analyze", corpus, "--name", "w", "--n-max", "3", "--output-dir", out}).status, 0);
  ASSERT_EQ(run({"analyze", corpus, "--name", "l", "--n-max", "3", "--granularity", "letter",
                 "--output-dir", out})
                .status,
            0);
  const CliResult mixed = run({"compare", (dir / "o" / "w.fit.json").string(),
                         (dir / "o" / "l.fit.json").string()});
  EXPECT_EQ(mixed.status, kExitData);
  EXPECT_NE(mixed.err.find("cannot compare"), std::string::npos);

  const auto bogus = dir.write("bogus.json", "{\"format\": \"other\"}");
  EXPECT_EQ(run({"compare", (dir / "o" / "w.fit.json").string(), bogus.string()}).status,
            kExitData);
}

TEST_F(CliTest, SimulateWritesRateSidecar) {
  const auto path = dir / "m.txt";
  const CliResult r = run({"simulate", "--source", "markov", "--transition", "0.9,0.1;0.5,0.5",
                     "--length", "1000", "-o", path.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto side = read_json(path.string() + ".json");
  EXPECT_NEAR(side["entropy_rate_bits"].get<double>(), 0.5574963280, 1e-9);
  EXPECT_EQ(side["config"]["source"], "markov");
  EXPECT_EQ(run({"simulate", "--source", "markov", "--transition", "0.9,0.1", "-o",
                 path.string()})
                .status,
            kExitData);
}

TEST_F(CliTest, GenerateDryRunMakesNoRequests) {
  const auto items = dir.write("items.txt", "France\nSpain\n");
  const CliResult r = run({"generate", "--endpoint", "http://127.0.0.1:9/v1", "--model", "m1",
                     "--model", "m2", "--items", items.string(), "--temps", "0.3,0.5,0.7",
                     "--output-dir", (dir / "gen").string(), "--dry-run"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("# m1: 6 requests"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Write an essay about France"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir / "gen"));
}

TEST_F(CliTest, GenerateWritesOneFilePerModel) {
  entrate::testing::StubServer server(entrate::testing::echo_reply);
  const auto items = dir.write("items.txt", "France\nSpain\n");
  std::vector<std::string> args{"generate", "--endpoint", server.endpoint(), "--model", "m/1",
                                "--model", "m2", "--items", items.string(), "--temps",
                                "0.3,0.5,0.7", "--output-dir", (dir / "gen").string(),
                                "--api-key-env", "ENTRATE_CLI_TEST_KEY"};
  ::unsetenv("ENTRATE_CLI_TEST_KEY");
  EXPECT_EQ(run(args).status, kExitNetwork);
  EXPECT_EQ(server.requests(), 0u);

  ::setenv("ENTRATE_CLI_TEST_KEY", "k", 1);
  const CliResult r = run(args);
  ::unsetenv("ENTRATE_CLI_TEST_KEY");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(read_records(dir / "gen" / "m_1.jsonl").size(), 6u);
  EXPECT_EQ(read_records(dir / "gen" / "m2.jsonl").size(), 6u);
  EXPECT_TRUE(std::filesystem::exists(dir / "gen" / "generate.config.json"));

  // The generated files feed straight into analysis.
  const CliResult a = run({"analyze", (dir / "gen").string(), "--partition", "generated", "--n-max",
                     "3", "--max-temp", "0.5", "--output-dir", (dir / "o").string()});
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_NE(a.out.find("temperatures: 0.3,0.5"), std::string::npos) << a.out;
}

}  // namespace
}  // namespace entrate::cli
