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

#include "entrate/errors.hpp"
#include "entrate/ingest.hpp"
#include "entrate/records.hpp"
#include "support/tempdir.hpp"

namespace entrate {
namespace {

using testing::TempDir;

std::vector<std::string> words_of(const TokenStream& s) {
  std::vector<std::string> out;
  for (TokenId id : s.tokens) out.emplace_back(s.vocab.token(id));
  return out;
}

std::string record_line(const std::string& model, double t, const std::string& item,
                        const std::string& text, const std::string& error = {}) {
  GenerationRecord r;
  r.model = model;
  r.temperature = t;
  r.item = item;
  r.prompt = "Write an essay about " + item;
  r.text = text;
  r.error = error;
  r.http_status = error.empty() ? 200 : 500;
  r.attempts = 1;
  r.timestamp = "2026-01-01T00:00:00Z";
  return to_jsonl(r) + "\n";
}

TEST(Scan, EmptyDirectoryHasNoFiles) {
  TempDir dir;
  EXPECT_THROW(scan_corpus(dir.path()), NoFilesMatched);
}

TEST(Scan, MissingRoot) {
  TempDir dir;
  EXPECT_THROW(scan_corpus(dir / "nope"), RootNotFound);
}

TEST(Scan, ConcatenatesInPathOrder) {
  TempDir dir;
  dir.write("b.txt", "c");
  dir.write("a.txt", "a b");
  const CorpusManifest m = scan_corpus(dir.path());
  ASSERT_EQ(m.files.size(), 2u);
  EXPECT_EQ(m.files[0].path, "a.txt");
  EXPECT_EQ(m.word_count, 3u);
  const TokenStream s = load_stream(m, Granularity::kWord);
  EXPECT_EQ(words_of(s), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(s.source_meta.at("partition"), "written");
  EXPECT_EQ(s.source_meta.at("files"), "2");
}

TEST(Scan, FileBoundariesSeparateWords) {
  TempDir dir;
  dir.write("1.txt", "ab");
  dir.write("2.txt", "cd");
  const TokenStream s = load_stream(scan_corpus(dir.path()), Granularity::kWord);
  EXPECT_EQ(words_of(s), (std::vector<std::string>{"ab", "cd"}));
  const TokenStream l = load_stream(scan_corpus(dir.path()), Granularity::kLetter);
  EXPECT_EQ(detokenize(l), "ab cd");
}

TEST(Scan, IncludeAndExcludeGlobs) {
  TempDir dir;
  dir.write("spoken/x.txt", "one two");
  dir.write("written/y.txt", "three");
  dir.write("written/y.xml", "<tag/>");
  dir.write("written/skip/z.txt", "four");
  ScanOptions opt;
  opt.include = {"written/*.txt", "written/*/*.txt"};
  opt.exclude = {"written/skip/*"};
  const CorpusManifest m = scan_corpus(dir.path(), opt);
  ASSERT_EQ(m.files.size(), 1u);
  EXPECT_EQ(m.files[0].path, "written/y.txt");
  opt.include = {"*.csv"};
  EXPECT_THROW(scan_corpus(dir.path(), opt), NoFilesMatched);
}

TEST(Scan, WordCountMatchesStreamLength) {
  TempDir dir;
  dir.write("a.txt", "It's a well-known fact, isn't it?\nYes -- it is.");
  dir.write("b/c.txt", "Ünïcödé wörds  and  123 numbers");
  const CorpusManifest m = scan_corpus(dir.path());
  const TokenStream s = load_stream(m, Granularity::kWord);
  EXPECT_EQ(m.word_count, s.tokens.size());
  std::uint64_t per_file = 0;
  for (const auto& f : m.files) per_file += f.words;
  EXPECT_EQ(per_file, m.word_count);
}

TEST(Scan, Deterministic) {
  TempDir dir;
  for (int i = 0; i < 20; ++i) {
    dir.write("d" + std::to_string(i % 3) + "/f" + std::to_string(i) + ".txt",
              "w" + std::to_string(i) + " shared");
  }
  const TokenStream a = load_stream(scan_corpus(dir.path()), Granularity::kWord);
  const TokenStream b = load_stream(scan_corpus(dir.path()), Granularity::kWord);
  EXPECT_EQ(a.tokens, b.tokens);
  EXPECT_TRUE(a.vocab == b.vocab);
  EXPECT_EQ(nlohmann::json(scan_corpus(dir.path())).dump(),
            nlohmann::json(scan_corpus(dir.path())).dump());
}

TEST(Scan, SingleFileRoot) {
  TempDir dir;
  const auto p = dir.write("only.txt", "x y z");
  const CorpusManifest m = scan_corpus(p);
  ASSERT_EQ(m.files.size(), 1u);
  EXPECT_EQ(load_stream(m, Granularity::kWord).tokens.size(), 3u);
}

TEST(Records, GeneratedCorpusCarriesMetadata) {
  TempDir dir;
  dir.write("gen/m1.jsonl", record_line("m1", 0.3, "France", "alpha beta") +
                                record_line("m1", 0.7, "Spain", "gamma") +
                                record_line("m1", 0.5, "Peru", "", "HTTP 500"));
  dir.write("gen/m2.jsonl", record_line("m2", 1.5, "Chad", "delta"));
  ScanOptions opt;
  opt.include = {"*.jsonl"};
  opt.partition = Partition::kGenerated;
  opt.records.max_temperature = 1.0;
  const CorpusManifest m = scan_corpus(dir / "gen", opt);
  EXPECT_EQ(m.word_count, 3u);
  const TokenStream s = load_stream(m, Granularity::kWord);
  EXPECT_EQ(words_of(s), (std::vector<std::string>{"alpha", "beta", "gamma"}));
  EXPECT_EQ(s.source_meta.at("partition"), "generated");
  EXPECT_EQ(s.source_meta.at("models"), "m1");
  EXPECT_EQ(s.source_meta.at("temperatures"), "0.3,0.7");

  opt.records = {};
  opt.records.models = {"m3"};
  EXPECT_THROW(load_stream(scan_corpus(dir / "gen", opt), Granularity::kWord),
               NoFilesMatched);
}

TEST(Records, FilterGroupings) {
  TempDir dir;
  const auto a = dir.write("a.jsonl", record_line("mistral-7b", 0.3, "x", "one") +
                                          record_line("mistral-7b", 1.5, "x", "two"));
  const auto b = dir.write("b.jsonl", record_line("llama", 0.3, "y", "three"));
  const std::vector<std::filesystem::path> paths{a, b};

  RecordFilter upto1;
  upto1.max_temperature = 1.0;
  EXPECT_EQ(corpus_from_records(paths, upto1).entries.size(), 2u);

  RecordFilter family;
  family.models = {"mistral-7b"};
  family.temperatures = {0.3};
  const TextSet set = corpus_from_records(paths, family);
  ASSERT_EQ(set.entries.size(), 1u);
  EXPECT_EQ(set.entries[0].text, "one");

  RecordFilter none;
  none.models = {"absent"};
  EXPECT_THROW(load_text_set(corpus_from_records(paths, none), Granularity::kWord),
               NoFilesMatched);
}

TEST(Records, ParseErrorCarriesLineNumber) {
  TempDir dir;
  const auto p = dir.write("bad.jsonl", record_line("m", 0.3, "x", "ok") + "{not json\n");
  try {
    read_records(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(Records, RoundTrip) {
  GenerationRecord r;
  r.model = "m";
  r.temperature = 0.7;
  r.item = "France";
  r.prompt = "Write an essay about France";
  r.text = "Text \"quoted\"\nline";
  r.usage = TokenUsage{5, 6, 11};
  r.http_status = 200;
  r.attempts = 2;
  const auto back = nlohmann::json::parse(to_jsonl(r)).get<GenerationRecord>();
  EXPECT_EQ(back.text, r.text);
  EXPECT_EQ(back.usage->completion_tokens, 6);
  EXPECT_EQ(back.attempts, 2);
  EXPECT_EQ(to_jsonl(back), to_jsonl(r));
}

TEST(Partitions, Names) {
  EXPECT_EQ(parse_partition("spoken"), Partition::kSpoken);
  EXPECT_EQ(to_string(Partition::kGenerated), "generated");
  EXPECT_THROW(parse_partition("sung"), DataError);
}

}  // namespace
}  // namespace entrate
