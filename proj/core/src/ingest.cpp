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

#include "entrate/ingest.hpp"

#include <fnmatch.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "entrate/errors.hpp"

namespace entrate {
namespace {

bool matches_any(const std::vector<std::string>& globs, const std::string& path) {
  return std::any_of(globs.begin(), globs.end(), [&](const std::string& g) {
    return ::fnmatch(g.c_str(), path.c_str(), 0) == 0;
  });
}

bool is_records_file(const std::filesystem::path& path) {
  return path.extension() == ".jsonl";
}

// Calls `sink` with each text piece of `path` in order: the whole file, or
// every selected record of a generation file.
template <typename Sink>
void for_each_text(const std::filesystem::path& path, const RecordFilter& filter,
                   Sink&& sink) {
  if (is_records_file(path)) {
    const std::filesystem::path one[] = {path};
    for (const TextEntry& e : corpus_from_records(one, filter).entries) {
      sink(e.text, &e);
    }
  } else {
    sink(read_text_file(path), nullptr);
  }
}

}  // namespace

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::kWritten:
      return "written";
    case Partition::kSpoken:
      return "spoken";
    case Partition::kGenerated:
      return "generated";
  }
  return "written";
}

Partition parse_partition(std::string_view name) {
  if (name == "written") return Partition::kWritten;
  if (name == "spoken") return Partition::kSpoken;
  if (name == "generated") return Partition::kGenerated;
  throw DataError("unknown partition '" + std::string(name) +
                  "' (expected written, spoken or generated)");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return std::move(buf).str();
}

std::filesystem::path CorpusManifest::file_path(const ManifestFile& file) const {
  return root / std::filesystem::path(file.path);
}

CorpusManifest scan_corpus(const std::filesystem::path& root,
                           const ScanOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(root, ec)) {
    throw RootNotFound("corpus root not found: " + root.string());
  }

  CorpusManifest manifest;
  manifest.include = options.include;
  manifest.exclude = options.exclude;
  manifest.partition = options.partition;
  manifest.records = options.records;

  if (fs::is_regular_file(root)) {
    manifest.root = root.parent_path();
    manifest.files.push_back({root.filename().generic_string(), fs::file_size(root), 0});
  } else {
    manifest.root = root;
    fs::recursive_directory_iterator it(root, ec);
    if (ec) throw RootNotFound("cannot open corpus root " + root.string());
    for (const fs::directory_entry& entry : it) {
      if (!entry.is_regular_file()) continue;
      const std::string rel = entry.path().lexically_relative(root).generic_string();
      if (!matches_any(options.include, rel) || matches_any(options.exclude, rel)) {
        continue;
      }
      manifest.files.push_back({rel, entry.file_size(), 0});
    }
    std::sort(manifest.files.begin(), manifest.files.end(),
              [](const ManifestFile& l, const ManifestFile& r) { return l.path < r.path; });
  }
  if (manifest.files.empty()) {
    throw NoFilesMatched("no files under " + root.string() + " match the include globs");
  }

  for (ManifestFile& file : manifest.files) {
    for_each_text(manifest.file_path(file), manifest.records,
                  [&](const std::string& text, const TextEntry*) {
                    file.words += count_words(text);
                  });
    manifest.word_count += file.words;
  }
  return manifest;
}

TokenStream load_stream(const CorpusManifest& manifest, Granularity granularity) {
  if (manifest.files.empty()) throw NoFilesMatched("empty corpus manifest");
  Tokenizer tokenizer(granularity);
  TextSet generated;
  bool first = true;
  bool saw_records_file = false;
  for (const ManifestFile& file : manifest.files) {
    saw_records_file |= file.path.ends_with(".jsonl");
    for_each_text(manifest.file_path(file), manifest.records,
                  [&](const std::string& text, const TextEntry* entry) {
                    if (!first) tokenizer.feed(" ");
                    first = false;
                    tokenizer.feed(text);
                    if (entry != nullptr) {
                      generated.entries.push_back({entry->model, entry->temperature, {}, {}});
                    }
                  });
  }
  if (first && saw_records_file) {
    throw NoFilesMatched("no generation records match the filter");
  }
  TokenStream stream = std::move(tokenizer).finish();
  stream.source_meta = {{"root", manifest.root.generic_string()},
                        {"partition", std::string(to_string(manifest.partition))},
                        {"files", std::to_string(manifest.files.size())},
                        {"granularity", std::string(to_string(granularity))}};
  if (!generated.entries.empty()) stream.source_meta.merge(generated.meta());
  return stream;
}

TokenStream load_text_set(const TextSet& texts, Granularity granularity) {
  if (texts.entries.empty()) {
    throw NoFilesMatched("no generation records match the filter");
  }
  Tokenizer tokenizer(granularity);
  for (std::size_t i = 0; i < texts.entries.size(); ++i) {
    if (i > 0) tokenizer.feed(" ");
    tokenizer.feed(texts.entries[i].text);
  }
  TokenStream stream = std::move(tokenizer).finish();
  stream.source_meta = texts.meta();
  stream.source_meta["partition"] = "generated";
  stream.source_meta["granularity"] = std::string(to_string(granularity));
  return stream;
}

void to_json(nlohmann::json& j, const CorpusManifest& m) {
  nlohmann::json files = nlohmann::json::array();
  for (const ManifestFile& f : m.files) {
    files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"words", f.words}});
  }
  j = nlohmann::json{{"root", m.root.generic_string()},
                     {"include", m.include},
                     {"exclude", m.exclude},
                     {"partition", to_string(m.partition)},
                     {"files", std::move(files)},
                     {"word_count", m.word_count}};
  if (!m.records.empty()) {
    nlohmann::json filter{{"models", m.records.models},
                          {"temperatures", m.records.temperatures}};
    if (m.records.min_temperature) filter["min_temperature"] = *m.records.min_temperature;
    if (m.records.max_temperature) filter["max_temperature"] = *m.records.max_temperature;
    j["record_filter"] = std::move(filter);
  }
}

}  // namespace entrate
