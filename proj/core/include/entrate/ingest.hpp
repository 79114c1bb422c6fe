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

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "entrate/records.hpp"
#include "entrate/tokenize.hpp"

namespace entrate {

enum class Partition { kWritten, kSpoken, kGenerated };

std::string_view to_string(Partition p);
Partition parse_partition(std::string_view name);

struct ManifestFile {
  std::string path;  // relative to the root, '/'-separated
  std::uintmax_t bytes = 0;
  std::uint64_t words = 0;
};

struct ScanOptions {
  std::vector<std::string> include{"*.txt"};
  std::vector<std::string> exclude;
  Partition partition = Partition::kWritten;
  // Applied to ".jsonl" generation files.
  RecordFilter records;
};

struct CorpusManifest {
  std::filesystem::path root;
  std::vector<std::string> include;
  std::vector<std::string> exclude;
  Partition partition = Partition::kWritten;
  RecordFilter records;
  std::vector<ManifestFile> files;  // sorted by path
  std::uint64_t word_count = 0;

  std::filesystem::path file_path(const ManifestFile& file) const;
};

// Recursively lists regular files under `root` whose relative path matches an
// include glob and no exclude glob (fnmatch syntax; '*' also crosses '/').
// A file given as `root` is taken as the only entry. Files ending in ".jsonl"
// are read as generation records. Throws RootNotFound and NoFilesMatched.
CorpusManifest scan_corpus(const std::filesystem::path& root,
                           const ScanOptions& options = {});

// Concatenates the manifest's texts in order with a single space between
// files (and between records of generation files), then tokenizes. Throws
// IoError naming the first unreadable file.
TokenStream load_stream(const CorpusManifest& manifest, Granularity granularity);

// Tokenizes record texts joined by single spaces. Throws NoFilesMatched when
// the set is empty.
TokenStream load_text_set(const TextSet& texts, Granularity granularity);

std::string read_text_file(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const CorpusManifest& manifest);

}  // namespace entrate
