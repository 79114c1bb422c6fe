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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entrate/tokenize.hpp"

namespace entrate {

struct TokenUsage {
  std::int64_t prompt_tokens = -1;  // -1 when the provider omitted a field
  std::int64_t completion_tokens = -1;
  std::int64_t total_tokens = -1;
};

// One line of a generation JSONL file.
//
//   model        string   model name sent in the request
//   temperature  number   sampling temperature sent in the request
//   item         string   prompt item substituted into the template
//   prompt       string   full user message
//   text         string   completion text ("" on failure)
//   usage        object   {prompt_tokens, completion_tokens, total_tokens};
//                         only present when the provider reported it
//   timestamp    string   UTC, ISO 8601 ("2026-01-31T12:00:00Z")
//   http_status  integer  last HTTP status, 0 for transport errors
//   attempts     integer  requests made for this record
//   error        string   only present on failure records
struct GenerationRecord {
  std::string model;
  double temperature = 0.0;
  std::string item;
  std::string prompt;
  std::string text;
  std::optional<TokenUsage> usage;
  std::string timestamp;
  int http_status = 0;
  int attempts = 0;
  std::string error;

  bool ok() const { return error.empty() && !text.empty(); }
};

void to_json(nlohmann::json& j, const GenerationRecord& record);
void from_json(const nlohmann::json& j, GenerationRecord& record);

// Serialized record without the trailing newline.
std::string to_jsonl(const GenerationRecord& record);

// Throws IoError if unreadable and ParseError (with the line number) on a
// malformed line. Blank lines are skipped.
std::vector<GenerationRecord> read_records(const std::filesystem::path& path);

// Selects records by model and temperature. Empty criteria match everything;
// temperature bounds are inclusive.
struct RecordFilter {
  std::vector<std::string> models;
  std::vector<double> temperatures;
  std::optional<double> min_temperature;
  std::optional<double> max_temperature;

  bool matches(const GenerationRecord& record) const;
  bool empty() const {
    return models.empty() && temperatures.empty() && !min_temperature &&
           !max_temperature;
  }
};

struct TextEntry {
  std::string model;
  double temperature = 0.0;
  std::string item;
  std::string text;
};

// Successful record texts selected from generation files, in file order.
struct TextSet {
  std::vector<TextEntry> entries;
  std::vector<std::string> sources;

  // "models" and "temperatures" (sorted, comma separated) plus "records".
  SourceMeta meta() const;
};

TextSet corpus_from_records(std::span<const std::filesystem::path> paths,
                            const RecordFilter& filter = {});

}  // namespace entrate
