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

#include "entrate/records.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "entrate/errors.hpp"

namespace entrate {
namespace {

std::string format_temperature(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  return buf;
}

template <typename T>
std::string join(const std::set<T>& values, auto&& format) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    out += format(v);
  }
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const GenerationRecord& r) {
  j = nlohmann::json{{"model", r.model},   {"temperature", r.temperature},
                     {"item", r.item},     {"prompt", r.prompt},
                     {"text", r.text},     {"timestamp", r.timestamp},
                     {"http_status", r.http_status}, {"attempts", r.attempts}};
  if (r.usage) {
    nlohmann::json usage = nlohmann::json::object();
    if (r.usage->prompt_tokens >= 0) usage["prompt_tokens"] = r.usage->prompt_tokens;
    if (r.usage->completion_tokens >= 0) {
      usage["completion_tokens"] = r.usage->completion_tokens;
    }
    if (r.usage->total_tokens >= 0) usage["total_tokens"] = r.usage->total_tokens;
    j["usage"] = std::move(usage);
  }
  if (!r.error.empty()) j["error"] = r.error;
}

void from_json(const nlohmann::json& j, GenerationRecord& r) {
  r.model = j.at("model").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.item = j.at("item").get<std::string>();
  r.prompt = j.value("prompt", std::string());
  r.text = j.value("text", std::string());
  r.timestamp = j.value("timestamp", std::string());
  r.http_status = j.value("http_status", 0);
  r.attempts = j.value("attempts", 0);
  r.error = j.value("error", std::string());
  r.usage.reset();
  if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
    TokenUsage u;
    u.prompt_tokens = it->value("prompt_tokens", std::int64_t{-1});
    u.completion_tokens = it->value("completion_tokens", std::int64_t{-1});
    u.total_tokens = it->value("total_tokens", std::int64_t{-1});
    r.usage = u;
  }
}

std::string to_jsonl(const GenerationRecord& record) {
  return nlohmann::json(record).dump();
}

std::vector<GenerationRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<GenerationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(nlohmann::json::parse(line).get<GenerationRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  return records;
}

bool RecordFilter::matches(const GenerationRecord& record) const {
  if (!models.empty() &&
      std::find(models.begin(), models.end(), record.model) == models.end()) {
    return false;
  }
  if (!temperatures.empty() &&
      std::none_of(temperatures.begin(), temperatures.end(), [&](double t) {
        return std::abs(t - record.temperature) < 1e-9;
      })) {
    return false;
  }
  if (min_temperature && record.temperature < *min_temperature - 1e-9) {
    return false;
  }
  if (max_temperature && record.temperature > *max_temperature + 1e-9) {
    return false;
  }
  return true;
}

SourceMeta TextSet::meta() const {
  std::set<std::string> models;
  std::set<double> temperatures;
  for (const TextEntry& e : entries) {
    models.insert(e.model);
    temperatures.insert(e.temperature);
  }
  return {{"models", join(models, [](const std::string& s) { return s; })},
          {"temperatures", join(temperatures, format_temperature)},
          {"records", std::to_string(entries.size())}};
}

TextSet corpus_from_records(std::span<const std::filesystem::path> paths,
                            const RecordFilter& filter) {
  TextSet set;
  for (const auto& path : paths) {
    set.sources.push_back(path.generic_string());
    for (GenerationRecord& r : read_records(path)) {
      if (!r.ok() || !filter.matches(r)) continue;
      set.entries.push_back(
          {std::move(r.model), r.temperature, std::move(r.item), std::move(r.text)});
    }
  }
  return set;
}

}  // namespace entrate
