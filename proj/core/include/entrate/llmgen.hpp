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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "entrate/records.hpp"

namespace entrate {

struct BackoffPolicy {
  std::chrono::milliseconds initial{1000};
  double factor = 2.0;
  std::chrono::milliseconds max{60000};

  // Wait before retry number `retry` (0-based).
  std::chrono::milliseconds delay(int retry) const;
};

// One model swept over items x temperatures against an OpenAI-compatible
// chat-completions endpoint. Only model, messages and temperature are sent;
// every other sampling parameter is left at the provider default.
struct GenerationJob {
  // Full URL of the completions route, or a base URL such as
  // "https://api.example.com/v1" to which "/chat/completions" is appended.
  std::string endpoint;
  std::string model;
  std::string prompt_template = "Write an essay about {item}";
  std::vector<std::string> items;
  std::vector<double> temperatures{0.3, 0.5, 0.7};
  int max_retries = 5;
  std::chrono::milliseconds timeout{std::chrono::minutes(5)};
  std::filesystem::path output;
  int concurrency = 4;
  BackoffPolicy backoff;
  std::string api_key_env = "ENTRATE_API_KEY";
  // Drop failure records from `output` before resuming so they are re-run.
  bool retry_failed = false;
};

// Throws PlaceholderError unless the template has exactly one {item}, and
// DataError for temperatures outside [0, 2] or an empty temperature list.
void validate_job(const GenerationJob& job);

std::string render_prompt(std::string_view prompt_template,
                          std::string_view item);

// {"model": ..., "messages": [{"role": "user", "content": ...}],
//  "temperature": ...}
std::string request_body(std::string_view model, std::string_view prompt,
                         double temperature);

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};
Endpoint parse_endpoint(std::string_view url);

struct PlannedRequest {
  std::string item;
  double temperature = 0.0;
  std::string prompt;
  std::string body;
};

// Requests still missing from job.output, in item-major order.
std::vector<PlannedRequest> plan_job(const GenerationJob& job);

struct RunSummary {
  std::size_t planned = 0;
  std::size_t skipped = 0;  // already present in the output file
  std::size_t succeeded = 0;
  std::size_t failed = 0;
};

using RecordCallback = std::function<void(const GenerationRecord&)>;

// Runs the sweep with at most job.concurrency requests in flight, appending
// one JSONL record per (item, temperature) to job.output. Rate limits (429),
// 5xx responses and transport errors are retried with exponential backoff;
// exhausted retries produce a failure record and the run continues. A
// missing key or a 401/403 response throws AuthError.
RunSummary run_job(const GenerationJob& job, const RecordCallback& on_record = {});

// One item per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> read_items(const std::filesystem::path& path);

}  // namespace entrate
