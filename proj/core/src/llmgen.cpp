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

#include "entrate/llmgen.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "entrate/errors.hpp"
#include "entrate/ingest.hpp"

namespace entrate {
namespace {

constexpr std::string_view kPlaceholder = "{item}";

using RecordKey = std::tuple<std::string, std::string, double>;

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  ::gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Loads the keys already present in `path`. A final line cut short by an
// interrupted run is dropped; with `drop_failures` failure records are
// removed as well so they are attempted again.
std::set<RecordKey> prepare_output(const std::filesystem::path& path,
                                   bool drop_failures) {
  std::set<RecordKey> done;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return done;

  const std::string content = read_text_file(path);
  std::vector<std::string> kept;
  bool rewrite = false;
  std::size_t begin = 0;
  std::size_t line_no = 0;
  while (begin < content.size()) {
    std::size_t end = content.find('\n', begin);
    const bool terminated = end != std::string::npos;
    if (!terminated) end = content.size();
    std::string line = content.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    GenerationRecord record;
    try {
      record = nlohmann::json::parse(line).get<GenerationRecord>();
    } catch (const nlohmann::json::exception& e) {
      if (!terminated) {
        rewrite = true;  // torn tail write
        continue;
      }
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (!terminated) rewrite = true;
    if (drop_failures && !record.ok()) {
      rewrite = true;
      continue;
    }
    done.emplace(record.model, record.item, record.temperature);
    kept.push_back(std::move(line));
  }
  if (rewrite) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot rewrite " + path.string());
    for (const std::string& line : kept) out << line << '\n';
  }
  return done;
}

class Appender {
 public:
  Appender(const std::filesystem::path& path, const RecordCallback& callback)
      : out_(path, std::ios::app), callback_(callback) {
    if (!out_) throw IoError("cannot append to " + path.string());
  }

  void write(const GenerationRecord& record) {
    std::lock_guard lock(mutex_);
    out_ << to_jsonl(record) << '\n';
    out_.flush();
    if (callback_) callback_(record);
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
  const RecordCallback& callback_;
};

bool retryable(int status) { return status == 0 || status == 429 || status >= 500; }

std::optional<TokenUsage> parse_usage(const nlohmann::json& response) {
  auto it = response.find("usage");
  if (it == response.end() || !it->is_object()) return std::nullopt;
  TokenUsage u;
  u.prompt_tokens = it->value("prompt_tokens", std::int64_t{-1});
  u.completion_tokens = it->value("completion_tokens", std::int64_t{-1});
  u.total_tokens = it->value("total_tokens", std::int64_t{-1});
  return u;
}

std::vector<PlannedRequest> build_plan(const GenerationJob& job,
                                       std::set<RecordKey>& done,
                                       std::size_t& skipped) {
  std::vector<PlannedRequest> plan;
  for (const std::string& item : job.items) {
    for (double t : job.temperatures) {
      if (!done.emplace(job.model, item, t).second) {
        ++skipped;
        continue;
      }
      std::string prompt = render_prompt(job.prompt_template, item);
      std::string body = request_body(job.model, prompt, t);
      plan.push_back({item, t, std::move(prompt), std::move(body)});
    }
  }
  return plan;
}

}  // namespace

std::chrono::milliseconds BackoffPolicy::delay(int retry) const {
  const double ms = static_cast<double>(initial.count()) *
                    std::pow(factor, static_cast<double>(retry));
  return std::chrono::milliseconds(static_cast<std::int64_t>(
      std::min(ms, static_cast<double>(max.count()))));
}

void validate_job(const GenerationJob& job) {
  const std::size_t first = job.prompt_template.find(kPlaceholder);
  if (first == std::string::npos ||
      job.prompt_template.find(kPlaceholder, first + 1) != std::string::npos) {
    throw PlaceholderError("prompt template must contain exactly one {item}: \"" +
                           job.prompt_template + "\"");
  }
  if (job.temperatures.empty()) throw DataError("no temperatures given");
  for (double t : job.temperatures) {
    if (!(t >= 0.0 && t <= 2.0)) {
      throw DataError("temperature " + std::to_string(t) + " outside [0, 2]");
    }
  }
  if (job.model.empty()) throw DataError("model name is empty");
  if (job.concurrency < 1) throw DataError("concurrency must be at least 1");
  if (job.max_retries < 0) throw DataError("max_retries must be non-negative");
}

std::string render_prompt(std::string_view prompt_template, std::string_view item) {
  const std::size_t at = prompt_template.find(kPlaceholder);
  if (at == std::string_view::npos) {
    throw PlaceholderError("prompt template has no {item} placeholder");
  }
  std::string out(prompt_template.substr(0, at));
  out += item;
  out += prompt_template.substr(at + kPlaceholder.size());
  return out;
}

std::string request_body(std::string_view model, std::string_view prompt,
                         double temperature) {
  const nlohmann::json body{
      {"model", model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", temperature}};
  return body.dump();
}

Endpoint parse_endpoint(std::string_view url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw DataError("endpoint must start with http:// or https://");
  }
  const std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw DataError("unsupported endpoint scheme '" + std::string(scheme) + "'");
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = std::string(url.substr(0, path_start));
  ep.path = path_start == std::string_view::npos ? "" : std::string(url.substr(path_start));
  while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
  constexpr std::string_view kRoute = "/chat/completions";
  if (ep.path.size() < kRoute.size() ||
      ep.path.compare(ep.path.size() - kRoute.size(), kRoute.size(), kRoute) != 0) {
    ep.path += kRoute;
  }
  return ep;
}

std::vector<PlannedRequest> plan_job(const GenerationJob& job) {
  validate_job(job);
  std::set<RecordKey> done;
  if (!job.output.empty()) done = prepare_output(job.output, false);
  std::size_t skipped = 0;
  return build_plan(job, done, skipped);
}

RunSummary run_job(const GenerationJob& job, const RecordCallback& on_record) {
  validate_job(job);
  const char* key = std::getenv(job.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthError("API key missing: set the " + job.api_key_env +
                    " environment variable");
  }
  const Endpoint endpoint = parse_endpoint(job.endpoint);
  if (job.output.has_parent_path()) {
    std::filesystem::create_directories(job.output.parent_path());
  }

  std::set<RecordKey> done = prepare_output(job.output, job.retry_failed);
  RunSummary summary;
  const std::vector<PlannedRequest> plan = build_plan(job, done, summary.skipped);
  summary.planned = plan.size();
  if (plan.empty()) return summary;

  Appender appender(job.output, on_record);
  const httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::atomic<std::size_t> succeeded{0};
  std::atomic<std::size_t> failed{0};
  std::mutex auth_mutex;
  std::string auth_failure;

  auto sleep_unless_stopped = [&](std::chrono::milliseconds total) {
    const auto until = std::chrono::steady_clock::now() + total;
    while (!stop && std::chrono::steady_clock::now() < until) {
      std::this_thread::sleep_for(
          std::min<std::chrono::steady_clock::duration>(
              std::chrono::milliseconds(50), until - std::chrono::steady_clock::now()));
    }
  };

  auto worker = [&] {
    httplib::Client client(endpoint.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(job.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
        job.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    for (std::size_t i = next++; i < plan.size() && !stop; i = next++) {
      const PlannedRequest& req = plan[i];
      GenerationRecord record;
      record.model = job.model;
      record.temperature = req.temperature;
      record.item = req.item;
      record.prompt = req.prompt;

      for (int attempt = 0;; ++attempt) {
        record.attempts = attempt + 1;
        record.error.clear();
        std::chrono::milliseconds wait = job.backoff.delay(attempt);
        auto res = client.Post(endpoint.path, headers, req.body, "application/json");
        if (!res) {
          record.http_status = 0;
          record.error = "transport error: " + httplib::to_string(res.error());
        } else {
          record.http_status = res->status;
          if (res->status == 401 || res->status == 403) {
            std::lock_guard lock(auth_mutex);
            auth_failure = "endpoint rejected the API key (HTTP " +
                           std::to_string(res->status) + ")";
            stop = true;
            return;
          }
          if (res->status >= 200 && res->status < 300) {
            try {
              const auto response = nlohmann::json::parse(res->body);
              record.text = response.at("choices").at(0).at("message").at("content")
                                .get<std::string>();
              record.usage = parse_usage(response);
              if (record.text.empty()) record.error = "empty completion";
            } catch (const nlohmann::json::exception& e) {
              record.error = std::string("malformed response: ") + e.what();
            }
            break;
          }
          record.error = "HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 200);
          if (res->status == 429 && res->has_header("Retry-After")) {
            const long hinted = std::atol(res->get_header_value("Retry-After").c_str());
            wait = std::min(job.backoff.max,
                            std::max(wait, std::chrono::milliseconds(hinted * 1000)));
          }
        }
        if (!retryable(record.http_status) || attempt >= job.max_retries) break;
        sleep_unless_stopped(wait);
        if (stop) return;
      }

      record.timestamp = utc_timestamp();
      if (!record.ok()) {
        record.text.clear();
        ++failed;
        std::cerr << "entrate: request failed for " << job.model << " / \""
                  << record.item << "\" / T=" << record.temperature << ": "
                  << record.error << '\n';
      } else {
        ++succeeded;
      }
      appender.write(record);
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(job.concurrency),
                                             plan.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (!auth_failure.empty()) throw AuthError(auth_failure);
  summary.succeeded = succeeded;
  summary.failed = failed;
  return summary;
}

std::vector<std::string> read_items(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> items;
  std::string line;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    const auto end = line.find_last_not_of(" \t\r");
    items.push_back(line.substr(begin, end - begin + 1));
  }
  return items;
}

}  // namespace entrate
