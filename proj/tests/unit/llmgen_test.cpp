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
#include <set>
#include <string>

#include "entrate/errors.hpp"
#include "entrate/llmgen.hpp"
#include "support/stub_server.hpp"
#include "support/tempdir.hpp"

namespace entrate {
namespace {

using namespace std::chrono_literals;
using testing::StubReply;
using testing::StubServer;
using testing::TempDir;

class LlmgenTest : public ::testing::Test {
 protected:
  void SetUp() override { ::setenv("ENTRATE_TEST_KEY", "sk-test", 1); }
  void TearDown() override { ::unsetenv("ENTRATE_TEST_KEY"); }

  GenerationJob job(const StubServer& server, std::vector<std::string> items) const {
    GenerationJob j;
    j.endpoint = server.endpoint();
    j.model = "stub-model";
    j.items = std::move(items);
    j.temperatures = {0.3, 0.7};
    j.output = dir / "out" / "stub-model.jsonl";
    j.api_key_env = "ENTRATE_TEST_KEY";
    j.backoff = {20ms, 2.0, 500ms};
    j.timeout = 5s;
    return j;
  }

  TempDir dir;
};

std::vector<GenerationRecord> records_of(const std::filesystem::path& p) {
  return read_records(p);
}

TEST(Prompt, SubstitutesItem) {
  EXPECT_EQ(render_prompt("Write an essay about {item}", "France"),
            "Write an essay about France");
  EXPECT_EQ(render_prompt("{item}!", "x"), "x!");
}

TEST(Prompt, TemplateMustHaveExactlyOnePlaceholder) {
  GenerationJob j;
  j.model = "m";
  j.prompt_template = "Write an essay";
  EXPECT_THROW(validate_job(j), PlaceholderError);
  j.prompt_template = "{item} and {item}";
  EXPECT_THROW(validate_job(j), PlaceholderError);
  j.prompt_template = "About {item}";
  EXPECT_NO_THROW(validate_job(j));
}

TEST(Prompt, TemperatureRange) {
  GenerationJob j;
  j.model = "m";
  j.temperatures = {0.3, 2.5};
  EXPECT_THROW(validate_job(j), DataError);
  j.temperatures = {};
  EXPECT_THROW(validate_job(j), DataError);
}

TEST(RequestBody, OnlyModelMessagesTemperature) {
  const auto body = nlohmann::json::parse(request_body("m1", "Write an essay about Oslo", 0.5));
  std::set<std::string> keys;
  for (const auto& [k, v] : body.items()) keys.insert(k);
  EXPECT_EQ(keys, (std::set<std::string>{"model", "messages", "temperature"}));
  ASSERT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "Write an essay about Oslo");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.5);
}

TEST(Endpoint, AppendsRoute) {
  EXPECT_EQ(parse_endpoint("https://api.example.com/v1").path, "/v1/chat/completions");
  EXPECT_EQ(parse_endpoint("https://api.example.com/v1/").path, "/v1/chat/completions");
  const Endpoint full = parse_endpoint("http://localhost:8080/v1/chat/completions");
  EXPECT_EQ(full.origin, "http://localhost:8080");
  EXPECT_EQ(full.path, "/v1/chat/completions");
  EXPECT_THROW(parse_endpoint("ftp://x"), DataError);
}

TEST(Backoff, ExponentialWithCap) {
  const BackoffPolicy p;
  EXPECT_EQ(p.delay(0), 1000ms);
  EXPECT_EQ(p.delay(1), 2000ms);
  EXPECT_EQ(p.delay(3), 8000ms);
  EXPECT_EQ(p.delay(10), 60000ms);
}

TEST_F(LlmgenTest, WritesOneRecordPerItemAndTemperature) {
  StubServer server(testing::echo_reply);
  const auto j = job(server, {"France", "Spain", "Peru"});
  const RunSummary s = run_job(j);
  EXPECT_EQ(s.planned, 6u);
  EXPECT_EQ(s.succeeded, 6u);
  EXPECT_EQ(s.failed, 0u);

  const auto recs = records_of(j.output);
  ASSERT_EQ(recs.size(), 6u);
  std::set<std::pair<std::string, double>> keys;
  for (const auto& r : recs) {
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.model, "stub-model");
    EXPECT_EQ(r.prompt, "Write an essay about " + r.item);
    EXPECT_EQ(r.text, "Essay: " + r.prompt);
    EXPECT_EQ(r.http_status, 200);
    EXPECT_EQ(r.attempts, 1);
    ASSERT_TRUE(r.usage.has_value());
    EXPECT_EQ(r.usage->total_tokens, 10);
    EXPECT_FALSE(r.timestamp.empty());
    keys.emplace(r.item, r.temperature);
  }
  EXPECT_EQ(keys.size(), 6u);

  for (const auto& body : server.bodies()) {
    const auto parsed = nlohmann::json::parse(body);
    EXPECT_EQ(parsed.size(), 3u);
    EXPECT_TRUE(parsed.contains("model") && parsed.contains("messages") &&
                parsed.contains("temperature"));
  }
  for (const auto& auth : server.auth_headers()) EXPECT_EQ(auth, "Bearer sk-test");
}

TEST_F(LlmgenTest, EmptyItemsProduceNoRecords) {
  StubServer server(testing::echo_reply);
  const RunSummary s = run_job(job(server, {}));
  EXPECT_EQ(s.planned, 0u);
  EXPECT_EQ(server.requests(), 0u);
}

TEST_F(LlmgenTest, MissingKeyFailsFast) {
  StubServer server(testing::echo_reply);
  auto j = job(server, {"France"});
  j.api_key_env = "ENTRATE_TEST_KEY_UNSET";
  EXPECT_THROW(run_job(j), AuthError);
  EXPECT_EQ(server.requests(), 0u);
}

TEST_F(LlmgenTest, UnauthorizedStopsRun) {
  StubServer server([](const std::string&, int) { return StubReply{401, "", ""}; });
  auto j = job(server, {"a", "b", "c", "d"});
  j.concurrency = 1;
  EXPECT_THROW(run_job(j), AuthError);
  EXPECT_EQ(server.requests(), 1u);
}

TEST_F(LlmgenTest, ConcurrencyCapRespected) {
  StubServer server(testing::echo_reply, 60ms);
  auto j = job(server, {"a", "b", "c", "d", "e", "f"});
  j.concurrency = 3;
  run_job(j);
  EXPECT_EQ(server.requests(), 12u);
  EXPECT_LE(server.max_in_flight(), 3);
  EXPECT_GE(server.max_in_flight(), 2);
}

TEST_F(LlmgenTest, RetriesWithBackoff) {
  StubServer server([](const std::string& prompt, int attempt) {
    if (prompt.ends_with("flaky") && attempt < 2) return StubReply{503, "", ""};
    return testing::echo_reply(prompt, attempt);
  });
  auto j = job(server, {"flaky"});
  j.temperatures = {0.5};
  const RunSummary s = run_job(j);
  EXPECT_EQ(s.succeeded, 1u);
  const auto recs = records_of(j.output);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].attempts, 3);
  const auto times = server.arrivals("Write an essay about flaky", 0.5);
  ASSERT_EQ(times.size(), 3u);
  EXPECT_GE(times[1] - times[0], 20ms);
  EXPECT_GE(times[2] - times[1], 40ms);
}

TEST_F(LlmgenTest, HonoursRetryAfter) {
  StubServer server([](const std::string& prompt, int attempt) {
    if (attempt == 0) return StubReply{429, "", "1"};
    return testing::echo_reply(prompt, attempt);
  });
  auto j = job(server, {"x"});
  j.temperatures = {0.5};
  j.backoff = {20ms, 2.0, 5s};
  run_job(j);
  const auto times = server.arrivals("Write an essay about x", 0.5);
  ASSERT_EQ(times.size(), 2u);
  EXPECT_GE(times[1] - times[0], 950ms);
}

TEST_F(LlmgenTest, ExhaustedRetriesRecordFailureAndContinue) {
  StubServer server([](const std::string& prompt, int attempt) {
    if (prompt.ends_with("bad")) return StubReply{500, "", ""};
    return testing::echo_reply(prompt, attempt);
  });
  auto j = job(server, {"bad", "good"});
  j.temperatures = {0.5};
  j.max_retries = 2;
  const RunSummary s = run_job(j);
  EXPECT_EQ(s.succeeded, 1u);
  EXPECT_EQ(s.failed, 1u);
  for (const auto& r : records_of(j.output)) {
    if (r.item == "bad") {
      EXPECT_FALSE(r.ok());
      EXPECT_TRUE(r.text.empty());
      EXPECT_FALSE(r.error.empty());
      EXPECT_EQ(r.http_status, 500);
      EXPECT_EQ(r.attempts, 3);
    } else {
      EXPECT_TRUE(r.ok());
    }
  }
}

TEST_F(LlmgenTest, ClientErrorIsNotRetried) {
  StubServer server([](const std::string&, int) { return StubReply{400, "", ""}; });
  auto j = job(server, {"x"});
  j.temperatures = {0.5};
  EXPECT_EQ(run_job(j).failed, 1u);
  EXPECT_EQ(server.requests(), 1u);
}

TEST_F(LlmgenTest, ResumeSkipsExistingRecords) {
  StubServer server(testing::echo_reply);
  const auto j = job(server, {"a", "b", "c"});
  run_job(j);
  const RunSummary again = run_job(j);
  EXPECT_EQ(again.planned, 0u);
  EXPECT_EQ(again.skipped, 6u);
  EXPECT_EQ(server.requests(), 6u);
  EXPECT_EQ(records_of(j.output).size(), 6u);

  // Extending the sweep only requests the new combinations.
  auto more = j;
  more.items.push_back("d");
  more.temperatures.push_back(1.0);
  const RunSummary ext = run_job(more);
  EXPECT_EQ(ext.planned, 12u - 6u);
  const auto recs = records_of(j.output);
  EXPECT_EQ(recs.size(), 12u);
  std::set<std::pair<std::string, double>> keys;
  for (const auto& r : recs) keys.emplace(r.item, r.temperature);
  EXPECT_EQ(keys.size(), 12u);
}

TEST_F(LlmgenTest, ResumeRepairsTornFinalLine) {
  StubServer server(testing::echo_reply);
  const auto j = job(server, {"a", "b"});
  run_job(j);
  // Simulate a run killed mid-write: drop the last record and leave half of it.
  std::string content = testing::slurp(j.output);
  content.pop_back();
  const auto cut = content.rfind('\n');
  const std::string last = content.substr(cut + 1);
  content = content.substr(0, cut + 1) + last.substr(0, last.size() / 2);
  dir.write("out/stub-model.jsonl", content);

  const RunSummary s = run_job(j);
  EXPECT_EQ(s.planned, 1u);
  const auto recs = records_of(j.output);
  EXPECT_EQ(recs.size(), 4u);
}

TEST_F(LlmgenTest, FailuresAreKeptUnlessRetryRequested) {
  std::atomic<bool> healthy{false};
  StubServer server([&](const std::string& prompt, int attempt) {
    if (!healthy) return StubReply{500, "", ""};
    return testing::echo_reply(prompt, attempt);
  });
  auto j = job(server, {"a"});
  j.max_retries = 0;
  EXPECT_EQ(run_job(j).failed, 2u);
  healthy = true;
  EXPECT_EQ(run_job(j).planned, 0u);

  j.retry_failed = true;
  const RunSummary s = run_job(j);
  EXPECT_EQ(s.planned, 2u);
  EXPECT_EQ(s.succeeded, 2u);
  const auto recs = records_of(j.output);
  ASSERT_EQ(recs.size(), 2u);
  for (const auto& r : recs) EXPECT_TRUE(r.ok());
}

TEST(Items, ReadSkipsBlanksAndComments) {
  TempDir dir;
  const auto p = dir.write("items.txt", "# header\nFrance\n\n  Spain  \r\n");
  EXPECT_EQ(read_items(p), (std::vector<std::string>{"France", "Spain"}));
}

}  // namespace
}  // namespace entrate
