#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "scholarlink/errors.hpp"
#include "scholarlink/json_schema.hpp"
#include "scholarlink/llm.hpp"

using namespace scholarlink;
using nlohmann::json;

namespace {

const PromptLibrary& prompts() {
  static PromptLibrary lib =
      PromptLibrary::load(std::string(SCHOLARLINK_DATA_DIR) + "/prompts/manifest.json");
  return lib;
}

json bool_schema(const char* key) {
  return json{{"type", "object"},
              {"required", json::array({key})},
              {"properties", json{{key, json{{"type", "boolean"}}}}}};
}

PromptTemplate tiny_template() {
  PromptTemplate t;
  t.id = "judge";
  t.text = "Is {{subject}} ready? Context: {{context}}";
  t.slots = {"subject", "context"};
  t.key_slots = {"subject"};
  t.response_schema = bool_schema("ready");
  return t;
}

}  // namespace

TEST_CASE("schema validator accepts and rejects the supported subset") {
  json schema = {
      {"type", "object"},
      {"required", json::array({"keywords"})},
      {"properties",
       json{{"keywords",
             json{{"type", "array"},
                  {"items", json{{"type", "string"}, {"minLength", 1}}},
                  {"minItems", 1},
                  {"maxItems", 3}}},
            {"count", json{{"type", "integer"}}},
            {"kind", json{{"enum", json::array({"a", "b"})}}}}},
  };

  CHECK_FALSE(json_schema::validate(schema, json::parse(R"({"keywords":["x"]})")));
  CHECK_FALSE(json_schema::validate(schema, json::parse(R"({"keywords":["x"],"count":2,"kind":"a"})")));

  auto missing = json_schema::validate(schema, json::parse(R"({})"));
  REQUIRE(missing.has_value());
  CHECK(missing->find("keywords") != std::string::npos);

  CHECK(json_schema::validate(schema, json::parse(R"({"keywords":[]})")).has_value());
  CHECK(json_schema::validate(schema, json::parse(R"({"keywords":["a","b","c","d"]})")).has_value());
  CHECK(json_schema::validate(schema, json::parse(R"({"keywords":[1]})")).has_value());
  CHECK(json_schema::validate(schema, json::parse(R"({"keywords":[""]})")).has_value());
  CHECK(json_schema::validate(schema, json::parse(R"({"keywords":["x"],"count":2.5})")).has_value());
  CHECK(json_schema::validate(schema, json::parse(R"({"keywords":["x"],"kind":"z"})")).has_value());
  CHECK(json_schema::validate(schema, json::parse(R"([])")).has_value());

  // Paths point at the offending node.
  auto err = json_schema::validate(schema, json::parse(R"({"keywords":["ok",3]})"));
  REQUIRE(err.has_value());
  CHECK(err->find("$.keywords[1]") != std::string::npos);
}

TEST_CASE("prompt library loads shipped templates and validates them") {
  const auto& lib = prompts();
  auto ids = lib.ids();
  for (const char* want : {"filter_biographical", "filter_target_match", "extract_profile",
                           "translate_institution", "identify_research_area", "native_name",
                           "keyword_related", "institution_equivalent"}) {
    INFO("missing template: " << want);
    CHECK(std::find(ids.begin(), ids.end(), std::string(want)) != ids.end());
  }
  const auto& t = lib.get("filter_biographical");
  CHECK(t.key_slots == std::vector<std::string>{"url"});
  CHECK(t.text.find("{{document}}") != std::string::npos);
  CHECK_THROWS_AS(lib.get("nope"), ConfigError);
}

TEST_CASE("render and fingerprint") {
  auto t = tiny_template();
  std::map<std::string, std::string> slots = {{"subject", "cache"}, {"context", "warm"}};
  CHECK(render_prompt(t, slots) == "Is cache ready? Context: warm");
  CHECK(request_fingerprint(t, slots) == "judge|cache");
  CHECK_THROWS_AS(render_prompt(t, {{"subject", "x"}}), ConfigError);
}

TEST_CASE("scripted stub replays responses in order and holds the last") {
  json script = {{"responses",
                  json{{"judge|cache", json::array({"one", "two"})},
                       {"judge|disk", "only"},
                       {"judge|obj", json{{"ready", true}}}}}};
  ScriptedStubProvider stub(script, "stub");
  CHECK(stub.complete("", "judge|cache") == "one");
  CHECK(stub.complete("", "judge|cache") == "two");
  CHECK(stub.complete("", "judge|cache") == "two");
  CHECK(stub.complete("", "judge|disk") == "only");
  CHECK(json::parse(stub.complete("", "judge|obj"))["ready"] == true);
  CHECK(stub.calls() == 5);
  CHECK_THROWS_AS(stub.complete("", "judge|unknown"), ProviderError);
}

TEST_CASE("gateway registry rejects duplicates") {
  LlmGateway gw;
  gw.register_provider(std::make_shared<ScriptedStubProvider>(json::object(), "stub"));
  gw.register_provider(std::make_shared<ScriptedStubProvider>(json::object(), "remote"));
  CHECK(gw.providers() == std::vector<std::string>{"remote", "stub"});
  CHECK_THROWS_AS(
      gw.register_provider(std::make_shared<ScriptedStubProvider>(json::object(), "stub")),
      DuplicateProvider);
  CHECK_THROWS_AS(gw.complete_structured(tiny_template(), {{"subject", "x"}, {"context", "y"}},
                                         "missing", 0),
                  ProviderError);
}

TEST_CASE("complete_structured validates, retries, and stops at R") {
  auto t = tiny_template();
  std::map<std::string, std::string> slots = {{"subject", "cache"}, {"context", "warm"}};

  SUBCASE("clean response, zero retries") {
    json script = {{"judge|cache", "{\"ready\": true}"}};
    auto stub = std::make_shared<ScriptedStubProvider>(script, "stub");
    LlmGateway gw;
    gw.register_provider(stub);
    auto out = gw.complete_structured(t, slots, "stub", 2);
    CHECK(out.value["ready"] == true);
    CHECK(out.retries == 0);
    CHECK(stub->calls() == 1);
    CHECK(gw.usage("stub").calls == 1);
    CHECK(gw.usage("stub").retries == 0);
  }

  SUBCASE("fenced output parses") {
    json script = {{"judge|cache", "Sure:\n```json\n{\"ready\": false}\n```"}};
    auto stub = std::make_shared<ScriptedStubProvider>(script, "stub");
    LlmGateway gw;
    gw.register_provider(stub);
    CHECK(gw.complete_structured(t, slots, "stub", 0).value["ready"] == false);
  }

  SUBCASE("malformed once then valid: one retry, error appended to reprompt") {
    json script = {{"judge|cache", json::array({"not json", "{\"ready\": true}"})}};
    auto stub = std::make_shared<ScriptedStubProvider>(script, "stub");
    LlmGateway gw;
    gw.register_provider(stub);
    auto out = gw.complete_structured(t, slots, "stub", 2);
    CHECK(out.retries == 1);
    CHECK(stub->calls() == 2);
    CHECK(gw.usage("stub").retries == 1);
  }

  SUBCASE("schema mismatch repairs too") {
    json script = {{"judge|cache", json::array({"{\"ready\": \"yes\"}", "{\"ready\": true}"})}};
    auto stub = std::make_shared<ScriptedStubProvider>(script, "stub");
    LlmGateway gw;
    gw.register_provider(stub);
    CHECK(gw.complete_structured(t, slots, "stub", 2).retries == 1);
  }

  SUBCASE("always malformed: SchemaViolation after exactly R retries") {
    json script = {{"judge|cache", "still not json"}};
    auto stub = std::make_shared<ScriptedStubProvider>(script, "stub");
    LlmGateway gw;
    gw.register_provider(stub);
    CHECK_THROWS_AS(gw.complete_structured(t, slots, "stub", 2), SchemaViolation);
    CHECK(stub->calls() == 3);  // 1 initial + R retries
    try {
      gw.complete_structured(t, slots, "stub", 2);
    } catch (const SchemaViolation& e) {
      CHECK_FALSE(e.last_validation_error.empty());
    }
  }

  SUBCASE("refusal marker raises ContentRefusal") {
    json script = {{"judge|cache", "[REFUSED] cannot help"}};
    auto stub = std::make_shared<ScriptedStubProvider>(script, "stub");
    LlmGateway gw;
    gw.register_provider(stub);
    CHECK_THROWS_AS(gw.complete_structured(t, slots, "stub", 2), ContentRefusal);
  }
}

TEST_CASE("http provider speaks chat-completion over localhost") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    auto body = json::parse(req.body);
    CHECK(body["model"] == "test-model");
    CHECK(req.get_header_value("Authorization") == "Bearer sekrit");
    std::string content = body["messages"][0]["content"].get<std::string>();
    json reply = {{"choices",
                   json::array({json{{"message",
                                      json{{"role", "assistant"},
                                           {"content", content.find("cache") != std::string::npos
                                                           ? "{\"ready\": true}"
                                                           : "{\"ready\": false}"}}}}})}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("SCHOLARLINK_TEST_KEY", "sekrit", 1);
  auto provider = std::make_shared<HttpLlmProvider>(
      "remote", "http://127.0.0.1:" + std::to_string(port), "/v1/chat/completions", "test-model",
      "SCHOLARLINK_TEST_KEY");
  LlmGateway gw;
  gw.register_provider(provider);
  auto out = gw.complete_structured(tiny_template(), {{"subject", "cache"}, {"context", "x"}},
                                    "remote", 0);
  CHECK(out.value["ready"] == true);
  CHECK(hits == 1);

  unsetenv("SCHOLARLINK_TEST_KEY");
  CHECK_THROWS_AS(provider->complete("p", "f"), ProviderError);

  server.stop();
  worker.join();
}
