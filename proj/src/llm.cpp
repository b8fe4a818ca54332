#include "scholarlink/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "scholarlink/errors.hpp"
#include "scholarlink/json_schema.hpp"
#include "scholarlink/strings.hpp"

namespace scholarlink {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + what + ": " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Extracts the {{marker}} names appearing in template text.
std::vector<std::string> markers_in(const std::string& text) {
    std::vector<std::string> out;
    size_t pos = 0;
    while ((pos = text.find("{{", pos)) != std::string::npos) {
        auto end = text.find("}}", pos + 2);
        if (end == std::string::npos) break;
        out.push_back(text.substr(pos + 2, end - pos - 2));
        pos = end + 2;
    }
    return out;
}

// The model may wrap JSON in a markdown fence; take the fenced body if the
// whole text does not parse.
json parse_model_json(const std::string& raw, std::string& error) {
    std::string text = strings::trim(raw);
    auto fence = text.find("```");
    if (!text.empty() && (text.front() == '{' || text.front() == '[')) {
        auto parsed = json::parse(text, nullptr, false);
        if (!parsed.is_discarded()) return parsed;
    }
    if (fence != std::string::npos) {
        auto body_start = text.find('\n', fence);
        auto close = text.rfind("```");
        if (body_start != std::string::npos && close > body_start) {
            auto parsed =
                json::parse(text.substr(body_start + 1, close - body_start - 1), nullptr, false);
            if (!parsed.is_discarded()) return parsed;
        }
    }
    auto parsed = json::parse(text, nullptr, false);
    if (!parsed.is_discarded()) return parsed;
    error = "output is not valid JSON";
    return json();
}

}  // namespace

PromptLibrary PromptLibrary::load(const std::string& manifest_path) {
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path, "prompt manifest"));
    } catch (const json::exception& e) {
        throw ConfigError("prompt manifest is not valid JSON: " + std::string(e.what()));
    }
    if (manifest.value("origin", "") != "reconstructed")
        throw ConfigError("prompt manifest must declare origin \"reconstructed\"");

    std::string dir = manifest_path.substr(0, manifest_path.find_last_of('/') + 1);
    PromptLibrary lib;
    for (const auto& entry : manifest.at("templates")) {
        PromptTemplate t;
        t.id = entry.at("id").get<std::string>();
        if (entry.contains("file")) {
            t.text = read_file(dir + entry.at("file").get<std::string>(), "prompt file");
        } else {
            t.text = entry.at("text").get<std::string>();
        }
        t.slots = entry.at("slots").get<std::vector<std::string>>();
        t.key_slots = entry.at("key_slots").get<std::vector<std::string>>();
        t.response_schema = entry.at("schema");

        for (const auto& m : markers_in(t.text))
            if (std::find(t.slots.begin(), t.slots.end(), m) == t.slots.end())
                throw ConfigError("template " + t.id + " uses undeclared slot {{" + m + "}}");
        for (const auto& k : t.key_slots)
            if (std::find(t.slots.begin(), t.slots.end(), k) == t.slots.end())
                throw ConfigError("template " + t.id + " key slot not in slots: " + k);
        if (lib.templates_.count(t.id))
            throw ConfigError("duplicate template id: " + t.id);
        lib.templates_.emplace(t.id, std::move(t));
    }
    return lib;
}

const PromptTemplate& PromptLibrary::get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw ConfigError("unknown prompt template: " + id);
    return it->second;
}

std::vector<std::string> PromptLibrary::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, t] : templates_) out.push_back(id);
    return out;
}

std::string render_prompt(const PromptTemplate& t,
                          const std::map<std::string, std::string>& slots) {
    std::string out = t.text;
    for (const auto& name : t.slots) {
        auto it = slots.find(name);
        if (it == slots.end()) throw ConfigError("template " + t.id + ": unbound slot " + name);
        std::string marker = "{{" + name + "}}";
        size_t pos = 0;
        while ((pos = out.find(marker, pos)) != std::string::npos) {
            out.replace(pos, marker.size(), it->second);
            pos += it->second.size();
        }
    }
    return out;
}

std::string request_fingerprint(const PromptTemplate& t,
                                const std::map<std::string, std::string>& slots) {
    std::string out = t.id;
    for (const auto& name : t.key_slots) {
        auto it = slots.find(name);
        if (it == slots.end()) throw ConfigError("template " + t.id + ": unbound key slot " + name);
        out += "|" + it->second;
    }
    return out;
}

std::shared_ptr<ScriptedStubProvider> ScriptedStubProvider::load(const std::string& script_path,
                                                                 const std::string& name) {
    json script;
    try {
        script = json::parse(read_file(script_path, "stub script"));
    } catch (const json::exception& e) {
        throw ConfigError("stub script is not valid JSON: " + std::string(e.what()));
    }
    return std::make_shared<ScriptedStubProvider>(std::move(script), name);
}

ScriptedStubProvider::ScriptedStubProvider(nlohmann::json script, std::string name)
    : name_(std::move(name)) {
    const json& map = script.contains("responses") ? script.at("responses") : script;
    if (!map.is_object()) throw ConfigError("stub script: expected an object of responses");
    for (auto& [fingerprint, entry] : map.items()) {
        auto& list = responses_[fingerprint];
        auto push = [&list](const json& v) {
            list.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        };
        if (entry.is_array()) {
            for (const auto& v : entry) push(v);
        } else {
            push(entry);
        }
        if (list.empty())
            throw ConfigError("stub script: empty response list for " + fingerprint);
    }
}

std::string ScriptedStubProvider::complete(const std::string&, const std::string& fingerprint) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = responses_.find(fingerprint);
    if (it == responses_.end())
        throw ProviderError("stub has no scripted response for fingerprint: " + fingerprint);
    ++calls_;
    size_t& cur = cursor_[fingerprint];
    const auto& list = it->second;
    const std::string& out = list[std::min(cur, list.size() - 1)];
    ++cur;
    return out;
}

long ScriptedStubProvider::calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
}

HttpLlmProvider::HttpLlmProvider(std::string name, std::string base_url, std::string path,
                                 std::string model, std::string api_key_env)
    : name_(std::move(name)),
      base_url_(std::move(base_url)),
      path_(std::move(path)),
      model_(std::move(model)),
      api_key_env_(std::move(api_key_env)) {}

std::string HttpLlmProvider::complete(const std::string& prompt, const std::string&) {
    const char* key = api_key_env_.empty() ? nullptr : std::getenv(api_key_env_.c_str());
    if (!api_key_env_.empty() && (!key || !*key))
        throw ProviderError("environment variable " + api_key_env_ + " is not set");

    httplib::Client client(base_url_);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (key) headers.emplace("Authorization", std::string("Bearer ") + key);

    json body = {
        {"model", model_},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
    };
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw ProviderError(name_ + ": transport failure: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw ProviderError(name_ + ": HTTP " + std::to_string(res->status) + ": " + res->body);

    auto parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty())
        throw ProviderError(name_ + ": malformed completion response");
    return parsed["choices"][0].at("message").at("content").get<std::string>();
}

void LlmGateway::register_provider(std::shared_ptr<LlmProvider> provider) {
    std::lock_guard<std::mutex> lock(mu_);
    auto name = provider->name();
    if (providers_.count(name)) throw DuplicateProvider(name);
    providers_.emplace(name, std::move(provider));
}

std::vector<std::string> LlmGateway::providers() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<std::string> out;
    for (const auto& [name, p] : providers_) out.push_back(name);
    return out;
}

std::shared_ptr<LlmProvider> LlmGateway::find(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = providers_.find(id);
    if (it == providers_.end()) throw ProviderError("provider not registered: " + id);
    return it->second;
}

StructuredCompletion LlmGateway::complete_structured(
    const PromptTemplate& t, const std::map<std::string, std::string>& slots,
    const std::string& provider_id, int max_retries) {
    auto provider = find(provider_id);
    const std::string prompt = render_prompt(t, slots);
    const std::string fingerprint = request_fingerprint(t, slots);

    std::string current = prompt;
    std::string last_error;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        std::string raw = provider->complete(current, fingerprint);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto& u = usage_[provider_id];
            ++u.calls;
            u.prompt_chars += static_cast<long>(current.size());
            u.completion_chars += static_cast<long>(raw.size());
            if (attempt > 0) ++u.retries;
        }
        if (strings::starts_with(strings::trim(raw), "[REFUSED]"))
            throw ContentRefusal(strings::trim(raw));

        std::string parse_error;
        json value = parse_model_json(raw, parse_error);
        std::optional<std::string> err = parse_error.empty()
                                             ? json_schema::validate(t.response_schema, value)
                                             : std::optional<std::string>(parse_error);
        if (!err) {
            StructuredCompletion done;
            done.raw_text = raw;
            done.value = std::move(value);
            done.provider = provider_id;
            done.retries = attempt;
            done.prompt_chars = static_cast<long>(prompt.size());
            done.completion_chars = static_cast<long>(raw.size());
            return done;
        }
        last_error = *err;
        current = prompt + "\n\nYour previous output failed validation: " + last_error +
                  "\nEmit only valid JSON conforming to the schema.";
    }
    throw SchemaViolation(last_error, max_retries);
}

LlmUsage LlmGateway::usage(const std::string& provider_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = usage_.find(provider_id);
    return it == usage_.end() ? LlmUsage{} : it->second;
}

}  // namespace scholarlink
