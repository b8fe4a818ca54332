#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace scholarlink {

/// A prompt shipped as a data asset. Text uses {{slot}} markers; key_slots
/// (a subset of slots) form the request fingerprint used by the scripted
/// stub provider.
struct PromptTemplate {
    std::string id;
    std::string text;
    std::vector<std::string> slots;
    std::vector<std::string> key_slots;
    nlohmann::json response_schema;
};

/// Loads prompt templates from a manifest. The manifest must declare
/// origin "reconstructed"; every {{marker}} in a template's text must be a
/// declared slot and key_slots must be a subset of slots (ConfigError
/// otherwise).
class PromptLibrary {
public:
    static PromptLibrary load(const std::string& manifest_path);

    const PromptTemplate& get(const std::string& id) const;  // ConfigError when unknown
    std::vector<std::string> ids() const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

// Substitutes every declared slot; a missing binding is a ConfigError.
std::string render_prompt(const PromptTemplate& t, const std::map<std::string, std::string>& slots);

// template id + "|" + key-slot values joined with "|".
std::string request_fingerprint(const PromptTemplate& t,
                                const std::map<std::string, std::string>& slots);

struct StructuredCompletion {
    std::string raw_text;
    nlohmann::json value;  // validates against the template's schema
    std::string provider;
    int retries = 0;
    long prompt_chars = 0;
    long completion_chars = 0;
};

/// Transport-level provider: prompt in, raw model text out.
/// A response beginning with "[REFUSED]" is treated as a content refusal.
class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual std::string name() const = 0;
    virtual std::string complete(const std::string& prompt, const std::string& fingerprint) = 0;
};

/// Deterministic offline provider: a script maps request fingerprints to
/// response lists, replayed in order for duplicate fingerprints; the last
/// entry repeats once exhausted. Unknown fingerprints raise ProviderError.
/// Script file: {"responses": {fingerprint: text | [text...] | object}}.
/// Non-string entries are serialized to JSON text.
class ScriptedStubProvider : public LlmProvider {
public:
    static std::shared_ptr<ScriptedStubProvider> load(const std::string& script_path,
                                                      const std::string& name = "stub");
    ScriptedStubProvider(nlohmann::json script, std::string name);

    std::string name() const override { return name_; }
    std::string complete(const std::string& prompt, const std::string& fingerprint) override;

    long calls() const;

private:
    std::string name_;
    std::map<std::string, std::vector<std::string>> responses_;
    std::map<std::string, size_t> cursor_;
    long calls_ = 0;
    mutable std::mutex mu_;
};

/// Chat-completion style HTTP provider. The API key is read from the named
/// environment variable at call time; it never appears in config files.
class HttpLlmProvider : public LlmProvider {
public:
    HttpLlmProvider(std::string name, std::string base_url, std::string path, std::string model,
                    std::string api_key_env);

    std::string name() const override { return name_; }
    std::string complete(const std::string& prompt, const std::string& fingerprint) override;

private:
    std::string name_, base_url_, path_, model_, api_key_env_;
};

struct LlmUsage {
    long calls = 0;
    long prompt_chars = 0;
    long completion_chars = 0;
    long retries = 0;
};

/// Registry of providers plus the schema-validated completion loop.
class LlmGateway {
public:
    void register_provider(std::shared_ptr<LlmProvider> provider);  // DuplicateProvider on reuse
    std::vector<std::string> providers() const;

    /// Renders the template, queries the provider, parses the output as JSON
    /// and validates it against the template's schema. On validation failure
    /// the prompt is re-issued with the validation error appended, up to
    /// max_retries extra attempts; then SchemaViolation.
    StructuredCompletion complete_structured(const PromptTemplate& t,
                                             const std::map<std::string, std::string>& slots,
                                             const std::string& provider_id, int max_retries);

    LlmUsage usage(const std::string& provider_id) const;

private:
    std::shared_ptr<LlmProvider> find(const std::string& id) const;

    std::map<std::string, std::shared_ptr<LlmProvider>> providers_;
    std::map<std::string, LlmUsage> usage_;
    mutable std::mutex mu_;
};

}  // namespace scholarlink
