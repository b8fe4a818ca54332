#pragma once

#include <string>
#include <vector>

#include "scholarlink/eval.hpp"

namespace scholarlink {

/// One search backend the run may select. `kind` is "fixture" (offline corpus
/// under `corpus`) or "http" (live engine described by `descriptor`).
struct BackendEntry {
    std::string name;
    std::string kind;
    std::string corpus;                // fixture: directory with manifest.json
    LiveBackendDescriptor descriptor;  // http: endpoint + field mapping
    RateLimit limit;
};

/// One model provider. `kind` is "stub" (scripted responses under `script`)
/// or "http" (chat-completion endpoint). Credentials are named by environment
/// variable only; config files never hold key material.
struct ProviderEntry {
    std::string name;
    std::string kind;
    std::string script;  // stub: scripted-response file
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key_env;
};

/// A complete, validated run description. Relative paths in the file are
/// resolved against the config file's own directory at load time.
struct RunConfig {
    std::string backend = "fixture";
    std::string provider = "stub";
    PipelinePlan plan = PipelinePlan::full;
    int k = 3;
    int max_retries = 2;
    int threshold = 7;
    int workers = 1;
    unsigned long seed = 0;
    bool llm_keyword_fallback = false;
    bool llm_institution_fallback = false;
    std::string cache_epoch;  // cache partition label; "" = unpartitioned

    std::string prompts_path;
    std::string pinyin_table_path;
    std::string surnames_path;
    std::string institutions_path;
    std::string cache_dir;  // "" disables the disk cache
    std::string out_dir = "out";

    std::vector<BackendEntry> backends;
    std::vector<ProviderEntry> providers;

    static RunConfig load(const std::string& path);  // ConfigError on any problem
    void validate() const;  // invariants and input-path existence
    /// Stable canonical form: every semantic field, no volatile ones.
    nlohmann::ordered_json canonical() const;
    /// FNV-1a 64-bit hex over the canonical form; identical configs hash alike.
    std::string hash() const;
};

/// Everything a run borrows, built from a validated config: gateways with the
/// configured backends/providers registered, reference tables, and options.
class Runtime {
public:
    explicit Runtime(const RunConfig& cfg);

    RunConfig config;
    SearchGateway search;
    LlmGateway llm;
    PromptLibrary prompts;
    RomanizationTable table;
    InstitutionLexicon lexicon;

    WorkflowOptions workflow_options() const;
    Workflow make_workflow();
    EvalHarness make_harness();
};

}  // namespace scholarlink
