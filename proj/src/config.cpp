#include "scholarlink/config.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "scholarlink/errors.hpp"

namespace scholarlink {

namespace {

namespace fs = std::filesystem;

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

/// A credential env-var NAME: uppercase letters, digits, underscores. Anything
/// else (spaces, lowercase, '=', long random strings) is likely key material
/// pasted where only a name belongs.
bool plausible_env_name(const std::string& s) {
    if (s.empty() || s.size() > 64) return false;
    if (std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!(std::isupper(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return p;
    fs::path path(p);
    if (path.is_absolute()) return path.lexically_normal().string();
    return (base / path).lexically_normal().string();
}

void check_env_name(const std::string& api_key_env, const std::string& where) {
    if (api_key_env.empty()) return;
    if (!plausible_env_name(api_key_env))
        throw ConfigError(where + ": \"" + api_key_env +
                          "\" is not an environment-variable name; configs name the "
                          "variable that holds the credential, never the credential");
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config " + path + " must be a JSON object");
    require_keys(j,
                 {"backend", "provider", "plan", "k", "max_retries", "threshold", "workers",
                  "seed", "llm_keyword_fallback", "llm_institution_fallback", "cache_epoch",
                  "paths", "backends", "providers"},
                 "config");

    const fs::path base = fs::path(path).parent_path();
    RunConfig cfg;
    cfg.backend = get_or<std::string>(j, "backend", cfg.backend);
    cfg.provider = get_or<std::string>(j, "provider", cfg.provider);
    if (j.contains("plan")) cfg.plan = plan_from_string(j.at("plan").get<std::string>());
    cfg.k = get_or<int>(j, "k", cfg.k);
    cfg.max_retries = get_or<int>(j, "max_retries", cfg.max_retries);
    cfg.threshold = get_or<int>(j, "threshold", cfg.threshold);
    cfg.workers = get_or<int>(j, "workers", cfg.workers);
    cfg.seed = get_or<unsigned long>(j, "seed", cfg.seed);
    cfg.llm_keyword_fallback = get_or<bool>(j, "llm_keyword_fallback", false);
    cfg.llm_institution_fallback = get_or<bool>(j, "llm_institution_fallback", false);
    cfg.cache_epoch = get_or<std::string>(j, "cache_epoch", "");

    const nlohmann::json paths = j.value("paths", nlohmann::json::object());
    require_keys(paths,
                 {"prompts", "pinyin_table", "surnames", "institutions", "cache_dir", "out_dir"},
                 "config paths");
    cfg.prompts_path = resolve(base, get_or<std::string>(paths, "prompts", ""));
    cfg.pinyin_table_path = resolve(base, get_or<std::string>(paths, "pinyin_table", ""));
    cfg.surnames_path = resolve(base, get_or<std::string>(paths, "surnames", ""));
    cfg.institutions_path = resolve(base, get_or<std::string>(paths, "institutions", ""));
    cfg.cache_dir = resolve(base, get_or<std::string>(paths, "cache_dir", ""));
    cfg.out_dir = resolve(base, get_or<std::string>(paths, "out_dir", "out"));

    for (const auto& b : j.value("backends", nlohmann::json::array())) {
        require_keys(b,
                     {"name", "kind", "corpus", "base_url", "path_template", "api_key_env",
                      "results_pointer", "url_key", "title_key", "snippet_key", "max_requests",
                      "interval_seconds"},
                     "backend entry");
        BackendEntry e;
        e.name = get_or<std::string>(b, "name", "");
        e.kind = get_or<std::string>(b, "kind", "");
        e.corpus = resolve(base, get_or<std::string>(b, "corpus", ""));
        e.descriptor.name = e.name;
        e.descriptor.base_url = get_or<std::string>(b, "base_url", "");
        e.descriptor.path_template = get_or<std::string>(b, "path_template", "");
        e.descriptor.api_key_env = get_or<std::string>(b, "api_key_env", "");
        e.descriptor.results_pointer =
            get_or<std::string>(b, "results_pointer", e.descriptor.results_pointer);
        e.descriptor.url_key = get_or<std::string>(b, "url_key", e.descriptor.url_key);
        e.descriptor.title_key = get_or<std::string>(b, "title_key", e.descriptor.title_key);
        e.descriptor.snippet_key =
            get_or<std::string>(b, "snippet_key", e.descriptor.snippet_key);
        e.limit.max_requests = get_or<int>(b, "max_requests", 0);
        e.limit.interval_seconds = get_or<double>(b, "interval_seconds", 1.0);
        cfg.backends.push_back(std::move(e));
    }
    if (cfg.backends.empty()) {
        BackendEntry e;
        e.name = "fixture";
        e.kind = "fixture";
        e.corpus = resolve(base, "corpus");
        cfg.backends.push_back(std::move(e));
    }

    for (const auto& p : j.value("providers", nlohmann::json::array())) {
        require_keys(p, {"name", "kind", "script", "base_url", "path", "model", "api_key_env"},
                     "provider entry");
        ProviderEntry e;
        e.name = get_or<std::string>(p, "name", "");
        e.kind = get_or<std::string>(p, "kind", "");
        e.script = resolve(base, get_or<std::string>(p, "script", ""));
        e.base_url = get_or<std::string>(p, "base_url", "");
        e.path = get_or<std::string>(p, "path", e.path);
        e.model = get_or<std::string>(p, "model", "");
        e.api_key_env = get_or<std::string>(p, "api_key_env", "");
        cfg.providers.push_back(std::move(e));
    }
    if (cfg.providers.empty()) {
        ProviderEntry e;
        e.name = "stub";
        e.kind = "stub";
        e.script = resolve(base, "responses.json");
        cfg.providers.push_back(std::move(e));
    }

    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (threshold < 1) throw ConfigError("threshold must be >= 1");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (workers < 1) throw ConfigError("workers must be >= 1");

    auto require_file = [](const std::string& p, const char* what) {
        if (p.empty()) throw ConfigError(std::string(what) + " path missing from config");
        if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p);
    };
    require_file(prompts_path, "prompt manifest");
    require_file(pinyin_table_path, "romanization table");
    require_file(surnames_path, "surname list");
    require_file(institutions_path, "institution lexicon");

    std::set<std::string> names;
    for (const auto& b : backends) {
        if (b.name.empty()) throw ConfigError("backend entry without a name");
        if (!names.insert("b:" + b.name).second)
            throw ConfigError("duplicate backend name: " + b.name);
        if (b.kind == "fixture") {
            if (!fs::exists(fs::path(b.corpus) / "manifest.json"))
                throw ConfigError("fixture backend " + b.name +
                                  ": no manifest.json under " + b.corpus);
        } else if (b.kind == "http") {
            if (b.descriptor.base_url.empty())
                throw ConfigError("http backend " + b.name + ": base_url required");
            check_env_name(b.descriptor.api_key_env, "backend " + b.name);
        } else {
            throw ConfigError("backend " + b.name + ": unknown kind \"" + b.kind + "\"");
        }
        if (b.limit.max_requests < 0)
            throw ConfigError("backend " + b.name + ": max_requests must be >= 0");
        if (b.limit.interval_seconds <= 0)
            throw ConfigError("backend " + b.name + ": interval_seconds must be > 0");
    }
    for (const auto& p : providers) {
        if (p.name.empty()) throw ConfigError("provider entry without a name");
        if (!names.insert("p:" + p.name).second)
            throw ConfigError("duplicate provider name: " + p.name);
        if (p.kind == "stub") {
            if (!fs::exists(p.script))
                throw ConfigError("stub provider " + p.name + ": script not found: " + p.script);
        } else if (p.kind == "http") {
            if (p.base_url.empty())
                throw ConfigError("http provider " + p.name + ": base_url required");
            check_env_name(p.api_key_env, "provider " + p.name);
        } else {
            throw ConfigError("provider " + p.name + ": unknown kind \"" + p.kind + "\"");
        }
    }

    auto have = [](const auto& list, const std::string& n) {
        for (const auto& e : list)
            if (e.name == n) return true;
        return false;
    };
    if (!have(backends, backend))
        throw ConfigError("selected backend \"" + backend + "\" is not configured");
    if (!have(providers, provider))
        throw ConfigError("selected provider \"" + provider + "\" is not configured");
}

nlohmann::ordered_json RunConfig::canonical() const {
    nlohmann::ordered_json j;
    j["backend"] = backend;
    j["provider"] = provider;
    j["plan"] = to_string(plan);
    j["k"] = k;
    j["max_retries"] = max_retries;
    j["threshold"] = threshold;
    j["workers"] = workers;
    j["seed"] = seed;
    j["llm_keyword_fallback"] = llm_keyword_fallback;
    j["llm_institution_fallback"] = llm_institution_fallback;
    j["cache_epoch"] = cache_epoch;
    j["paths"] = nlohmann::ordered_json{{"prompts", prompts_path},
                                        {"pinyin_table", pinyin_table_path},
                                        {"surnames", surnames_path},
                                        {"institutions", institutions_path},
                                        {"cache_dir", cache_dir},
                                        {"out_dir", out_dir}};
    nlohmann::ordered_json bs = nlohmann::ordered_json::array();
    for (const auto& b : backends)
        bs.push_back(nlohmann::ordered_json{{"name", b.name},
                                            {"kind", b.kind},
                                            {"corpus", b.corpus},
                                            {"base_url", b.descriptor.base_url},
                                            {"path_template", b.descriptor.path_template},
                                            {"api_key_env", b.descriptor.api_key_env},
                                            {"max_requests", b.limit.max_requests},
                                            {"interval_seconds", b.limit.interval_seconds}});
    j["backends"] = std::move(bs);
    nlohmann::ordered_json ps = nlohmann::ordered_json::array();
    for (const auto& p : providers)
        ps.push_back(nlohmann::ordered_json{{"name", p.name},
                                            {"kind", p.kind},
                                            {"script", p.script},
                                            {"base_url", p.base_url},
                                            {"path", p.path},
                                            {"model", p.model},
                                            {"api_key_env", p.api_key_env}});
    j["providers"] = std::move(ps);
    return j;
}

std::string RunConfig::hash() const {
    const std::string text = canonical().dump();
    unsigned long long h = 1469598103934665603ull;  // FNV-1a 64-bit
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", h);
    return buf;
}

Runtime::Runtime(const RunConfig& cfg)
    : config(cfg),
      search(cfg.cache_dir, nullptr, cfg.cache_epoch),
      prompts(PromptLibrary::load(cfg.prompts_path)),
      table(RomanizationTable::load(cfg.pinyin_table_path, cfg.surnames_path)),
      lexicon(InstitutionLexicon::load(cfg.institutions_path)) {
    if (!cfg.cache_dir.empty()) std::filesystem::create_directories(cfg.cache_dir);
    for (const auto& b : cfg.backends) {
        if (b.kind == "fixture")
            search.register_backend(std::make_shared<FixtureBackend>(b.corpus, b.name), b.limit);
        else
            search.register_backend(std::make_shared<HttpSearchBackend>(b.descriptor), b.limit);
    }
    for (const auto& p : cfg.providers) {
        if (p.kind == "stub")
            llm.register_provider(ScriptedStubProvider::load(p.script, p.name));
        else
            llm.register_provider(std::make_shared<HttpLlmProvider>(p.name, p.base_url, p.path,
                                                                    p.model, p.api_key_env));
    }
}

WorkflowOptions Runtime::workflow_options() const {
    WorkflowOptions o;
    o.backend = config.backend;
    o.provider = config.provider;
    o.k = config.k;
    o.max_retries = config.max_retries;
    o.threshold = config.threshold;
    o.plan = config.plan;
    o.llm_keyword_fallback = config.llm_keyword_fallback;
    o.llm_institution_fallback = config.llm_institution_fallback;
    o.lexicon = &lexicon;
    o.workers = config.workers;
    return o;
}

Workflow Runtime::make_workflow() {
    return Workflow(search, llm, prompts, table, workflow_options());
}

EvalHarness Runtime::make_harness() {
    return EvalHarness(search, llm, prompts, table, workflow_options());
}

}  // namespace scholarlink
