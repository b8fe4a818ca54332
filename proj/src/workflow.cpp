#include "scholarlink/workflow.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "scholarlink/errors.hpp"
#include "scholarlink/strings.hpp"
#include "scholarlink/translit.hpp"

namespace scholarlink {

namespace {

const InstitutionLexicon& empty_lexicon() {
    static const InstitutionLexicon lex;
    return lex;
}

ExtractOptions extract_options(const WorkflowOptions& o) {
    ExtractOptions e;
    e.backend = o.backend;
    e.provider = o.provider;
    e.k = o.k;
    e.max_retries = o.max_retries;
    e.threshold = o.threshold;
    e.lexicon = o.lexicon;
    return e;
}

TranslateOptions translate_options(const WorkflowOptions& o) {
    TranslateOptions t;
    t.backend = o.backend;
    t.provider = o.provider;
    t.k = o.k;
    t.max_retries = o.max_retries;
    return t;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

void write_jsonl(const std::string& path, const std::vector<nlohmann::ordered_json>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write output file: " + path);
    for (const auto& row : rows) out << row.dump() << "\n";
}

}  // namespace

std::string to_string(Step s) {
    switch (s) {
        case Step::consistency_check: return "consistency_check";
        case Step::direct_search: return "direct_search";
        case Step::translate_enrich: return "translate_enrich";
        case Step::native_name_search: return "native_name_search";
        case Step::multi_identity: return "multi_identity";
        case Step::done: return "done";
    }
    return "done";
}

std::string to_string(PipelinePlan p) {
    switch (p) {
        case PipelinePlan::english_only: return "english_only";
        case PipelinePlan::native_institution: return "native_institution";
        case PipelinePlan::full: return "full";
    }
    return "full";
}

PipelinePlan plan_from_string(const std::string& s) {
    if (s == "english_only") return PipelinePlan::english_only;
    if (s == "native_institution") return PipelinePlan::native_institution;
    if (s == "full") return PipelinePlan::full;
    throw ConfigError("unknown pipeline plan: " + s);
}

nlohmann::ordered_json state_to_json(const WorkflowState& s) {
    nlohmann::ordered_json j;
    j["mention_id"] = s.mention_id;
    j["mention"] = mention_to_json(s.mention);
    nlohmann::ordered_json path = nlohmann::ordered_json::array();
    for (Step st : s.path) path.push_back(to_string(st));
    j["path"] = std::move(path);
    j["found"] = s.outcome.found();
    j["strategy_used"] = to_string(s.outcome.strategy_used);
    if (s.outcome.profile) j["profile"] = profile_to_json(*s.outcome.profile);
    if (!s.outcome.candidates.empty()) {
        nlohmann::ordered_json cands = nlohmann::ordered_json::array();
        for (const auto& c : s.outcome.candidates) cands.push_back(profile_to_json(c));
        j["candidates"] = std::move(cands);
    }
    j["evidence_urls"] = s.outcome.evidence_urls;
    if (s.extras.translated_institution)
        j["translated_institution"] = *s.extras.translated_institution;
    if (s.extras.native_name) j["native_name"] = *s.extras.native_name;
    if (!s.extras.research_keywords.empty())
        j["research_keywords"] = s.extras.research_keywords;
    if (!s.hypotheses.empty()) {
        nlohmann::ordered_json hyps = nlohmann::ordered_json::array();
        for (const auto& h : s.hypotheses) hyps.push_back(hypothesis_to_json(h));
        j["hypotheses"] = std::move(hyps);
    }
    j["log"] = s.log;
    return j;
}

const ScholarProfile* ResolutionResult::scholar(const std::string& scholar_id) const {
    for (size_t i = 0; i < scholar_ids.size(); ++i)
        if (scholar_ids[i] == scholar_id) return &registry[i];
    return nullptr;
}

std::string ResolutionResult::scholar_of(const std::string& mention_id) const {
    for (const auto& [mid, sid] : mapping)
        if (mid == mention_id) return sid;
    return "";
}

nlohmann::ordered_json resolution_to_json(const ResolutionResult& r) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json mapping = nlohmann::ordered_json::object();
    for (const auto& [mid, sid] : r.mapping) mapping[mid] = sid;
    j["mapping"] = std::move(mapping);
    nlohmann::ordered_json scholars = nlohmann::ordered_json::array();
    for (size_t i = 0; i < r.registry.size(); ++i)
        scholars.push_back(nlohmann::ordered_json{{"scholar_id", r.scholar_ids[i]},
                                                  {"profile", profile_to_json(r.registry[i])}});
    j["scholars"] = std::move(scholars);
    j["unresolved"] = r.unresolved;
    nlohmann::ordered_json decisions = nlohmann::ordered_json::array();
    for (const auto& d : r.decisions) {
        nlohmann::ordered_json row;
        row["left"] = d.left;
        row["right"] = d.right;
        row["note"] = d.note;
        row["decision"] = d.decision.to_json();
        decisions.push_back(std::move(row));
    }
    j["decisions"] = std::move(decisions);
    nlohmann::ordered_json states = nlohmann::ordered_json::array();
    for (const auto& st : r.states) states.push_back(state_to_json(st));
    j["states"] = std::move(states);
    return j;
}

void write_resolution_files(const ResolutionResult& r, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto path = [&out_dir](const char* name) { return out_dir + "/" + name; };

    std::vector<nlohmann::ordered_json> rows;
    for (const auto& [mid, sid] : r.mapping)
        rows.push_back({{"mention_id", mid}, {"scholar_id", sid}});
    write_jsonl(path("mapping.jsonl"), rows);

    rows.clear();
    for (size_t i = 0; i < r.registry.size(); ++i)
        rows.push_back({{"scholar_id", r.scholar_ids[i]}, {"profile", profile_to_json(r.registry[i])}});
    write_jsonl(path("registry.jsonl"), rows);

    rows.clear();
    for (const auto& mid : r.unresolved) rows.push_back({{"mention_id", mid}});
    write_jsonl(path("unresolved.jsonl"), rows);

    rows.clear();
    for (const auto& d : r.decisions)
        rows.push_back({{"left", d.left},
                        {"right", d.right},
                        {"note", d.note},
                        {"decision", d.decision.to_json()}});
    write_jsonl(path("decisions.jsonl"), rows);

    rows.clear();
    for (const auto& st : r.states) rows.push_back(state_to_json(st));
    write_jsonl(path("runlog.jsonl"), rows);
}

Workflow::Workflow(SearchGateway& search, LlmGateway& llm, const PromptLibrary& prompts,
                   const RomanizationTable& table, WorkflowOptions opts)
    : search_(&search),
      llm_(&llm),
      prompts_(&prompts),
      table_(&table),
      opts_(std::move(opts)),
      extract_(search, llm, prompts, table, extract_options(opts_)),
      translate_(search, llm, prompts, table,
                 opts_.lexicon ? *opts_.lexicon : empty_lexicon(), translate_options(opts_)) {}

ScoringOptions Workflow::scoring() const {
    ScoringOptions s;
    s.threshold = opts_.threshold;
    s.llm_keyword_tier = opts_.llm_keyword_fallback;
    s.llm_institution_fallback = opts_.llm_institution_fallback;
    s.max_retries = opts_.max_retries;
    s.llm = llm_;
    s.prompts = prompts_;
    s.provider = opts_.provider;
    s.lexicon = opts_.lexicon;
    return s;
}

ExtractionOutcome Workflow::attempt(const ScholarMention& m, Strategy strategy,
                                    const QueryExtras& extras, WorkflowState& st) const {
    std::vector<FilterVerdict> audit;
    auto outcome = extract_.run(m, strategy, extras, &audit);
    for (const auto& v : audit)
        st.log.push_back(std::string("  ") + v.url + " bio=" + (v.biographical ? "y" : "n") +
                         " target=" + (v.target_match ? "y" : "n") +
                         " extracted=" + (v.extracted ? "y" : "n"));
    std::string result = outcome.found()
                             ? "profile from " + std::to_string(outcome.evidence_urls.size()) +
                                   " page(s)"
                         : !outcome.candidates.empty()
                             ? std::to_string(outcome.candidates.size()) + " distinct candidates"
                             : "nothing";
    st.log.push_back("extract " + to_string(strategy) + ": " + result);
    return outcome;
}

WorkflowState Workflow::finish(WorkflowState st) const {
    if (!st.outcome.candidates.empty()) {
        st.path.push_back(Step::multi_identity);
        st.log.push_back("multiple identities: " + std::to_string(st.outcome.candidates.size()) +
                         " candidate profiles surfaced for review");
    }
    st.step = Step::done;
    st.path.push_back(Step::done);
    return st;
}

WorkflowState Workflow::run(const ScholarMention& mention) const {
    mention.validate();

    WorkflowState st;
    st.mention = mention;
    st.step = Step::consistency_check;
    st.path.push_back(Step::consistency_check);

    const Script script = detect_script(mention.raw_name);
    st.log.push_back(std::string("consistency_check: name script is ") +
                     (script == Script::latin    ? "latin"
                      : script == Script::native_cjk ? "native"
                                                     : "mixed"));

    auto advance = [&st](Step next) {
        st.step = next;
        st.path.push_back(next);
        st.log.push_back("step " + to_string(next));
    };

    if (mention.paper_metadata && !strings::trim(*mention.paper_metadata).empty()) {
        st.extras.research_keywords =
            translate_.identify_research_area(*mention.paper_metadata, "zh");
        st.log.push_back("research areas: " + join(st.extras.research_keywords, ", "));
    }

    if (script != Script::latin) {
        // The mention already carries the native rendering: search it directly.
        advance(Step::direct_search);
        st.extras.native_name = mention.raw_name;
        st.extras.translated_institution = translate_.translate_institution(mention.affiliation);
        st.outcome = attempt(mention, Strategy::native_inst_native, st.extras, st);
        return finish(std::move(st));
    }

    advance(Step::translate_enrich);
    if (opts_.plan == PipelinePlan::english_only) {
        st.outcome = attempt(mention, Strategy::pinyin_inst_en, st.extras, st);
        return finish(std::move(st));
    }

    st.extras.translated_institution = translate_.translate_institution(mention.affiliation);
    st.log.push_back("institution rendered natively: " + *st.extras.translated_institution);
    st.outcome = attempt(mention, Strategy::pinyin_inst_native, st.extras, st);

    const bool has_email = mention.email && !mention.email->empty();
    if (!st.outcome.found() && st.outcome.candidates.empty() && has_email)
        st.outcome = attempt(mention, Strategy::pinyin_inst_native_email, st.extras, st);

    if (opts_.plan == PipelinePlan::full && !st.outcome.found() &&
        st.outcome.candidates.empty()) {
        advance(Step::native_name_search);
        st.hypotheses = translate_.retrieve_native_name(mention, has_email);
        st.log.push_back("native-name hypotheses: " + std::to_string(st.hypotheses.size()));
        for (const auto& h : st.hypotheses) {
            if (h.consistency == Consistency::inconsistent) {
                // A name the romanization cannot produce is somebody else.
                st.log.push_back("hypothesis " + h.native_name +
                                 " rejected: transliteration inconsistent");
                continue;
            }
            QueryExtras trial = st.extras;
            trial.native_name = h.native_name;
            st.log.push_back("hypothesis " + h.native_name + " (" +
                             to_string(h.consistency) + "): searching");
            auto outcome = attempt(mention, Strategy::native_inst_native, trial, st);
            if (outcome.found() || !outcome.candidates.empty()) {
                st.extras.native_name = h.native_name;
                st.outcome = std::move(outcome);
                break;
            }
        }
    }
    return finish(std::move(st));
}

namespace {

void consolidate(ResolutionResult& r, const ScoringOptions& sopts) {
    // Merging can in principle bridge two registry entries that were distinct
    // when first compared; fold such pairs until the registry is stable so the
    // pairwise-different guarantee holds unconditionally.
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t a = 0; a < r.registry.size() && !changed; ++a) {
            for (size_t b = a + 1; b < r.registry.size() && !changed; ++b) {
                MatchDecision d = compare(r.registry[a], r.registry[b], sopts);
                if (d.verdict != Verdict::same) continue;
                r.decisions.push_back({r.scholar_ids[a], r.scholar_ids[b], "consolidation", d});
                r.registry[a] = merge_profiles(r.registry[a], r.registry[b]);
                for (auto& [mid, sid] : r.mapping)
                    if (sid == r.scholar_ids[b]) sid = r.scholar_ids[a];
                r.scholar_ids.erase(r.scholar_ids.begin() + static_cast<long>(b));
                r.registry.erase(r.registry.begin() + static_cast<long>(b));
                changed = true;
            }
        }
    }
}

}  // namespace

ResolutionResult Workflow::resolve(const std::vector<ScholarMention>& mentions,
                                   std::vector<std::string> ids) const {
    if (ids.empty())
        for (size_t i = 0; i < mentions.size(); ++i) ids.push_back("m" + std::to_string(i));
    if (ids.size() != mentions.size())
        throw UsageError("mention ids must parallel the mention list");
    {
        std::set<std::string> seen(ids.begin(), ids.end());
        if (seen.size() != ids.size()) throw DatasetError("duplicate mention ids");
    }

    ResolutionResult result;
    result.states.resize(mentions.size());

    const size_t workers =
        std::min<size_t>(static_cast<size_t>(std::max(1, opts_.workers)), mentions.size());
    if (workers <= 1) {
        for (size_t i = 0; i < mentions.size(); ++i) result.states[i] = run(mentions[i]);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::exception_ptr> errors(mentions.size());
        auto body = [&]() {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= mentions.size()) break;
                try {
                    result.states[i] = run(mentions[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    for (size_t i = 0; i < mentions.size(); ++i) result.states[i].mention_id = ids[i];

    // Sequential agglomeration, input order: attach to the first registered
    // scholar judged the same, else open a new scholar id.
    const ScoringOptions sopts = scoring();
    for (auto& st : result.states) {
        if (!st.outcome.found()) {
            result.unresolved.push_back(st.mention_id);
            continue;
        }
        const ScholarProfile& p = *st.outcome.profile;
        bool attached = false;
        for (size_t j = 0; j < result.registry.size() && !attached; ++j) {
            MatchDecision d = compare(result.registry[j], p, sopts);
            result.decisions.push_back({result.scholar_ids[j], st.mention_id, "agglomeration", d});
            if (d.verdict == Verdict::same) {
                result.registry[j] = merge_profiles(result.registry[j], p);
                result.mapping.emplace_back(st.mention_id, result.scholar_ids[j]);
                attached = true;
            }
        }
        if (!attached) {
            std::string sid = "s" + std::to_string(result.registry.size() + 1);
            result.scholar_ids.push_back(sid);
            result.registry.push_back(p);
            result.mapping.emplace_back(st.mention_id, sid);
        }
    }

    consolidate(result, sopts);
    return result;
}

}  // namespace scholarlink
