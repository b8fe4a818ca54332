#include "scholarlink/extract.hpp"

#include <algorithm>

#include "scholarlink/errors.hpp"
#include "scholarlink/strings.hpp"

namespace scholarlink {

ExtractAgent::ExtractAgent(SearchGateway& search, LlmGateway& llm, const PromptLibrary& prompts,
                           const RomanizationTable& table, ExtractOptions opts)
    : search_(&search), llm_(&llm), prompts_(&prompts), table_(&table), opts_(std::move(opts)) {}

ScoringOptions ExtractAgent::dedup_options() const {
    ScoringOptions s;
    s.threshold = opts_.threshold;
    s.lexicon = opts_.lexicon;
    return s;
}

std::vector<WebDocument> ExtractAgent::gather(const ScholarMention& mention, Strategy strategy,
                                              const QueryExtras& extras) const {
    auto q = build_query(mention, strategy, extras);
    std::vector<WebDocument> docs;
    for (const auto& r : search_->search(q, opts_.backend, opts_.k)) {
        bool seen = std::any_of(docs.begin(), docs.end(),
                                [&r](const WebDocument& d) { return d.url == r.url; });
        if (seen) continue;
        try {
            docs.push_back(search_->fetch(r.url, opts_.backend));
        } catch (const FetchError&) {
        } catch (const ExtractionEmpty&) {
        }
    }
    return docs;
}

bool ExtractAgent::filter_biographical(const WebDocument& doc) const {
    if (strings::trim(doc.fetched_text).empty()) return false;
    auto out = llm_->complete_structured(
        prompts_->get("filter_biographical"),
        {{"url", doc.url},
         {"document", strings::truncate_utf8(doc.fetched_text, opts_.document_bytes)}},
        opts_.provider, opts_.max_retries);
    return out.value.at("biographical").get<bool>();
}

bool ExtractAgent::filter_target_match(const WebDocument& doc, const ScholarMention& mention,
                                       const QueryExtras& extras) const {
    // The page must carry some accepted rendering of the person before the
    // model is asked; this curbs partial-keyword retrieval misses cheaply.
    bool named = false;
    if (detect_script(mention.raw_name) == Script::native_cjk) {
        named = doc.fetched_text.find(strings::normalize_ws(mention.raw_name)) !=
                std::string::npos;
    } else {
        for (const auto& v : generate_variants(parse_romanized(mention.raw_name, *table_)))
            if (strings::icontains(doc.fetched_text, v)) {
                named = true;
                break;
            }
    }
    if (!named && extras.native_name)
        named = doc.fetched_text.find(*extras.native_name) != std::string::npos;
    if (!named) return false;

    auto out = llm_->complete_structured(
        prompts_->get("filter_target_match"),
        {{"url", doc.url},
         {"document", strings::truncate_utf8(doc.fetched_text, opts_.document_bytes)},
         {"name", mention.raw_name},
         {"native_name", extras.native_name.value_or("")},
         {"affiliation", mention.affiliation}},
        opts_.provider, opts_.max_retries);
    return out.value.at("match").get<bool>();
}

ScholarProfile ExtractAgent::profile_from_page(const WebDocument& doc,
                                               const ScholarMention& mention) const {
    auto out = llm_->complete_structured(
        prompts_->get("extract_profile"),
        {{"url", doc.url},
         {"document", strings::truncate_utf8(doc.fetched_text, opts_.document_bytes)},
         {"name", mention.raw_name}},
        opts_.provider, opts_.max_retries);
    auto profile = profile_from_json(out.value);
    profile.provenance.push_back({doc.url, doc.fetched_at});
    if (doc.language == "zh")
        profile.language = ProfileLanguage::native;
    else if (doc.language == "en")
        profile.language = ProfileLanguage::romanized;
    return profile;
}

ExtractionOutcome ExtractAgent::extract_profile(const std::vector<WebDocument>& docs,
                                                const ScholarMention& mention, Strategy strategy,
                                                std::vector<FilterVerdict>* audit) const {
    ExtractionOutcome outcome;
    outcome.strategy_used = strategy;

    std::vector<ScholarProfile> extracted;
    for (const auto& doc : docs) {
        auto p = profile_from_page(doc, mention);
        bool useful = !p.is_empty();
        if (useful) {
            extracted.push_back(std::move(p));
            outcome.evidence_urls.push_back(doc.url);
        }
        if (audit)
            for (auto& v : *audit)
                if (v.url == doc.url) v.extracted = useful;
    }
    if (extracted.empty()) return outcome;  // the "null" outcome

    // Pairwise dedup with the decision scorer: first-fit agglomeration onto
    // the merged group profile (merging only enriches, so scores only grow).
    auto scoring = dedup_options();
    std::vector<ScholarProfile> groups;
    for (const auto& p : extracted) {
        bool placed = false;
        for (auto& g : groups) {
            if (compare(g, p, scoring).verdict == Verdict::same) {
                g = merge_profiles(g, p);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back(p);
    }

    if (groups.size() == 1)
        outcome.profile = groups[0];
    else
        outcome.candidates = groups;
    return outcome;
}

ExtractionOutcome ExtractAgent::run(const ScholarMention& mention, Strategy strategy,
                                    const QueryExtras& extras,
                                    std::vector<FilterVerdict>* audit) const {
    auto docs = gather(mention, strategy, extras);
    std::vector<WebDocument> surviving;
    for (const auto& doc : docs) {
        FilterVerdict v;
        v.url = doc.url;
        v.biographical = filter_biographical(doc);
        if (v.biographical) v.target_match = filter_target_match(doc, mention, extras);
        if (v.target_match) surviving.push_back(doc);
        if (audit) audit->push_back(v);
    }
    return extract_profile(surviving, mention, strategy, audit);
}

}  // namespace scholarlink
