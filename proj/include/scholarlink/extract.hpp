#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scholarlink/disambig.hpp"
#include "scholarlink/llm.hpp"
#include "scholarlink/profile.hpp"
#include "scholarlink/search.hpp"
#include "scholarlink/translit.hpp"

namespace scholarlink {

/// Result of turning a mention plus retrieved documents into structure.
/// Exactly one of three shapes: a single profile, a candidates list when
/// several identities surfaced, or neither (the "null" outcome).
struct ExtractionOutcome {
    std::optional<ScholarProfile> profile;
    std::vector<ScholarProfile> candidates;
    std::vector<std::string> evidence_urls;  // pages the extraction drew from
    Strategy strategy_used = Strategy::pinyin_inst_en;

    bool found() const { return profile.has_value(); }
};

/// Audit record for one retrieved document.
struct FilterVerdict {
    std::string url;
    bool biographical = false;
    bool target_match = false;
    bool extracted = false;  // yielded a non-empty profile
};

struct ExtractOptions {
    std::string backend = "fixture";
    std::string provider = "stub";
    int k = 3;
    int max_retries = 2;
    int threshold = 7;              // dedup threshold, same scorer as decisions
    size_t document_bytes = 4000;   // per-document prompt cap
    const InstitutionLexicon* lexicon = nullptr;
};

/// Mention + search results -> structured profile, behind a three-stage
/// relevance filter: biographical content, target identity, then extraction
/// with pairwise dedup of the per-page profiles.
class ExtractAgent {
public:
    ExtractAgent(SearchGateway& search, LlmGateway& llm, const PromptLibrary& prompts,
                 const RomanizationTable& table, ExtractOptions opts = {});

    // Fetched documents for the strategy's top-k results, deduplicated by
    // url. Per-url fetch misses are skipped; gateway failures propagate.
    std::vector<WebDocument> gather(const ScholarMention& mention, Strategy strategy,
                                    const QueryExtras& extras) const;

    // Does the page biograph anyone? Empty documents are false without a
    // model call.
    bool filter_biographical(const WebDocument& doc) const;

    // Is the page about this mention? A deterministic rendering check (name
    // variants, or the native name once hypothesized) gates the model call.
    bool filter_target_match(const WebDocument& doc, const ScholarMention& mention,
                             const QueryExtras& extras = {}) const;

    // Surviving documents -> one profile, several candidates, or nothing.
    ExtractionOutcome extract_profile(const std::vector<WebDocument>& docs,
                                      const ScholarMention& mention, Strategy strategy,
                                      std::vector<FilterVerdict>* audit = nullptr) const;

    // gather -> filters -> extract, recording one verdict per document.
    ExtractionOutcome run(const ScholarMention& mention, Strategy strategy,
                          const QueryExtras& extras,
                          std::vector<FilterVerdict>* audit = nullptr) const;

    ScoringOptions dedup_options() const;

private:
    ScholarProfile profile_from_page(const WebDocument& doc, const ScholarMention& mention) const;

    SearchGateway* search_;
    LlmGateway* llm_;
    const PromptLibrary* prompts_;
    const RomanizationTable* table_;
    ExtractOptions opts_;
};

}  // namespace scholarlink
