#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scholarlink/llm.hpp"
#include "scholarlink/profile.hpp"
#include "scholarlink/search.hpp"
#include "scholarlink/translit.hpp"

namespace scholarlink {

/// Bilingual institution table: UTF-8 TSV, one `english<TAB>native` pair per
/// line, '#' comments allowed. Lookup scans for the longest known key
/// contained in the query text, so full affiliation strings work as input.
class InstitutionLexicon {
public:
    static InstitutionLexicon load(const std::string& tsv_path);

    void add(const std::string& english, const std::string& native);
    size_t size() const { return by_english_.size(); }

    // Longest English key contained (case-insensitively) in text -> its
    // native rendering.
    std::optional<std::string> to_native(const std::string& text) const;
    // Longest native key contained in text -> its English rendering.
    std::optional<std::string> to_english(const std::string& text) const;
    // Longest native key contained in text, verbatim.
    std::optional<std::string> native_key_in(const std::string& text) const;

private:
    // (key, value), sorted by key length descending then key ascending.
    std::vector<std::pair<std::string, std::string>> by_english_;
    std::vector<std::pair<std::string, std::string>> by_native_;
};

/// One candidate native-script name for a romanized mention.
struct NativeNameHypothesis {
    std::string native_name;
    std::vector<std::string> evidence_urls;
    Consistency consistency = Consistency::indeterminate;
    // True when the name co-occurs with the romanized name or the email on
    // at least one evidence page; otherwise the hypothesis is inferred.
    bool exact_evidence = false;
    std::string note;  // indeterminate reason from the consistency check

    std::string confidence() const { return exact_evidence ? "exact_evidence" : "inferred"; }
};

nlohmann::ordered_json hypothesis_to_json(const NativeNameHypothesis& h);

struct TranslateOptions {
    std::string backend = "fixture";
    std::string provider = "stub";
    int k = 3;                      // search depth per query
    int max_retries = 2;            // model re-prompt budget
    size_t evidence_bytes = 1600;   // per-document cap fed to the model
};

/// Enrichment steps that bridge the romanized and native-language sides:
/// institution translation, native research keywords, and native-name
/// recovery with a deterministic transliteration check.
class TranslateAgent {
public:
    TranslateAgent(SearchGateway& search, LlmGateway& llm, const PromptLibrary& prompts,
                   const RomanizationTable& table, const InstitutionLexicon& lexicon,
                   TranslateOptions opts = {});

    // Native rendering of the primary institution. Native input comes back
    // unchanged; the lexicon answers before the model is consulted.
    std::string translate_institution(const std::string& affiliation) const;

    // 1-6 research keywords in `language`, from paper title/abstract text.
    std::vector<std::string> identify_research_area(const std::string& metadata,
                                                    const std::string& language) const;

    // Searches the native web for the mention and asks the model for the
    // person's native-script name. Every hypothesis carries a deterministic
    // transliteration-consistency verdict; inconsistent ones are kept but
    // flagged. An empty list is a valid outcome, not an error.
    std::vector<NativeNameHypothesis> retrieve_native_name(const ScholarMention& mention,
                                                           bool use_email) const;

private:
    SearchGateway* search_;
    LlmGateway* llm_;
    const PromptLibrary* prompts_;
    const RomanizationTable* table_;
    const InstitutionLexicon* lexicon_;
    TranslateOptions opts_;
};

}  // namespace scholarlink
