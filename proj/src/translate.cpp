#include "scholarlink/translate.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "scholarlink/errors.hpp"
#include "scholarlink/strings.hpp"

namespace scholarlink {

namespace {

// Longest key first, then lexicographic, so lookup order is total.
bool key_order(const std::pair<std::string, std::string>& a,
               const std::pair<std::string, std::string>& b) {
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    return a.first < b.first;
}

}  // namespace

InstitutionLexicon InstitutionLexicon::load(const std::string& tsv_path) {
    std::ifstream in(tsv_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open institution table: " + tsv_path);
    InstitutionLexicon lex;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = strings::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto tab = t.find('\t');
        if (tab == std::string::npos)
            throw ConfigError("institution table line " + std::to_string(lineno) +
                              ": expected english<TAB>native");
        std::string english = strings::trim(t.substr(0, tab));
        std::string native = strings::trim(t.substr(tab + 1));
        if (english.empty() || native.empty())
            throw ConfigError("institution table line " + std::to_string(lineno) +
                              ": empty entry");
        lex.add(english, native);
    }
    return lex;
}

void InstitutionLexicon::add(const std::string& english, const std::string& native) {
    by_english_.emplace_back(english, native);
    by_native_.emplace_back(native, english);
    std::sort(by_english_.begin(), by_english_.end(), key_order);
    std::sort(by_native_.begin(), by_native_.end(), key_order);
}

std::optional<std::string> InstitutionLexicon::to_native(const std::string& text) const {
    for (const auto& [english, native] : by_english_)
        if (strings::icontains(text, english)) return native;
    return std::nullopt;
}

std::optional<std::string> InstitutionLexicon::to_english(const std::string& text) const {
    for (const auto& [native, english] : by_native_)
        if (text.find(native) != std::string::npos) return english;
    return std::nullopt;
}

std::optional<std::string> InstitutionLexicon::native_key_in(const std::string& text) const {
    for (const auto& [native, english] : by_native_)
        if (text.find(native) != std::string::npos) return native;
    return std::nullopt;
}

nlohmann::ordered_json hypothesis_to_json(const NativeNameHypothesis& h) {
    nlohmann::ordered_json j;
    j["native_name"] = h.native_name;
    j["consistency"] = to_string(h.consistency);
    j["confidence"] = h.confidence();
    j["evidence_urls"] = h.evidence_urls;
    if (!h.note.empty()) j["note"] = h.note;
    return j;
}

TranslateAgent::TranslateAgent(SearchGateway& search, LlmGateway& llm,
                               const PromptLibrary& prompts, const RomanizationTable& table,
                               const InstitutionLexicon& lexicon, TranslateOptions opts)
    : search_(&search),
      llm_(&llm),
      prompts_(&prompts),
      table_(&table),
      lexicon_(&lexicon),
      opts_(std::move(opts)) {}

std::string TranslateAgent::translate_institution(const std::string& affiliation) const {
    std::string text = strings::normalize_ws(affiliation);
    if (text.empty()) throw SchemaError("affiliation is empty");

    // Already native: nothing to translate.
    bool has_latin = false;
    for (size_t i = 0; i < text.size();)
        if (strings::is_latin_letter(strings::decode_utf8(text, i))) has_latin = true;
    if (!has_latin && strings::contains_cjk(text)) return text;

    // The native institution may already be embedded in a mixed string.
    if (auto native = lexicon_->native_key_in(text)) return *native;
    if (auto native = lexicon_->to_native(text)) return *native;

    auto out = llm_->complete_structured(prompts_->get("translate_institution"),
                                         {{"affiliation", primary_institution(text)}},
                                         opts_.provider, opts_.max_retries);
    return out.value.at("translation").get<std::string>();
}

std::vector<std::string> TranslateAgent::identify_research_area(const std::string& metadata,
                                                                const std::string& language) const {
    if (strings::trim(metadata).empty()) throw SchemaError("paper metadata is empty");
    auto out = llm_->complete_structured(prompts_->get("identify_research_area"),
                                         {{"metadata", metadata}, {"language", language}},
                                         opts_.provider, opts_.max_retries);
    return out.value.at("keywords").get<std::vector<std::string>>();
}

std::vector<NativeNameHypothesis> TranslateAgent::retrieve_native_name(
    const ScholarMention& mention, bool use_email) const {
    if (detect_script(mention.raw_name) != Script::latin)
        throw UsageError("native-name retrieval expects a romanized mention, got: " +
                         mention.raw_name);
    if (use_email && !mention.email) throw MissingExtra("email");

    QueryExtras extras;
    extras.translated_institution = translate_institution(mention.affiliation);

    std::vector<SearchQuery> queries;
    queries.push_back(build_query(mention, Strategy::pinyin_inst_native, extras));
    if (use_email)
        queries.push_back(build_query(mention, Strategy::pinyin_inst_native_email, extras));

    // Union of result urls across queries, first-seen order.
    std::vector<std::string> urls;
    for (const auto& q : queries)
        for (const auto& r : search_->search(q, opts_.backend, opts_.k))
            if (std::find(urls.begin(), urls.end(), r.url) == urls.end()) urls.push_back(r.url);

    struct Evidence {
        std::string url;
        std::string text;
    };
    std::vector<Evidence> docs;
    std::string evidence_blob;
    for (const auto& url : urls) {
        try {
            auto doc = search_->fetch(url, opts_.backend);
            docs.push_back({url, doc.fetched_text});
            if (!evidence_blob.empty()) evidence_blob += "\n\n";
            evidence_blob += "URL: " + url + "\n" +
                             strings::truncate_utf8(doc.fetched_text, opts_.evidence_bytes);
        } catch (const FetchError&) {
        } catch (const ExtractionEmpty&) {
        }
    }
    if (docs.empty()) return {};

    auto out = llm_->complete_structured(prompts_->get("native_name"),
                                         {{"name", mention.raw_name},
                                          {"email", use_email ? *mention.email : std::string()},
                                          {"evidence", evidence_blob}},
                                         opts_.provider, opts_.max_retries);

    std::vector<std::string> candidates;
    for (const auto& c : out.value.at("candidates")) {
        std::string name = strings::normalize_ws(c.get<std::string>());
        if (name.empty() || !strings::contains_cjk(name)) continue;
        if (std::find(candidates.begin(), candidates.end(), name) == candidates.end())
            candidates.push_back(name);
    }

    auto variants = generate_variants(parse_romanized(mention.raw_name, *table_));

    std::vector<NativeNameHypothesis> hypotheses;
    for (const auto& name : candidates) {
        NativeNameHypothesis h;
        h.native_name = name;
        auto cr = consistent(mention.raw_name, name, *table_);
        h.consistency = cr.verdict;
        h.note = cr.note;
        for (const auto& doc : docs) {
            if (doc.text.find(name) == std::string::npos) continue;
            h.evidence_urls.push_back(doc.url);
            bool with_romanized = std::any_of(
                variants.begin(), variants.end(),
                [&doc](const std::string& v) { return strings::icontains(doc.text, v); });
            bool with_email = use_email && doc.text.find(*mention.email) != std::string::npos;
            if (with_romanized || with_email) h.exact_evidence = true;
        }
        hypotheses.push_back(std::move(h));
    }

    auto rank = [](Consistency c) {
        switch (c) {
            case Consistency::consistent: return 0;
            case Consistency::indeterminate: return 1;
            case Consistency::inconsistent: return 2;
        }
        return 2;
    };
    std::stable_sort(hypotheses.begin(), hypotheses.end(),
                     [&rank](const NativeNameHypothesis& a, const NativeNameHypothesis& b) {
                         if (rank(a.consistency) != rank(b.consistency))
                             return rank(a.consistency) < rank(b.consistency);
                         if (a.evidence_urls.size() != b.evidence_urls.size())
                             return a.evidence_urls.size() > b.evidence_urls.size();
                         return a.native_name < b.native_name;
                     });
    return hypotheses;
}

}  // namespace scholarlink
