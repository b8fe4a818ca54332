#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scholarlink/llm.hpp"
#include "scholarlink/profile.hpp"
#include "scholarlink/translate.hpp"

namespace scholarlink {

enum class Verdict { same, different, undecidable };

std::string to_string(Verdict v);

/// One contributing match in a profile comparison.
struct MatchRecord {
    std::string kind;  // "institution" | "segment" | "keyword"
    std::string a;     // matched item as rendered on the first profile
    std::string b;
    int points = 0;
};

/// Point breakdown. total is always the plain sum of the three components;
/// there are no hidden adjustments.
struct MatchScore {
    int institution_points = 0;  // 0 or 2
    int segment_points = 0;      // 3 per matched education/work segment
    int keyword_points = 0;      // 1-4 per matched keyword pair
    int total = 0;
};

struct MatchDecision {
    MatchScore score;
    int threshold = 7;
    Verdict verdict = Verdict::undecidable;
    std::vector<MatchRecord> rationale;

    nlohmann::ordered_json to_json() const;
    // Line-delimited audit rendering: one line per match, then the totals.
    std::string render_text() const;
};

/// Knobs for the comparison. The two model-backed paths (borderline keyword
/// relatedness, institution-equivalence fallback) are off by default; when
/// enabled they need the gateway, prompt library, and provider id.
struct ScoringOptions {
    int threshold = 7;
    int keyword_points_cap = 0;  // 0 = uncapped sum over matched pairs
    bool llm_keyword_tier = false;
    bool llm_institution_fallback = false;
    int max_retries = 2;
    LlmGateway* llm = nullptr;
    const PromptLibrary* prompts = nullptr;
    std::string provider;
    const InstitutionLexicon* lexicon = nullptr;  // bilingual institution aliases
};

/// Education and work entries reduced to one comparable shape.
struct TrackSegment {
    std::string org;                   // school or agency
    std::optional<std::string> role;   // degree or title
    std::optional<std::string> fromto;
    std::string display;               // human rendering for rationale lines
};

std::vector<TrackSegment> unified_segments(const ScholarProfile& p);

// Years covered by a fromto string; "Present"-style open ends run to 9999.
// Strings with no recognizable year have no range (they match anything).
std::optional<std::pair<int, int>> parse_fromto(const std::string& fromto);
bool fromto_overlaps(const std::optional<std::string>& a, const std::optional<std::string>& b);

// Same institution after normalization: token containment of the primary
// institution (substring containment for native-script names), bilingual
// aliases from the lexicon, and — only when enabled — a model judgment.
bool institutions_equivalent(const std::string& a, const std::string& b,
                             const ScoringOptions& opts = {});

// org equivalent AND fromto ranges overlap (or either unknown) AND
// degree/title equal (or either unknown). Never consults the model.
bool segments_match(const TrackSegment& a, const TrackSegment& b,
                    const ScoringOptions& opts = {});

// Relevance tier for one keyword pair: 4 same string, 3 one content-token
// set strictly inside the other, 2 at least one shared content token
// (exact, long common prefix, or native-script containment), 1 model-judged
// related (off by default), 0 unrelated.
int keyword_tier(const std::string& a, const std::string& b, const ScoringOptions& opts = {});

int score_institution(const ScholarProfile& a, const ScholarProfile& b,
                      const ScoringOptions& opts = {});
int score_segments(const ScholarProfile& a, const ScholarProfile& b,
                   const ScoringOptions& opts = {},
                   std::vector<MatchRecord>* rationale = nullptr);
int score_keywords(const ScholarProfile& a, const ScholarProfile& b,
                   const ScoringOptions& opts = {},
                   std::vector<MatchRecord>* rationale = nullptr);

/// Field-by-field comparison. Undecidable only when either profile has no
/// content; otherwise same iff total >= threshold. Symmetric in a and b.
MatchDecision compare(const ScholarProfile& a, const ScholarProfile& b,
                      const ScoringOptions& opts = {});

}  // namespace scholarlink
