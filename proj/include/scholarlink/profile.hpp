#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace scholarlink {

/// Where a mention was seen: a paper author list or an award recipient list.
enum class MentionOrigin { paper_author, award_recipient };

std::string to_string(MentionOrigin o);
MentionOrigin mention_origin_from_string(const std::string& s);

/// One raw occurrence of a person in a source document.
struct ScholarMention {
    std::string raw_name;       // as printed, e.g. "Zhang, Yihui"
    std::string affiliation;    // as printed, source language preserved
    std::optional<std::string> email;
    MentionOrigin origin = MentionOrigin::paper_author;
    std::string source_id;      // originating paper / award list id
    std::optional<std::string> paper_metadata;  // title+abstract+venue text, when known

    // Throws EmptyName / SchemaError on invariant violations.
    void validate() const;
};

ScholarMention parse_mention(const nlohmann::json& j);
nlohmann::json mention_to_json(const ScholarMention& m);

// Unknown scalar values round-trip as the literal string "null"; in memory
// they are absent optionals.
struct EducationSegment {
    std::optional<std::string> fromto;
    std::string school;
    std::optional<std::string> major;
    std::optional<std::string> degree;  // serialized under the "scholar" key

    bool operator==(const EducationSegment&) const = default;
};

struct ProfessionalSegment {
    std::optional<std::string> fromto;
    std::string agency;
    std::optional<std::string> title;

    bool operator==(const ProfessionalSegment&) const = default;
};

struct HonorEntry {
    std::optional<std::string> time;
    std::string award;

    bool operator==(const HonorEntry&) const = default;
};

struct ProvenanceEntry {
    std::string url;
    std::string retrieved_at;  // ISO-8601, empty when unknown

    bool operator==(const ProvenanceEntry&) const = default;
};

enum class ProfileLanguage { unspecified, native, romanized, mixed };

/// Structured scholar biography. Serialized key order is fixed:
/// name, workplace, email, keywords, education_track, professional_track,
/// honor_track; provenance/language travel in a sibling "_meta" envelope.
struct ScholarProfile {
    std::optional<std::string> name;
    std::optional<std::string> workplace;
    std::vector<std::string> email;
    std::vector<std::string> keywords;
    std::vector<EducationSegment> education_track;
    std::vector<ProfessionalSegment> professional_track;
    std::vector<HonorEntry> honor_track;
    std::vector<ProvenanceEntry> provenance;
    ProfileLanguage language = ProfileLanguage::unspecified;

    bool operator==(const ScholarProfile&) const = default;

    // No workplace, keywords, or track content. Name alone does not count.
    bool is_empty() const;
    size_t segment_count() const { return education_track.size() + professional_track.size(); }
};

/// Parses serialized profile text. Absent list keys become empty lists,
/// absent or "null" scalars become unknown. Throws ParseError on malformed
/// input, SchemaError when a canonical key has the wrong shape.
ScholarProfile parse_profile(const std::string& document);
ScholarProfile profile_from_json(const nlohmann::json& j);

/// Canonical serialization; parse_profile(serialize_profile(p)) == p.
std::string serialize_profile(const ScholarProfile& p);
nlohmann::ordered_json profile_to_json(const ScholarProfile& p);

/// Segment equality for dedup: field-wise after whitespace collapse and
/// case folding.
std::string normalized_segment_key(const EducationSegment& s);
std::string normalized_segment_key(const ProfessionalSegment& s);
std::string normalized_segment_key(const HonorEntry& s);
std::string normalize_field(const std::string& s);

/// Union of two profiles judged to be the same scholar: tracks deduplicated,
/// keywords deduplicated, provenance concatenated. First profile's scalar
/// fields win when both are present.
ScholarProfile merge_profiles(const ScholarProfile& a, const ScholarProfile& b);

// Profile store: one profile per line, UTF-8, canonical key order.
std::vector<ScholarProfile> read_profiles_jsonl(const std::string& path);
void write_profiles_jsonl(const std::string& path, const std::vector<ScholarProfile>& profiles);

}  // namespace scholarlink
