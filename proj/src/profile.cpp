#include "scholarlink/profile.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "scholarlink/errors.hpp"
#include "scholarlink/strings.hpp"

namespace scholarlink {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// The published sample outputs write unknown scalars as the string "null".
constexpr const char* kNullSentinel = "null";

json scalar_or_null(const std::optional<std::string>& v) {
    return v ? json(*v) : json(kNullSentinel);
}

std::optional<std::string> read_scalar(const json& j, const std::string& key, const char* ctx) {
    if (!j.contains(key)) return std::nullopt;
    const json& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_string())
        throw SchemaError(std::string(ctx) + "." + key + " must be a string");
    std::string s = v.get<std::string>();
    if (s == kNullSentinel) return std::nullopt;
    return s;
}

std::string read_required(const json& j, const std::string& key, const char* ctx) {
    auto v = read_scalar(j, key, ctx);
    if (!v || strings::trim(*v).empty())
        throw SchemaError(std::string(ctx) + "." + key + " must be non-empty");
    return *v;
}

const json& require_list(const json& j, const std::string& key) {
    static const json empty = json::array();
    if (!j.contains(key)) return empty;
    const json& v = j.at(key);
    if (!v.is_array()) throw SchemaError(key + " must be a list");
    return v;
}

std::vector<std::string> read_string_list(const json& j, const std::string& key) {
    std::vector<std::string> out;
    for (const auto& item : require_list(j, key)) {
        if (!item.is_string()) throw SchemaError(key + " entries must be strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

bool valid_email(const std::string& s) {
    auto at = s.find('@');
    if (at == std::string::npos || at == 0 || at + 1 >= s.size()) return false;
    if (s.find('@', at + 1) != std::string::npos) return false;
    if (s.find_first_of(" \t") != std::string::npos) return false;
    return s.find('.', at + 1) != std::string::npos;
}

template <typename Seg>
std::vector<Seg> dedup_segments(const std::vector<Seg>& a, const std::vector<Seg>& b) {
    std::vector<Seg> out;
    std::unordered_set<std::string> seen;
    for (const auto* track : {&a, &b}) {
        for (const auto& seg : *track) {
            if (seen.insert(normalized_segment_key(seg)).second) out.push_back(seg);
        }
    }
    return out;
}

}  // namespace

std::string to_string(MentionOrigin o) {
    return o == MentionOrigin::paper_author ? "paper_author" : "award_recipient";
}

MentionOrigin mention_origin_from_string(const std::string& s) {
    if (s == "paper_author") return MentionOrigin::paper_author;
    if (s == "award_recipient") return MentionOrigin::award_recipient;
    throw SchemaError("unknown mention origin: " + s);
}

void ScholarMention::validate() const {
    if (strings::normalize_ws(raw_name).empty()) throw EmptyName();
    if (email && !valid_email(*email))
        throw SchemaError("mention email does not match local-part@domain: " + *email);
}

ScholarMention parse_mention(const json& j) {
    if (!j.is_object()) throw SchemaError("mention record must be an object");
    ScholarMention m;
    m.raw_name = read_required(j, "raw_name", "mention");
    m.affiliation = j.contains("affiliation") ? j.at("affiliation").get<std::string>() : "";
    if (j.contains("email") && !j.at("email").is_null())
        m.email = j.at("email").get<std::string>();
    m.origin = mention_origin_from_string(
        j.contains("origin") ? j.at("origin").get<std::string>() : "paper_author");
    m.source_id = j.contains("source_id") ? j.at("source_id").get<std::string>() : "";
    if (j.contains("paper_metadata") && !j.at("paper_metadata").is_null())
        m.paper_metadata = j.at("paper_metadata").get<std::string>();
    m.validate();
    return m;
}

nlohmann::json mention_to_json(const ScholarMention& m) {
    json j{{"raw_name", m.raw_name},
           {"affiliation", m.affiliation},
           {"origin", to_string(m.origin)},
           {"source_id", m.source_id}};
    if (m.email) j["email"] = *m.email;
    if (m.paper_metadata) j["paper_metadata"] = *m.paper_metadata;
    return j;
}

bool ScholarProfile::is_empty() const {
    // The "null" document sentinel never counts as content, so a profile built
    // from a record that spelled the unknown out behaves like a parsed one.
    bool has_workplace = workplace && !strings::trim(*workplace).empty() && *workplace != "null";
    return !has_workplace && keywords.empty() && education_track.empty() &&
           professional_track.empty() && honor_track.empty();
}

ScholarProfile profile_from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("profile must be an object");
    ScholarProfile p;
    p.name = read_scalar(j, "name", "profile");
    p.workplace = read_scalar(j, "workplace", "profile");
    p.email = read_string_list(j, "email");

    std::unordered_set<std::string> seen;
    for (auto& k : read_string_list(j, "keywords"))
        if (seen.insert(normalize_field(k)).second) p.keywords.push_back(k);

    for (const auto& e : require_list(j, "education_track")) {
        if (!e.is_object()) throw SchemaError("education_track entries must be objects");
        EducationSegment seg;
        seg.fromto = read_scalar(e, "fromto", "education_track");
        seg.school = read_required(e, "school", "education_track");
        seg.major = read_scalar(e, "major", "education_track");
        seg.degree = read_scalar(e, "scholar", "education_track");
        p.education_track.push_back(std::move(seg));
    }
    for (const auto& e : require_list(j, "professional_track")) {
        if (!e.is_object()) throw SchemaError("professional_track entries must be objects");
        ProfessionalSegment seg;
        seg.fromto = read_scalar(e, "fromto", "professional_track");
        seg.agency = read_required(e, "agency", "professional_track");
        seg.title = read_scalar(e, "title", "professional_track");
        p.professional_track.push_back(std::move(seg));
    }
    for (const auto& e : require_list(j, "honor_track")) {
        if (!e.is_object()) throw SchemaError("honor_track entries must be objects");
        HonorEntry entry;
        entry.time = read_scalar(e, "time", "honor_track");
        entry.award = read_required(e, "award", "honor_track");
        p.honor_track.push_back(std::move(entry));
    }

    if (j.contains("_meta")) {
        const json& meta = j.at("_meta");
        if (!meta.is_object()) throw SchemaError("_meta must be an object");
        for (const auto& pe : require_list(meta, "provenance")) {
            ProvenanceEntry entry;
            entry.url = pe.at("url").get<std::string>();
            if (pe.contains("retrieved_at")) entry.retrieved_at = pe.at("retrieved_at").get<std::string>();
            p.provenance.push_back(std::move(entry));
        }
        if (meta.contains("language")) {
            std::string lang = meta.at("language").get<std::string>();
            if (lang == "native") p.language = ProfileLanguage::native;
            else if (lang == "romanized") p.language = ProfileLanguage::romanized;
            else if (lang == "mixed") p.language = ProfileLanguage::mixed;
            else throw SchemaError("unknown profile language: " + lang);
        }
    }
    return p;
}

ScholarProfile parse_profile(const std::string& document) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    return profile_from_json(j);
}

nlohmann::ordered_json profile_to_json(const ScholarProfile& p) {
    ordered_json j;
    j["name"] = scalar_or_null(p.name);
    j["workplace"] = scalar_or_null(p.workplace);
    j["email"] = p.email;
    j["keywords"] = p.keywords;

    j["education_track"] = ordered_json::array();
    for (const auto& s : p.education_track)
        j["education_track"].push_back(ordered_json{{"fromto", scalar_or_null(s.fromto)},
                                                    {"school", s.school},
                                                    {"major", scalar_or_null(s.major)},
                                                    {"scholar", scalar_or_null(s.degree)}});
    j["professional_track"] = ordered_json::array();
    for (const auto& s : p.professional_track)
        j["professional_track"].push_back(ordered_json{{"fromto", scalar_or_null(s.fromto)},
                                                       {"agency", s.agency},
                                                       {"title", scalar_or_null(s.title)}});
    j["honor_track"] = ordered_json::array();
    for (const auto& s : p.honor_track)
        j["honor_track"].push_back(
            ordered_json{{"time", scalar_or_null(s.time)}, {"award", s.award}});

    if (!p.provenance.empty() || p.language != ProfileLanguage::unspecified) {
        ordered_json meta;
        if (!p.provenance.empty()) {
            meta["provenance"] = ordered_json::array();
            for (const auto& pe : p.provenance)
                meta["provenance"].push_back(
                    ordered_json{{"url", pe.url}, {"retrieved_at", pe.retrieved_at}});
        }
        switch (p.language) {
            case ProfileLanguage::native: meta["language"] = "native"; break;
            case ProfileLanguage::romanized: meta["language"] = "romanized"; break;
            case ProfileLanguage::mixed: meta["language"] = "mixed"; break;
            case ProfileLanguage::unspecified: break;
        }
        j["_meta"] = std::move(meta);
    }
    return j;
}

std::string serialize_profile(const ScholarProfile& p) { return profile_to_json(p).dump(); }

std::string normalize_field(const std::string& s) {
    return strings::to_lower(strings::normalize_ws(s));
}

namespace {
std::string opt_key(const std::optional<std::string>& v) {
    return v ? normalize_field(*v) : std::string(kNullSentinel);
}
}  // namespace

std::string normalized_segment_key(const EducationSegment& s) {
    return opt_key(s.fromto) + "\x1f" + normalize_field(s.school) + "\x1f" + opt_key(s.major) +
           "\x1f" + opt_key(s.degree);
}

std::string normalized_segment_key(const ProfessionalSegment& s) {
    return opt_key(s.fromto) + "\x1f" + normalize_field(s.agency) + "\x1f" + opt_key(s.title);
}

std::string normalized_segment_key(const HonorEntry& s) {
    return opt_key(s.time) + "\x1f" + normalize_field(s.award);
}

ScholarProfile merge_profiles(const ScholarProfile& a, const ScholarProfile& b) {
    ScholarProfile out;
    out.name = a.name ? a.name : b.name;
    out.workplace = a.workplace ? a.workplace : b.workplace;

    std::unordered_set<std::string> seen;
    for (const auto* list : {&a.email, &b.email})
        for (const auto& e : *list)
            if (seen.insert(normalize_field(e)).second) out.email.push_back(e);

    seen.clear();
    for (const auto* list : {&a.keywords, &b.keywords})
        for (const auto& k : *list)
            if (seen.insert(normalize_field(k)).second) out.keywords.push_back(k);

    out.education_track = dedup_segments(a.education_track, b.education_track);
    out.professional_track = dedup_segments(a.professional_track, b.professional_track);
    out.honor_track = dedup_segments(a.honor_track, b.honor_track);

    for (const auto* list : {&a.provenance, &b.provenance})
        for (const auto& pe : *list)
            if (std::find(out.provenance.begin(), out.provenance.end(), pe) == out.provenance.end())
                out.provenance.push_back(pe);

    if (a.language == ProfileLanguage::unspecified) out.language = b.language;
    else if (b.language == ProfileLanguage::unspecified || a.language == b.language)
        out.language = a.language;
    else
        out.language = ProfileLanguage::mixed;
    return out;
}

std::vector<ScholarProfile> read_profiles_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile store: " + path);
    std::vector<ScholarProfile> out;
    std::string line;
    while (std::getline(in, line)) {
        if (strings::trim(line).empty()) continue;
        out.push_back(parse_profile(line));
    }
    return out;
}

void write_profiles_jsonl(const std::string& path, const std::vector<ScholarProfile>& profiles) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write profile store: " + path);
    for (const auto& p : profiles) out << serialize_profile(p) << "\n";
}

}  // namespace scholarlink
