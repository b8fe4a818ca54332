#include "scholarlink/disambig.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

#include "scholarlink/errors.hpp"
#include "scholarlink/search.hpp"
#include "scholarlink/strings.hpp"

namespace scholarlink {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> kStop = {"and", "of", "the", "for", "in",
                                                "on",  "with", "a", "an",  "to"};
    return kStop;
}

std::set<std::string> content_tokens(const std::string& folded) {
    std::set<std::string> out;
    for (const auto& t : strings::tokens(folded))
        if (!stopwords().count(t)) out.insert(t);
    return out;
}

bool proper_subset(const std::set<std::string>& small, const std::set<std::string>& big) {
    return small.size() < big.size() &&
           std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Shared-token test behind the tier-2 rubric: exact token, a long common
// prefix for inflected Latin forms, or containment of a multi-character
// native-script run.
bool token_shared(const std::string& ta, const std::string& tb) {
    if (ta == tb) return true;
    bool cjk_a = strings::contains_cjk(ta);
    bool cjk_b = strings::contains_cjk(tb);
    if (!cjk_a && !cjk_b) {
        size_t n = 0;
        while (n < ta.size() && n < tb.size() && ta[n] == tb[n]) ++n;
        return n >= 5;
    }
    if (cjk_a && cjk_b) {
        const std::string& shorter = ta.size() <= tb.size() ? ta : tb;
        const std::string& longer = ta.size() <= tb.size() ? tb : ta;
        return strings::utf8_chars(shorter).size() >= 2 &&
               longer.find(shorter) != std::string::npos;
    }
    return false;
}

struct OrgView {
    std::string folded;                 // non-address segments + aliases, lowercased
    std::set<std::string> token_set;    // tokens of the above
};

OrgView org_view(const std::string& text, const InstitutionLexicon* lexicon) {
    OrgView v;
    auto absorb = [&v](const std::string& part) {
        auto folded = strings::to_lower(strings::normalize_ws(part));
        if (folded.empty() || folded == "null") return;
        if (!v.folded.empty()) v.folded += '\x1f';
        v.folded += folded;
        for (const auto& t : strings::tokens(folded)) v.token_set.insert(t);
    };
    for (const auto& seg : strings::split(text, ',')) {
        auto s = strings::normalize_ws(seg);
        if (s.empty() || address_like(s)) continue;
        absorb(s);
    }
    if (v.folded.empty()) absorb(text);  // everything looked like an address
    if (lexicon) {
        if (auto native = lexicon->to_native(text)) absorb(*native);
        if (auto english = lexicon->to_english(text)) absorb(*english);
    }
    return v;
}

// Primary-institution tokens of `probe` contained in `target`'s view.
bool contained_in(const std::string& probe, const OrgView& target) {
    auto primary = strings::to_lower(strings::normalize_ws(primary_institution(probe)));
    if (primary.empty() || primary == "null") return false;
    if (strings::contains_cjk(primary)) return target.folded.find(primary) != std::string::npos;
    auto tokens = strings::tokens(primary);
    if (tokens.empty()) return false;
    for (const auto& t : tokens)
        if (!target.token_set.count(t)) return false;
    return true;
}

bool llm_bool(const ScoringOptions& opts, const std::string& template_id,
              const std::map<std::string, std::string>& slots, const std::string& field) {
    auto out = opts.llm->complete_structured(opts.prompts->get(template_id), slots,
                                             opts.provider, opts.max_retries);
    return out.value.at(field).get<bool>();
}

bool llm_ready(const ScoringOptions& opts) {
    return opts.llm != nullptr && opts.prompts != nullptr && !opts.provider.empty();
}

std::string segment_display(const TrackSegment& s) { return s.display; }

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::same: return "same";
        case Verdict::different: return "different";
        case Verdict::undecidable: return "undecidable";
    }
    return "undecidable";
}

std::vector<TrackSegment> unified_segments(const ScholarProfile& p) {
    std::vector<TrackSegment> out;
    for (const auto& e : p.education_track) {
        TrackSegment s;
        s.org = e.school;
        s.role = e.degree;
        s.fromto = e.fromto;
        s.display = e.school;
        if (e.degree) s.display += " / " + *e.degree;
        if (e.major) s.display += " / " + *e.major;
        if (e.fromto) s.display += " [" + *e.fromto + "]";
        out.push_back(std::move(s));
    }
    for (const auto& w : p.professional_track) {
        TrackSegment s;
        s.org = w.agency;
        s.role = w.title;
        s.fromto = w.fromto;
        s.display = w.agency;
        if (w.title) s.display += " / " + *w.title;
        if (w.fromto) s.display += " [" + *w.fromto + "]";
        out.push_back(std::move(s));
    }
    return out;
}

std::optional<std::pair<int, int>> parse_fromto(const std::string& fromto) {
    std::vector<int> years;
    size_t i = 0;
    while (i < fromto.size()) {
        if (fromto[i] >= '0' && fromto[i] <= '9') {
            size_t j = i;
            while (j < fromto.size() && fromto[j] >= '0' && fromto[j] <= '9') ++j;
            if (j - i == 4) {
                int y = std::stoi(fromto.substr(i, 4));
                if (y >= 1000 && y <= 2999) years.push_back(y);
            }
            i = j;
        } else {
            ++i;
        }
    }
    if (years.empty()) return std::nullopt;
    int start = years.front();
    int end = years.back();
    if (end < start) std::swap(start, end);
    if (strings::icontains(fromto, "present") || fromto.find("至今") != std::string::npos)
        end = 9999;
    return std::make_pair(start, end);
}

bool fromto_overlaps(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    if (!a || !b) return true;
    auto ra = parse_fromto(*a);
    auto rb = parse_fromto(*b);
    if (!ra || !rb) return true;  // undated text constrains nothing
    return ra->first <= rb->second && rb->first <= ra->second;
}

bool institutions_equivalent(const std::string& a, const std::string& b,
                             const ScoringOptions& opts) {
    auto fa = strings::to_lower(strings::normalize_ws(a));
    auto fb = strings::to_lower(strings::normalize_ws(b));
    if (fa.empty() || fb.empty() || fa == "null" || fb == "null") return false;
    if (fa == fb) return true;

    auto va = org_view(a, opts.lexicon);
    auto vb = org_view(b, opts.lexicon);
    if (contained_in(a, vb) || contained_in(b, va)) return true;
    // Aliased primaries: the native rendering of one side appearing in the
    // other covers mixed-language pairs whose primaries differ in script.
    if (opts.lexicon) {
        if (auto na = opts.lexicon->to_native(a))
            if (vb.folded.find(strings::to_lower(*na)) != std::string::npos) return true;
        if (auto nb = opts.lexicon->to_native(b))
            if (va.folded.find(strings::to_lower(*nb)) != std::string::npos) return true;
    }

    if (opts.llm_institution_fallback && llm_ready(opts))
        return llm_bool(opts, "institution_equivalent",
                        {{"a", primary_institution(a)}, {"b", primary_institution(b)}},
                        "equivalent");
    return false;
}

bool segments_match(const TrackSegment& a, const TrackSegment& b, const ScoringOptions& opts) {
    ScoringOptions lexical = opts;
    lexical.llm_institution_fallback = false;  // segment matching stays model-free
    if (!institutions_equivalent(a.org, b.org, lexical)) return false;
    if (!fromto_overlaps(a.fromto, b.fromto)) return false;
    if (a.role && b.role && normalize_field(*a.role) != normalize_field(*b.role)) return false;
    return true;
}

int keyword_tier(const std::string& a, const std::string& b, const ScoringOptions& opts) {
    auto fa = strings::to_lower(strings::normalize_ws(a));
    auto fb = strings::to_lower(strings::normalize_ws(b));
    if (fa.empty() || fb.empty()) return 0;
    if (fa == fb) return 4;

    auto ca = content_tokens(fa);
    auto cb = content_tokens(fb);
    if (!ca.empty() && !cb.empty()) {
        if (proper_subset(ca, cb) || proper_subset(cb, ca)) return 3;
        for (const auto& ta : ca)
            for (const auto& tb : cb)
                if (token_shared(ta, tb)) return 2;
    }

    if (opts.llm_keyword_tier && llm_ready(opts))
        return llm_bool(opts, "keyword_related", {{"a", a}, {"b", b}}, "related") ? 1 : 0;
    return 0;
}

int score_institution(const ScholarProfile& a, const ScholarProfile& b,
                      const ScoringOptions& opts) {
    if (!a.workplace || !b.workplace) return 0;
    return institutions_equivalent(*a.workplace, *b.workplace, opts) ? 2 : 0;
}

int score_segments(const ScholarProfile& a, const ScholarProfile& b, const ScoringOptions& opts,
                   std::vector<MatchRecord>* rationale) {
    auto as = unified_segments(a);
    auto bs = unified_segments(b);
    if (as.empty() || bs.empty()) return 0;

    std::vector<std::vector<int>> adj(as.size());
    for (size_t i = 0; i < as.size(); ++i)
        for (size_t j = 0; j < bs.size(); ++j)
            if (segments_match(as[i], bs[j], opts)) adj[i].push_back(static_cast<int>(j));

    // Maximum bipartite matching (augmenting paths), deterministic order.
    std::vector<int> match_b(bs.size(), -1);
    std::function<bool(size_t, std::vector<bool>&)> augment = [&](size_t i,
                                                                  std::vector<bool>& seen) {
        for (int j : adj[i]) {
            if (seen[static_cast<size_t>(j)]) continue;
            seen[static_cast<size_t>(j)] = true;
            if (match_b[static_cast<size_t>(j)] < 0 ||
                augment(static_cast<size_t>(match_b[static_cast<size_t>(j)]), seen)) {
                match_b[static_cast<size_t>(j)] = static_cast<int>(i);
                return true;
            }
        }
        return false;
    };
    int matched = 0;
    for (size_t i = 0; i < as.size(); ++i) {
        std::vector<bool> seen(bs.size(), false);
        if (augment(i, seen)) ++matched;
    }

    if (rationale) {
        std::vector<std::pair<int, int>> pairs;  // (a index, b index)
        for (size_t j = 0; j < bs.size(); ++j)
            if (match_b[j] >= 0) pairs.emplace_back(match_b[j], static_cast<int>(j));
        std::sort(pairs.begin(), pairs.end());
        for (auto [i, j] : pairs)
            rationale->push_back({"segment", segment_display(as[static_cast<size_t>(i)]),
                                  segment_display(bs[static_cast<size_t>(j)]), 3});
    }
    return 3 * matched;
}

int score_keywords(const ScholarProfile& a, const ScholarProfile& b, const ScoringOptions& opts,
                   std::vector<MatchRecord>* rationale) {
    std::vector<std::string> ka, kb;
    for (const auto& k : a.keywords)
        if (!strings::trim(k).empty()) ka.push_back(k);
    for (const auto& k : b.keywords)
        if (!strings::trim(k).empty()) kb.push_back(k);
    if (ka.empty() || kb.empty()) return 0;

    // Columns are the smaller list so the exact assignment stays cheap.
    bool swapped = ka.size() < kb.size();
    const auto& rows = swapped ? kb : ka;
    const auto& cols = swapped ? ka : kb;
    size_t n = rows.size(), m = cols.size();

    std::vector<std::vector<int>> w(n, std::vector<int>(m, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) w[i][j] = keyword_tier(rows[i], cols[j], opts);

    std::vector<std::pair<size_t, size_t>> chosen;  // (row, col)
    int best = 0;
    if (m <= 12) {
        // Exact one-to-one assignment over column subsets.
        const int kUnreachable = -1;
        size_t masks = size_t{1} << m;
        std::vector<std::vector<int>> dp(n + 1, std::vector<int>(masks, kUnreachable));
        dp[0][0] = 0;
        for (size_t i = 0; i < n; ++i) {
            for (size_t mask = 0; mask < masks; ++mask) {
                if (dp[i][mask] == kUnreachable) continue;
                if (dp[i][mask] > dp[i + 1][mask]) dp[i + 1][mask] = dp[i][mask];
                for (size_t j = 0; j < m; ++j) {
                    if (w[i][j] <= 0 || (mask & (size_t{1} << j))) continue;
                    size_t next = mask | (size_t{1} << j);
                    if (dp[i][mask] + w[i][j] > dp[i + 1][next])
                        dp[i + 1][next] = dp[i][mask] + w[i][j];
                }
            }
        }
        size_t best_mask = 0;
        for (size_t mask = 0; mask < masks; ++mask)
            if (dp[n][mask] > best) best = dp[n][mask], best_mask = mask;
        // Walk the table back to name the matched pairs.
        size_t mask = best_mask;
        for (size_t i = n; i > 0; --i) {
            if (dp[i - 1][mask] == dp[i][mask]) continue;
            for (size_t j = 0; j < m; ++j) {
                if (!(mask & (size_t{1} << j)) || w[i - 1][j] <= 0) continue;
                size_t prev = mask ^ (size_t{1} << j);
                if (dp[i - 1][prev] != kUnreachable &&
                    dp[i - 1][prev] + w[i - 1][j] == dp[i][mask]) {
                    chosen.emplace_back(i - 1, j);
                    mask = prev;
                    break;
                }
            }
        }
    } else {
        // Greedy by descending tier for oversized lists.
        std::vector<std::tuple<int, size_t, size_t>> edges;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < m; ++j)
                if (w[i][j] > 0) edges.emplace_back(-w[i][j], i, j);
        std::sort(edges.begin(), edges.end());
        std::vector<bool> used_r(n, false), used_c(m, false);
        for (auto [neg, i, j] : edges) {
            if (used_r[i] || used_c[j]) continue;
            used_r[i] = used_c[j] = true;
            chosen.emplace_back(i, j);
            best += -neg;
        }
    }

    if (rationale) {
        std::sort(chosen.begin(), chosen.end());
        for (auto [i, j] : chosen) {
            const std::string& side_a = swapped ? cols[j] : rows[i];
            const std::string& side_b = swapped ? rows[i] : cols[j];
            rationale->push_back({"keyword", side_a, side_b, w[i][j]});
        }
    }
    if (opts.keyword_points_cap > 0 && best > opts.keyword_points_cap)
        best = opts.keyword_points_cap;
    return best;
}

MatchDecision compare(const ScholarProfile& a, const ScholarProfile& b,
                      const ScoringOptions& opts) {
    MatchDecision d;
    d.threshold = opts.threshold;
    if (a.is_empty() || b.is_empty()) {
        d.verdict = Verdict::undecidable;
        return d;
    }
    d.score.institution_points = score_institution(a, b, opts);
    if (d.score.institution_points > 0)
        d.rationale.push_back({"institution", a.workplace.value_or(""),
                               b.workplace.value_or(""), d.score.institution_points});
    d.score.segment_points = score_segments(a, b, opts, &d.rationale);
    d.score.keyword_points = score_keywords(a, b, opts, &d.rationale);
    d.score.total = d.score.institution_points + d.score.segment_points + d.score.keyword_points;
    d.verdict = d.score.total >= d.threshold ? Verdict::same : Verdict::different;
    return d;
}

nlohmann::ordered_json MatchDecision::to_json() const {
    nlohmann::ordered_json j;
    j["score"] = {{"institution_points", score.institution_points},
                  {"segment_points", score.segment_points},
                  {"keyword_points", score.keyword_points},
                  {"total", score.total}};
    j["threshold"] = threshold;
    j["verdict"] = to_string(verdict);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rationale)
        arr.push_back({{"kind", r.kind}, {"a", r.a}, {"b", r.b}, {"points", r.points}});
    j["rationale"] = arr;
    return j;
}

std::string MatchDecision::render_text() const {
    std::string out;
    for (const auto& r : rationale)
        out += r.kind + "\t+" + std::to_string(r.points) + "\t" + r.a + "\t" + r.b + "\n";
    out += "total\t" + std::to_string(score.total) + "\tthreshold\t" +
           std::to_string(threshold) + "\tverdict\t" + to_string(verdict) + "\n";
    return out;
}

}  // namespace scholarlink
