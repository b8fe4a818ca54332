#pragma once

// Helpers shared by the scoring tests: profile pairs with known point
// totals, randomized profiles, and brute-force matching oracles that are
// independent of the production assignment code.

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "scholarlink/disambig.hpp"
#include "scholarlink/profile.hpp"

namespace support {

struct GridPair {
    scholarlink::ScholarProfile a;
    scholarlink::ScholarProfile b;
    int expected_total = 0;
};

// Builds a pair whose comparison score is known by construction:
// institution contributes 0 or 2, `segment_matches` shared segments
// contribute 3 each, and each keyword slot contributes its tier (0 = the
// slot holds unrelated keywords). Slot vocabularies are disjoint (distinct
// five-letter stems), so pairs cannot interfere across slots.
inline GridPair grid_pair(bool inst_match, int segment_matches,
                          const std::vector<int>& keyword_tiers) {
    using scholarlink::EducationSegment;
    using scholarlink::ProfessionalSegment;
    GridPair g;
    g.a.name = "Grid Subject";
    g.b.name = "Grid Subject";
    g.a.workplace = "Gridtown University";
    g.b.workplace = inst_match ? "Gridtown University" : "Riverside Institute";
    g.expected_total = inst_match ? 2 : 0;

    for (int i = 0; i < segment_matches; ++i) {
        EducationSegment e;
        e.school = "Campus" + std::to_string(i) + " University";
        e.degree = "Degree" + std::to_string(i);
        e.fromto = "200" + std::to_string(i) + "-200" + std::to_string(i + 1);
        g.a.education_track.push_back(e);
        g.b.education_track.push_back(e);
        g.expected_total += 3;
    }
    // One unmatched segment on each side keeps the matcher honest.
    ProfessionalSegment pa;
    pa.agency = "Anorth College";
    pa.title = "Lecturer";
    g.a.professional_track.push_back(pa);
    ProfessionalSegment pb;
    pb.agency = "Bsouth Academy";
    pb.title = "Curator";
    g.b.professional_track.push_back(pb);

    for (size_t i = 0; i < keyword_tiers.size(); ++i) {
        std::string stem(5, static_cast<char>('a' + i));  // aaaaa, bbbbb, ...
        int tier = keyword_tiers[i];
        switch (tier) {
            case 4:
                g.a.keywords.push_back(stem + "1 " + stem + "2");
                g.b.keywords.push_back(stem + "1 " + stem + "2");
                break;
            case 3:
                g.a.keywords.push_back(stem + "1");
                g.b.keywords.push_back(stem + "1 " + stem + "2");
                break;
            case 2:
                g.a.keywords.push_back(stem + "1 " + stem + "7");
                g.b.keywords.push_back(stem + "1 " + stem + "8");
                break;
            default:  // unrelated pair, contributes nothing
                g.a.keywords.push_back("z" + stem + "left");
                g.b.keywords.push_back("y" + stem + "right");
                break;
        }
        g.expected_total += tier;
    }
    return g;
}

// Exhaustive one-to-one keyword assignment by permutation enumeration.
inline int oracle_keyword_best(const std::vector<std::string>& ka,
                               const std::vector<std::string>& kb,
                               const scholarlink::ScoringOptions& opts = {}) {
    size_t n = ka.size(), m = kb.size();
    if (n == 0 || m == 0) return 0;
    std::vector<std::vector<int>> w(n, std::vector<int>(m));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) w[i][j] = scholarlink::keyword_tier(ka[i], kb[j], opts);
    size_t big = std::max(n, m);
    std::vector<int> perm(big);
    std::iota(perm.begin(), perm.end(), 0);
    int best = 0;
    do {
        int total = 0;
        for (size_t i = 0; i < n; ++i)
            if (static_cast<size_t>(perm[i]) < m) total += w[i][static_cast<size_t>(perm[i])];
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Exhaustive segment matching by permutation enumeration.
inline int oracle_segment_matches(const scholarlink::ScholarProfile& a,
                                  const scholarlink::ScholarProfile& b,
                                  const scholarlink::ScoringOptions& opts = {}) {
    auto as = scholarlink::unified_segments(a);
    auto bs = scholarlink::unified_segments(b);
    size_t n = as.size(), m = bs.size();
    if (n == 0 || m == 0) return 0;
    std::vector<std::vector<bool>> ok(n, std::vector<bool>(m));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) ok[i][j] = scholarlink::segments_match(as[i], bs[j], opts);
    size_t big = std::max(n, m);
    std::vector<int> perm(big);
    std::iota(perm.begin(), perm.end(), 0);
    int best = 0;
    do {
        int count = 0;
        for (size_t i = 0; i < n; ++i)
            if (static_cast<size_t>(perm[i]) < m && ok[i][static_cast<size_t>(perm[i])]) ++count;
        best = std::max(best, count);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Randomized profiles over pools chosen to exercise every rubric tier and
// the containment/overlap edge cases.
inline scholarlink::ScholarProfile random_profile(std::mt19937& rng) {
    using scholarlink::EducationSegment;
    using scholarlink::ProfessionalSegment;
    static const std::vector<std::string> kOrgs = {
        "Harborview University",
        "Harborview University School of Data",
        "Northgate Institute",
        "Coastal Polytechnic",
        "Tsinghua University",
        "清华大学",
        "Riverbend College",
        "Summit Academy of Sciences",
    };
    static const std::vector<std::string> kRoles = {"Professor", "Associate Professor",
                                                    "PhD", "Master", "Engineer"};
    static const std::vector<std::string> kSpans = {"2001-2005", "2004-2008", "2010-Present",
                                                    "1998-2000", "2016-2020", "visiting"};
    static const std::vector<std::string> kKeywords = {
        "flexible electronics",
        "flexible electronic devices",
        "soft matter mechanics",
        "mechanics",
        "graph algorithms",
        "distributed graph algorithms",
        "water treatment",
        "ozone water treatment",
        "微型机器人",
        "机器人",
        "quantum sensing",
        "sensor networks",
    };
    auto pick = [&rng](const std::vector<std::string>& pool) {
        return pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
    };
    auto maybe = [&rng](double p) {
        return std::uniform_real_distribution<double>(0, 1)(rng) < p;
    };

    scholarlink::ScholarProfile p;
    p.name = "Random Scholar";
    if (maybe(0.85)) p.workplace = pick(kOrgs);
    size_t edu = std::uniform_int_distribution<size_t>(0, 3)(rng);
    for (size_t i = 0; i < edu; ++i) {
        EducationSegment e;
        e.school = pick(kOrgs);
        if (maybe(0.7)) e.degree = pick(kRoles);
        if (maybe(0.7)) e.fromto = pick(kSpans);
        p.education_track.push_back(e);
    }
    size_t work = std::uniform_int_distribution<size_t>(0, 2)(rng);
    for (size_t i = 0; i < work; ++i) {
        ProfessionalSegment w;
        w.agency = pick(kOrgs);
        if (maybe(0.7)) w.title = pick(kRoles);
        if (maybe(0.7)) w.fromto = pick(kSpans);
        p.professional_track.push_back(w);
    }
    size_t nk = std::uniform_int_distribution<size_t>(1, 4)(rng);
    for (size_t i = 0; i < nk; ++i) {
        auto k = pick(kKeywords);
        if (std::find(p.keywords.begin(), p.keywords.end(), k) == p.keywords.end())
            p.keywords.push_back(k);
    }
    return p;
}

}  // namespace support
