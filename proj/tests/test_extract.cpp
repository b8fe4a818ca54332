#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "scholarlink/errors.hpp"
#include "scholarlink/extract.hpp"

using namespace scholarlink;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kData = SCHOLARLINK_DATA_DIR;

constexpr const char* kHomeUrl = "https://home.example.edu/zhang";
constexpr const char* kAwardUrl = "https://award.example.edu/zhang";
constexpr const char* kNewsUrl = "https://news.example.com/zhang";
constexpr const char* kLinUrl = "https://sysu.example.edu/lin";
constexpr const char* kWangAUrl = "https://fudan.example.edu/wang-a";
constexpr const char* kWangBUrl = "https://fudan.example.edu/wang-b";

std::string make_corpus(const std::string& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto put = [&dir](const std::string& file, const std::string& text) {
        std::ofstream out(dir + "/" + file, std::ios::binary);
        out << "<html><body>" << text << "</body></html>";
    };
    put("home.html",
        "<h1>Zhang Yihui</h1><p>Professor, Center for Flexible Electronics Technology, "
        "Tsinghua University. PhD Northwestern University 2010-2014. Research: flexible "
        "electronics, soft matter mechanics.</p>");
    put("award.html",
        "<p>Award citation: Zhang Yihui, Tsinghua University, honored for contributions "
        "to flexible electronics and soft matter mechanics research programs.</p>");
    put("news.html",
        "<p>Campus note: Zhang Yihui of Tsinghua University attended the opening "
        "ceremony yesterday along with several colleagues from other departments.</p>");
    put("lin.html",
        "<p>Lin Liang, Sun Yat-sen University. Biography: professor of computer vision, "
        "PhD 2005, leads the image analysis group at Sun Yat-sen University.</p>");
    put("wang_a.html",
        "<p>Wang Wei, Fudan University. Laboratory of quantum optics and photonics; "
        "publications on entangled light sources and precision interferometry.</p>");
    put("wang_b.html",
        "<p>Wang Wei, Fudan University. Department of History; studies medieval "
        "archives, trade records, and the social history of early navigation.</p>");
    json manifest = {{"documents", json::array()}};
    auto add = [&manifest](const std::string& file, const std::string& url) {
        manifest["documents"].push_back(
            json{{"file", file}, {"url", url}, {"title", file}, {"language", "en"}});
    };
    add("home.html", kHomeUrl);
    add("award.html", kAwardUrl);
    add("news.html", kNewsUrl);
    add("lin.html", kLinUrl);
    add("wang_a.html", kWangAUrl);
    add("wang_b.html", kWangBUrl);
    std::ofstream out(dir + "/manifest.json", std::ios::binary);
    out << manifest.dump(2);
    return dir;
}

json stub_script() {
    json r = json::object();
    auto bio = [&r](const std::string& url, bool v) {
        r["filter_biographical|" + url] = {{"biographical", v}};
    };
    bio(kHomeUrl, true);
    bio(kAwardUrl, true);
    bio(kNewsUrl, false);
    bio(kLinUrl, true);
    bio(kWangAUrl, true);
    bio(kWangBUrl, true);

    const std::string zhang_aff = "Tsinghua University, Beijing 100084, China";
    const std::string wang_aff = "Fudan University, Shanghai, China";
    r["filter_target_match|" + std::string(kHomeUrl) + "|Zhang, Yihui|" + zhang_aff] =
        {{"match", true}};
    r["filter_target_match|" + std::string(kAwardUrl) + "|Zhang, Yihui|" + zhang_aff] =
        {{"match", true}};
    r["filter_target_match|https://zh.example.cn/zh|Zhang, Yihui|" + zhang_aff] =
        {{"match", true}};
    r["filter_target_match|" + std::string(kWangAUrl) + "|Wang, Wei|" + wang_aff] =
        {{"match", true}};
    r["filter_target_match|" + std::string(kWangBUrl) + "|Wang, Wei|" + wang_aff] =
        {{"match", true}};

    r["extract_profile|" + std::string(kHomeUrl)] = {
        {"name", "Zhang Yihui"},
        {"workplace", "Center for Flexible Electronics Technology, Tsinghua University"},
        {"keywords", json::array({"flexible electronics", "soft matter mechanics"})},
        {"education_track", json::array({json{{"fromto", "2010-2014"},
                                              {"school", "Northwestern University"},
                                              {"scholar", "PhD"}}})}};
    r["extract_profile|" + std::string(kAwardUrl)] = {
        {"name", "Zhang Yihui"},
        {"workplace", "Tsinghua University"},
        {"keywords", json::array({"flexible electronics", "soft matter mechanics"})}};
    r["extract_profile|" + std::string(kWangAUrl)] = {
        {"name", "Wang Wei"},
        {"workplace", "Fudan University"},
        {"keywords", json::array({"quantum optics", "photonics"})}};
    r["extract_profile|" + std::string(kWangBUrl)] = {
        {"name", "Wang Wei"},
        {"workplace", "Fudan University"},
        {"keywords", json::array({"medieval history", "trade archives"})}};
    return json{{"responses", r}};
}

struct Rig {
    SearchGateway search;
    LlmGateway llm;
    PromptLibrary prompts = PromptLibrary::load(kData + "/prompts/manifest.json");
    RomanizationTable table =
        RomanizationTable::load(kData + "/pinyin_table.tsv", kData + "/surnames.txt");
    std::shared_ptr<ScriptedStubProvider> stub;

    Rig() {
        stub = std::make_shared<ScriptedStubProvider>(stub_script(), "stub");
        llm.register_provider(stub);
        search.register_backend(
            std::make_shared<FixtureBackend>(make_corpus("extract_corpus_tmp")));
    }

    ExtractAgent agent() { return ExtractAgent(search, llm, prompts, table); }
};

ScholarMention zhang() {
    ScholarMention m;
    m.raw_name = "Zhang, Yihui";
    m.affiliation = "Tsinghua University, Beijing 100084, China";
    m.source_id = "p-1";
    return m;
}

ScholarMention wang() {
    ScholarMention m;
    m.raw_name = "Wang, Wei";
    m.affiliation = "Fudan University, Shanghai, China";
    m.source_id = "p-2";
    return m;
}

}  // namespace

TEST_CASE("gather fetches top-k documents, deduplicated; no coverage means empty") {
    Rig rig;
    auto agent = rig.agent();

    auto docs = agent.gather(zhang(), Strategy::pinyin_inst_en, {});
    REQUIRE(docs.size() == 3);
    std::set<std::string> urls;
    for (const auto& d : docs) {
        urls.insert(d.url);
        CHECK_FALSE(d.fetched_text.empty());
    }
    CHECK(urls == std::set<std::string>{kHomeUrl, kAwardUrl, kNewsUrl});

    ScholarMention stranger;
    stranger.raw_name = "Zhao, Min";
    stranger.affiliation = "Unlisted Polytechnic of Nowhere";
    stranger.source_id = "p-x";
    CHECK(agent.gather(stranger, Strategy::pinyin_inst_en, {}).empty());
}

TEST_CASE("filter_biographical: model verdicts, empty documents short-circuit") {
    Rig rig;
    auto agent = rig.agent();

    auto home = rig.search.fetch(kHomeUrl, "fixture");
    auto news = rig.search.fetch(kNewsUrl, "fixture");
    CHECK(agent.filter_biographical(home));
    CHECK_FALSE(agent.filter_biographical(news));

    long before = rig.stub->calls();
    WebDocument blank{"https://blank.example.com/", "   ", "", ""};
    CHECK_FALSE(agent.filter_biographical(blank));
    CHECK(rig.stub->calls() == before);  // judged without the model
}

TEST_CASE("filter_target_match: deterministic rendering gate before the model") {
    Rig rig;
    auto agent = rig.agent();

    SUBCASE("matching page passes") {
        auto home = rig.search.fetch(kHomeUrl, "fixture");
        CHECK(agent.filter_target_match(home, zhang()));
    }
    SUBCASE("a different person at the right institution never reaches the model") {
        auto lin_doc = rig.search.fetch(kLinUrl, "fixture");
        ScholarMention lin;
        lin.raw_name = "Lin, Jing";
        lin.affiliation = "Sun Yat-sen University, Guangzhou, China";
        lin.source_id = "p-3";
        long before = rig.stub->calls();
        CHECK_FALSE(agent.filter_target_match(lin_doc, lin));
        CHECK(rig.stub->calls() == before);
    }
    SUBCASE("a native-script page needs the hypothesized native name") {
        WebDocument zh_doc{"https://zh.example.cn/zh",
                           "张益慧，清华大学教授，研究柔性电子与微型机器人。", "", "zh"};
        long before = rig.stub->calls();
        CHECK_FALSE(agent.filter_target_match(zh_doc, zhang()));
        CHECK(rig.stub->calls() == before);  // no accepted rendering on the page
        QueryExtras extras;
        extras.native_name = "张益慧";
        CHECK(agent.filter_target_match(zh_doc, zhang(), extras));
        CHECK(rig.stub->calls() == before + 1);
    }
}

TEST_CASE("extract_profile groups per-page profiles with the decision scorer") {
    Rig rig;
    auto agent = rig.agent();

    SUBCASE("two pages of one scholar merge into a single profile") {
        auto docs = std::vector<WebDocument>{rig.search.fetch(kHomeUrl, "fixture"),
                                             rig.search.fetch(kAwardUrl, "fixture")};
        auto outcome = agent.extract_profile(docs, zhang(), Strategy::pinyin_inst_en);
        REQUIRE(outcome.found());
        CHECK(outcome.candidates.empty());
        CHECK(outcome.profile->workplace->find("Center for Flexible Electronics Technology") !=
              std::string::npos);
        CHECK(outcome.profile->education_track.size() == 1);
        CHECK(outcome.profile->keywords.size() == 2);  // deduplicated on merge
        REQUIRE(outcome.profile->provenance.size() == 2);
        CHECK(outcome.evidence_urls.size() == 2);
        CHECK(outcome.strategy_used == Strategy::pinyin_inst_en);
    }
    SUBCASE("homonyms at one institution become two candidates, not a merge") {
        auto docs = std::vector<WebDocument>{rig.search.fetch(kWangAUrl, "fixture"),
                                             rig.search.fetch(kWangBUrl, "fixture")};
        auto outcome = agent.extract_profile(docs, wang(), Strategy::pinyin_inst_en);
        CHECK_FALSE(outcome.found());
        REQUIRE(outcome.candidates.size() == 2);
        CHECK(outcome.candidates[0].keywords != outcome.candidates[1].keywords);
    }
    SUBCASE("zero documents is the null outcome, with no evidence claimed") {
        auto outcome = agent.extract_profile({}, zhang(), Strategy::pinyin_inst_en);
        CHECK_FALSE(outcome.found());
        CHECK(outcome.candidates.empty());
        CHECK(outcome.evidence_urls.empty());
    }
}

TEST_CASE("run: full pipeline with per-document audit") {
    Rig rig;
    auto agent = rig.agent();

    std::vector<FilterVerdict> audit;
    auto outcome = agent.run(zhang(), Strategy::pinyin_inst_en, {}, &audit);
    REQUIRE(outcome.found());
    REQUIRE(audit.size() == 3);

    std::map<std::string, FilterVerdict> by_url;
    for (const auto& v : audit) by_url[v.url] = v;
    CHECK(by_url[kHomeUrl].biographical);
    CHECK(by_url[kHomeUrl].target_match);
    CHECK(by_url[kHomeUrl].extracted);
    CHECK(by_url[kAwardUrl].extracted);
    CHECK_FALSE(by_url[kNewsUrl].biographical);
    CHECK_FALSE(by_url[kNewsUrl].target_match);
    CHECK_FALSE(by_url[kNewsUrl].extracted);

    // Same corpus, same scholar: the merged profile carries both pages.
    CHECK(outcome.profile->provenance.size() == 2);

    SUBCASE("the filtered-out person yields the null outcome") {
        ScholarMention lin;
        lin.raw_name = "Lin, Jing";
        lin.affiliation = "Sun Yat-sen University, Guangzhou, China";
        lin.source_id = "p-3";
        std::vector<FilterVerdict> lin_audit;
        auto null_outcome = agent.run(lin, Strategy::pinyin_inst_en, {}, &lin_audit);
        CHECK_FALSE(null_outcome.found());
        CHECK(null_outcome.evidence_urls.empty());
        REQUIRE(lin_audit.size() == 1);
        CHECK(lin_audit[0].biographical);        // it is a biography...
        CHECK_FALSE(lin_audit[0].target_match);  // ...of somebody else
    }
}
