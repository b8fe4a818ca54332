#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "scholarlink/errors.hpp"
#include "scholarlink/profile.hpp"

using namespace scholarlink;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sample(const std::string& name) {
  return std::string(SCHOLARLINK_FIXTURE_DIR) + "/samples/" + name;
}

ScholarProfile make_full_profile() {
  ScholarProfile p;
  p.name = "Qiang Zhimin";
  p.workplace = "Research Center for Eco-environmental Sciences, Chinese Academy of Sciences";
  p.email = {"qiangz@rcees.ac.cn"};
  p.keywords = {"Wastewater Treatment", "Drinking Water Purification"};
  p.education_track = {{"1994 - 1997", "Tongji University", std::nullopt, "Master"}};
  p.professional_track = {{"2006 - Present", "Research Center for Eco-environmental Sciences", std::nullopt}};
  p.honor_track = {{std::nullopt, "Distinguished Young Scholars"}};
  p.provenance = {{"https://example.org/a", "2024-01-01T00:00:00Z"}};
  p.language = ProfileLanguage::romanized;
  return p;
}

}  // namespace

TEST_CASE("mention parse and validation") {
  json j = {
      {"raw_name", "Zhang, Yihui"},
      {"affiliation", "Tsinghua University, Beijing"},
      {"email", "zy@tsinghua.edu.cn"},
      {"origin", "paper_author"},
      {"source_id", "p-1"},
  };
  auto m = parse_mention(j);
  CHECK(m.raw_name == "Zhang, Yihui");
  CHECK(m.email.has_value());
  m.validate();

  auto back = mention_to_json(m);
  auto m2 = parse_mention(back);
  CHECK(m2.raw_name == m.raw_name);
  CHECK(m2.email == m.email);
  CHECK(m2.origin == m.origin);

  SUBCASE("whitespace-only name throws EmptyName") {
    m.raw_name = "  \t ";
    CHECK_THROWS_AS(m.validate(), EmptyName);
  }
  SUBCASE("malformed email throws SchemaError") {
    m.email = "not-an-email";
    CHECK_THROWS_AS(m.validate(), SchemaError);
  }
}

TEST_CASE("sample documents parse with bit-exact unknowns") {
  auto text = slurp(sample("qiang_zhimin.json"));
  auto p = parse_profile(text);

  CHECK(p.name == "Qiang Zhimin");
  REQUIRE(p.education_track.size() == 2);
  // "null" in the document means unknown in memory.
  CHECK_FALSE(p.education_track[0].major.has_value());
  CHECK(p.education_track[0].degree == "Master");
  REQUIRE(p.professional_track.size() == 4);
  CHECK_FALSE(p.professional_track[3].title.has_value());
  CHECK(p.email == std::vector<std::string>{"qiangz@rcees.ac.cn"});

  // Re-serialization keeps the sentinel and the canonical key order.
  auto out = json::parse(serialize_profile(p));
  auto in = json::parse(text);
  CHECK(out["education_track"][0]["major"] == "null");
  CHECK(out["professional_track"][3]["title"] == "null");
  for (auto& key : {"name", "workplace", "email", "keywords", "education_track",
                    "professional_track", "honor_track"}) {
    if (in.contains(key)) CHECK(out[key] == in[key]);
  }
}

TEST_CASE("samples without scalar email or tracks parse to empty lists") {
  auto a = parse_profile(slurp(sample("zhang_yihui_a.json")));
  CHECK(a.email.empty());
  CHECK(a.education_track.empty());
  CHECK(a.professional_track.empty());
  CHECK(a.honor_track.empty());
  CHECK(a.keywords.size() == 4);
  CHECK_FALSE(a.is_empty());

  auto b = parse_profile(slurp(sample("zhang_yihui_b.json")));
  CHECK(b.honor_track.size() == 5);
  REQUIRE(b.professional_track.size() == 1);
  CHECK_FALSE(b.professional_track[0].fromto.has_value());
}

TEST_CASE("round trip is exact") {
  auto p = make_full_profile();
  auto q = parse_profile(serialize_profile(p));
  CHECK(p == q);

  // Unknown-heavy profile.
  ScholarProfile u;
  u.education_track = {{std::nullopt, "Some School", std::nullopt, std::nullopt}};
  auto v = parse_profile(serialize_profile(u));
  CHECK(u == v);
}

TEST_CASE("canonical key order is stable") {
  auto s = serialize_profile(make_full_profile());
  auto n = s.find("\"name\"");
  auto w = s.find("\"workplace\"");
  auto e = s.find("\"email\"");
  auto k = s.find("\"keywords\"");
  auto ed = s.find("\"education_track\"");
  auto pr = s.find("\"professional_track\"");
  auto ho = s.find("\"honor_track\"");
  CHECK(n < w);
  CHECK(w < e);
  CHECK(e < k);
  CHECK(k < ed);
  CHECK(ed < pr);
  CHECK(pr < ho);
}

TEST_CASE("parse failures are typed") {
  CHECK_THROWS_AS(parse_profile("{not json"), ParseError);
  CHECK_THROWS_AS(parse_profile("[1,2]"), SchemaError);
  CHECK_THROWS_AS(parse_profile(R"({"keywords": "oops"})"), SchemaError);
  CHECK_THROWS_AS(parse_profile(R"({"education_track": [{"school": ""}]})"), SchemaError);
  CHECK_THROWS_AS(parse_profile(R"({"education_track": [{"major": "Physics"}]})"), SchemaError);
}

TEST_CASE("is_empty ignores the name field") {
  ScholarProfile p;
  CHECK(p.is_empty());
  p.name = "Zhang Yihui";
  CHECK(p.is_empty());
  p.keywords = {"Soft Matter"};
  CHECK_FALSE(p.is_empty());
}

TEST_CASE("merge is commutative on content, idempotent, and dedups") {
  auto a = parse_profile(slurp(sample("zhang_yihui_a.json")));
  auto b = parse_profile(slurp(sample("zhang_yihui_b.json")));
  a.provenance = {{"https://example.org/a", ""}};
  b.provenance = {{"https://example.org/b", ""}};

  auto ab = merge_profiles(a, b);
  auto ba = merge_profiles(b, a);

  // Same multiset of keywords/tracks either way; scalar precedence differs.
  CHECK(ab.keywords.size() == 7);
  CHECK(ba.keywords.size() == 7);
  CHECK(ab.honor_track.size() == 5);
  CHECK(ab.professional_track.size() == 1);
  CHECK(ab.provenance.size() == 2);
  CHECK(ab.workplace == a.workplace);
  CHECK(ba.workplace == b.workplace);

  // Idempotence: merging a profile with itself changes nothing.
  CHECK(merge_profiles(ab, ab) == ab);

  // Segment dedup is case- and whitespace-insensitive.
  auto b2 = b;
  b2.professional_track[0].agency = "  tsinghua  UNIVERSITY ";
  auto m = merge_profiles(b, b2);
  CHECK(m.professional_track.size() == 1);
}

TEST_CASE("merge keeps unknown scalars unknown until one side knows") {
  ScholarProfile a, b;
  b.workplace = "Tsinghua University";
  auto m = merge_profiles(a, b);
  CHECK(m.workplace == "Tsinghua University");
  CHECK(merge_profiles(a, a).workplace == std::nullopt);

  a.language = ProfileLanguage::native;
  b.language = ProfileLanguage::unspecified;
  CHECK(merge_profiles(a, b).language == ProfileLanguage::native);
  b.language = ProfileLanguage::romanized;
  CHECK(merge_profiles(a, b).language == ProfileLanguage::mixed);
}

TEST_CASE("jsonl store round-trips a small registry") {
  auto path = std::string("registry_roundtrip.jsonl");
  std::vector<ScholarProfile> reg = {make_full_profile()};
  reg.push_back(parse_profile(slurp(sample("zhang_yihui_a.json"))));
  write_profiles_jsonl(path, reg);
  auto back = read_profiles_jsonl(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == reg[0]);
  CHECK(back[1] == reg[1]);
}
