#include "scholarlink/search.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "scholarlink/errors.hpp"
#include "scholarlink/strings.hpp"

namespace scholarlink {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + what + ": " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string today_epoch() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[16];
    std::strftime(buf, sizeof(buf), "%Y-%m-%d", std::gmtime(&t));
    return buf;
}

// Surname-first rendering of a possibly comma-delimited printed name.
std::string name_rendering(const std::string& raw) {
    auto comma = raw.find(',');
    if (comma == std::string::npos) return strings::normalize_ws(raw);
    return strings::normalize_ws(raw.substr(0, comma) + " " + raw.substr(comma + 1));
}

bool org_like(const std::string& segment) {
    static const char* kOrgWords[] = {"university", "institute", "academy", "college",
                                      "center", "centre", "laboratory", "school",
                                      "research", "hospital", "department"};
    auto folded = strings::to_lower(segment);
    for (const char* w : kOrgWords)
        if (folded.find(w) != std::string::npos) return true;
    return false;
}

std::string canonical_terms(const std::vector<std::string>& terms) {
    std::vector<std::string> folded;
    for (const auto& t : terms) folded.push_back(strings::to_lower(strings::normalize_ws(t)));
    std::sort(folded.begin(), folded.end());
    std::string out;
    for (const auto& t : folded) {
        if (!out.empty()) out += '\x1f';
        out += t;
    }
    return out;
}

std::string percent_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
            c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

void replace_all(std::string& text, const std::string& marker, const std::string& value) {
    size_t pos = 0;
    while ((pos = text.find(marker, pos)) != std::string::npos) {
        text.replace(pos, marker.size(), value);
        pos += value.size();
    }
}

json result_to_json(const SearchResult& r) {
    return json{{"url", r.url}, {"title", r.title}, {"snippet", r.snippet},
                {"rank", r.rank}, {"backend", r.backend}};
}

SearchResult result_from_json(const json& j) {
    SearchResult r;
    r.url = j.value("url", "");
    r.title = j.value("title", "");
    r.snippet = j.value("snippet", "");
    r.rank = j.value("rank", 0);
    r.backend = j.value("backend", "");
    return r;
}

json doc_to_json(const WebDocument& d) {
    return json{{"url", d.url}, {"fetched_text", d.fetched_text},
                {"fetched_at", d.fetched_at}, {"language", d.language}};
}

WebDocument doc_from_json(const json& j) {
    WebDocument d;
    d.url = j.value("url", "");
    d.fetched_text = j.value("fetched_text", "");
    d.fetched_at = j.value("fetched_at", "");
    d.language = j.value("language", "");
    return d;
}

}  // namespace

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::pinyin_inst_en: return "pinyin_inst_en";
        case Strategy::pinyin_inst_native: return "pinyin_inst_native";
        case Strategy::native_inst_native: return "native_inst_native";
        case Strategy::pinyin_inst_native_email: return "pinyin_inst_native_email";
    }
    return "pinyin_inst_en";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "pinyin_inst_en") return Strategy::pinyin_inst_en;
    if (s == "pinyin_inst_native") return Strategy::pinyin_inst_native;
    if (s == "native_inst_native") return Strategy::native_inst_native;
    if (s == "pinyin_inst_native_email") return Strategy::pinyin_inst_native_email;
    throw ConfigError("unknown strategy: " + s);
}

std::string to_string(LocaleHint h) {
    switch (h) {
        case LocaleHint::en: return "en";
        case LocaleHint::zh: return "zh";
        case LocaleHint::none: return "none";
    }
    return "none";
}

bool address_like(const std::string& segment) {
    for (char c : segment)
        if (c >= '0' && c <= '9') return true;
    static const char* kPlaces[] = {
        "people's republic of china", "republic of china", "p.r. china", "pr china", "china",
        "usa", "united states", "beijing", "shanghai", "guangzhou", "shenzhen", "nanjing",
        "hangzhou", "wuhan", "chengdu", "tianjin", "chongqing", "xi'an", "jiaxing", "zhejiang",
        "jiangsu", "guangdong", "hunan", "hubei", "shandong", "sichuan",
    };
    auto folded = strings::to_lower(strings::normalize_ws(segment));
    for (const char* p : kPlaces)
        if (folded == p) return true;
    return false;
}

std::string primary_institution(const std::string& affiliation) {
    auto segments = strings::split(affiliation, ',');
    std::string first_nonaddress;
    for (const auto& seg : segments) {
        auto s = strings::normalize_ws(seg);
        if (s.empty() || address_like(s)) continue;
        if (first_nonaddress.empty()) first_nonaddress = s;
        if (org_like(s)) return s;
    }
    if (!first_nonaddress.empty()) return first_nonaddress;
    return strings::normalize_ws(affiliation);
}

SearchQuery build_query(const ScholarMention& m, Strategy strategy, const QueryExtras& extras) {
    SearchQuery q;
    q.strategy = strategy;

    auto need_translation = [&]() -> const std::string& {
        if (!extras.translated_institution || extras.translated_institution->empty())
            throw MissingExtra("translated_institution");
        return *extras.translated_institution;
    };

    switch (strategy) {
        case Strategy::pinyin_inst_en:
            q.terms.push_back(name_rendering(m.raw_name));
            q.terms.push_back(primary_institution(m.affiliation));
            q.locale = LocaleHint::en;
            break;
        case Strategy::pinyin_inst_native:
            q.terms.push_back(name_rendering(m.raw_name));
            q.terms.push_back(need_translation());
            q.locale = LocaleHint::zh;
            break;
        case Strategy::native_inst_native:
            if (!extras.native_name || extras.native_name->empty())
                throw MissingExtra("native_name");
            q.terms.push_back(*extras.native_name);
            q.terms.push_back(need_translation());
            q.locale = LocaleHint::zh;
            break;
        case Strategy::pinyin_inst_native_email:
            q.terms.push_back(name_rendering(m.raw_name));
            q.terms.push_back(need_translation());
            if (!m.email || m.email->empty()) throw MissingExtra("email");
            q.terms.push_back(*m.email);
            q.locale = LocaleHint::zh;
            break;
    }
    for (const auto& kw : extras.research_keywords)
        if (!kw.empty()) q.terms.push_back(kw);
    return q;
}

std::string strip_html(const std::string& html) {
    std::string text = html;
    auto drop_block = [&text](const std::string& open, const std::string& close) {
        while (true) {
            auto folded = strings::to_lower(text);
            auto b = folded.find(open);
            if (b == std::string::npos) return;
            auto e = folded.find(close, b);
            if (e == std::string::npos) e = text.size() - close.size();
            text.erase(b, e - b + close.size());
        }
    };
    drop_block("<script", "</script>");
    drop_block("<style", "</style>");

    std::string out;
    out.reserve(text.size());
    bool in_tag = false;
    for (char c : text) {
        if (c == '<') {
            in_tag = true;
            out += ' ';
        } else if (c == '>') {
            in_tag = false;
        } else if (!in_tag) {
            out += c;
        }
    }
    static const std::pair<const char*, const char*> kEntities[] = {
        {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""},
        {"&#39;", "'"}, {"&apos;", "'"}, {"&nbsp;", " "}, {"&middot;", "·"},
    };
    for (const auto& [from, to] : kEntities) replace_all(out, from, to);
    return strings::normalize_ws(out);
}

std::string guess_language(const std::string& text) {
    size_t cjk = 0, latin = 0, i = 0;
    while (i < text.size()) {
        char32_t cp = strings::decode_utf8(text, i);
        if (strings::is_cjk(cp)) ++cjk;
        else if (strings::is_latin_letter(cp)) ++latin;
    }
    if (cjk == 0 && latin == 0) return "";
    return cjk * 10 >= (cjk + latin) * 3 ? "zh" : "en";  // >= 30% CJK
}

double SystemClock::now() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void SystemClock::sleep_until(double when) {
    double delta = when - now();
    if (delta > 0) std::this_thread::sleep_for(std::chrono::duration<double>(delta));
}

double ManualClock::now() {
    std::lock_guard<std::mutex> lock(mu_);
    return now_;
}

void ManualClock::sleep_until(double when) {
    std::lock_guard<std::mutex> lock(mu_);
    now_ = std::max(now_, when);
}

void ManualClock::advance(double seconds) {
    std::lock_guard<std::mutex> lock(mu_);
    now_ += seconds;
}

SearchGateway::SearchGateway(std::string cache_dir, std::shared_ptr<Clock> clock,
                             std::string epoch)
    : cache_dir_(std::move(cache_dir)),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()),
      epoch_(epoch.empty() ? today_epoch() : std::move(epoch)) {
    if (cache_dir_.empty()) return;
    fs::create_directories(cache_dir_);
    std::ifstream in(cache_dir_ + "/gateway_cache.jsonl");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) continue;
        auto key = rec.value("key", "");
        if (rec.value("kind", "") == "search") {
            std::vector<SearchResult> results;
            for (const auto& r : rec.at("results")) results.push_back(result_from_json(r));
            search_cache_[key] = std::move(results);
        } else if (rec.value("kind", "") == "fetch") {
            fetch_cache_[key] = doc_from_json(rec.at("doc"));
        }
    }
}

void SearchGateway::register_backend(std::shared_ptr<SearchBackend> backend, RateLimit limit) {
    std::lock_guard<std::mutex> lock(mu_);
    auto name = backend->name();
    if (backends_.count(name)) throw DuplicateBackend(name);
    auto& e = backends_[name];
    e.backend = std::move(backend);
    e.limit = limit;
}

std::vector<std::string> SearchGateway::backends() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<std::string> out;
    for (const auto& [name, e] : backends_) out.push_back(name);
    return out;
}

SearchGateway::Entry& SearchGateway::entry(const std::string& name) {
    auto it = backends_.find(name);
    if (it == backends_.end()) throw BackendUnavailable("not registered: " + name);
    return it->second;
}

// Sliding window: waits until fewer than max_requests calls fall inside the
// trailing interval. Called with mu_ held; may release time via the clock.
void SearchGateway::acquire_slot(Entry& e) {
    if (e.limit.max_requests <= 0) return;
    double now = clock_->now();
    while (true) {
        while (!e.recent.empty() && e.recent.front() <= now - e.limit.interval_seconds)
            e.recent.pop_front();
        if (static_cast<int>(e.recent.size()) < e.limit.max_requests) break;
        clock_->sleep_until(e.recent.front() + e.limit.interval_seconds);
        now = clock_->now();
    }
    e.recent.push_back(now);
}

void SearchGateway::persist(const json& record) {
    if (cache_dir_.empty()) return;
    std::ofstream out(cache_dir_ + "/gateway_cache.jsonl", std::ios::app);
    out << record.dump() << "\n";
}

std::vector<SearchResult> SearchGateway::search(const SearchQuery& q, const std::string& backend,
                                                int k) {
    if (q.terms.empty()) throw SchemaError("search query has no terms");
    if (k < 1) throw ConfigError("k must be >= 1");
    std::string key = backend + "|" + epoch_ + "|" + to_string(q.locale) + "|k=" +
                      std::to_string(k) + "|" + canonical_terms(q.terms);

    std::unique_lock<std::mutex> lock(mu_);
    if (auto it = search_cache_.find(key); it != search_cache_.end()) return it->second;
    Entry& e = entry(backend);
    acquire_slot(e);
    ++e.stats.searches;
    auto backend_ptr = e.backend;
    lock.unlock();

    auto results = backend_ptr->search(q, k);
    if (results.size() > static_cast<size_t>(k)) results.resize(static_cast<size_t>(k));
    for (size_t i = 0; i < results.size(); ++i) {
        results[i].rank = static_cast<int>(i) + 1;
        results[i].backend = backend;
    }

    lock.lock();
    search_cache_[key] = results;
    json rec = {{"kind", "search"}, {"key", key}, {"results", json::array()}};
    for (const auto& r : results) rec["results"].push_back(result_to_json(r));
    persist(rec);
    return results;
}

WebDocument SearchGateway::fetch(const std::string& url, const std::string& backend) {
    std::string key = backend + "|" + epoch_ + "|" + url;

    std::unique_lock<std::mutex> lock(mu_);
    if (auto it = fetch_cache_.find(key); it != fetch_cache_.end()) return it->second;
    Entry& e = entry(backend);
    acquire_slot(e);
    ++e.stats.fetches;
    auto backend_ptr = e.backend;
    lock.unlock();

    auto doc = backend_ptr->fetch(url);

    lock.lock();
    fetch_cache_[key] = doc;
    persist(json{{"kind", "fetch"}, {"key", key}, {"doc", doc_to_json(doc)}});
    return doc;
}

BackendStats SearchGateway::stats(const std::string& backend) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = backends_.find(backend);
    return it == backends_.end() ? BackendStats{} : it->second.stats;
}

FixtureBackend::FixtureBackend(std::string corpus_dir, std::string name, int fetch_min_chars)
    : name_(std::move(name)), fetch_min_chars_(fetch_min_chars) {
    auto manifest_path = corpus_dir + "/manifest.json";
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path, "fixture corpus manifest"));
    } catch (const json::exception& e) {
        throw ConfigError("fixture manifest is not valid JSON: " + std::string(e.what()));
    }
    for (const auto& entry : manifest.at("documents")) {
        Doc d;
        d.url = entry.at("url").get<std::string>();
        d.title = entry.value("title", "");
        d.language = entry.value("language", "");
        d.raw = read_file(corpus_dir + "/" + entry.at("file").get<std::string>(),
                          "fixture document");
        d.plain = strip_html(d.raw);
        d.folded = strings::to_lower(d.title + " " + d.plain);
        d.token_set = strings::tokens(d.folded);
        std::sort(d.token_set.begin(), d.token_set.end());
        d.token_set.erase(std::unique(d.token_set.begin(), d.token_set.end()),
                          d.token_set.end());
        docs_.push_back(std::move(d));
    }
    std::sort(docs_.begin(), docs_.end(),
              [](const Doc& a, const Doc& b) { return a.url < b.url; });
}

std::vector<SearchResult> FixtureBackend::search(const SearchQuery& q, int k) {
    struct Hit {
        const Doc* doc;
        int score;
        std::string first_term;  // for the snippet window
    };
    std::vector<Hit> hits;
    for (const auto& doc : docs_) {
        int score = 0;
        std::string first;
        for (const auto& raw_term : q.terms) {
            auto term = strings::to_lower(strings::normalize_ws(raw_term));
            if (term.empty()) continue;
            int points = 0;
            if (strings::contains_cjk(term)) {
                if (doc.folded.find(term) != std::string::npos)
                    points = strings::utf8_chars(term).size() > 1 ? 2 : 1;
            } else if (strings::tokens(term).size() > 1) {
                if (doc.folded.find(term) != std::string::npos) points = 2;
            } else {
                if (std::binary_search(doc.token_set.begin(), doc.token_set.end(), term))
                    points = 1;
            }
            if (points > 0 && first.empty()) first = term;
            score += points;
        }
        if (score > 0) hits.push_back({&doc, score, first});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc->url < b.doc->url;
    });
    if (hits.size() > static_cast<size_t>(k)) hits.resize(static_cast<size_t>(k));

    std::vector<SearchResult> out;
    for (size_t i = 0; i < hits.size(); ++i) {
        SearchResult r;
        r.url = hits[i].doc->url;
        r.title = hits[i].doc->title;
        auto pos = hits[i].doc->folded.find(hits[i].first_term);
        size_t start = pos == std::string::npos ? 0 : (pos < 40 ? 0 : pos - 40);
        r.snippet = strings::normalize_ws(hits[i].doc->plain.substr(
            std::min(start, hits[i].doc->plain.size()), 160));
        r.rank = static_cast<int>(i) + 1;
        r.backend = name_;
        out.push_back(std::move(r));
    }
    return out;
}

WebDocument FixtureBackend::fetch(const std::string& url) {
    auto it = std::lower_bound(docs_.begin(), docs_.end(), url,
                               [](const Doc& d, const std::string& u) { return d.url < u; });
    if (it == docs_.end() || it->url != url) throw FetchError(404, url);
    if (it->plain.size() < static_cast<size_t>(fetch_min_chars_)) throw ExtractionEmpty(url);
    WebDocument doc;
    doc.url = url;
    doc.fetched_text = it->plain;
    doc.fetched_at = iso_now();
    doc.language = it->language.empty() ? guess_language(it->plain) : it->language;
    return doc;
}

LiveBackendDescriptor sogou_descriptor() {
    LiveBackendDescriptor d;
    d.name = "sogou";
    d.base_url = "https://api.sogou.com";
    d.path_template = "/websearch?query={{query}}&lang={{locale}}";
    d.api_key_env = "SOGOU_API_KEY";
    d.results_pointer = "/results";
    return d;
}

LiveBackendDescriptor google_descriptor() {
    LiveBackendDescriptor d;
    d.name = "google";
    d.base_url = "https://customsearch.googleapis.com";
    d.path_template = "/customsearch/v1?q={{query}}&hl={{locale}}";
    d.api_key_env = "GOOGLE_API_KEY";
    d.results_pointer = "/items";
    d.url_key = "link";
    d.snippet_key = "snippet";
    return d;
}

LiveBackendDescriptor bing_descriptor() {
    LiveBackendDescriptor d;
    d.name = "bing";
    d.base_url = "https://api.bing.microsoft.com";
    d.path_template = "/v7.0/search?q={{query}}&mkt={{locale}}";
    d.api_key_env = "BING_API_KEY";
    d.results_pointer = "/webPages/value";
    d.url_key = "url";
    d.title_key = "name";
    d.snippet_key = "snippet";
    return d;
}

HttpSearchBackend::HttpSearchBackend(LiveBackendDescriptor d) : desc_(std::move(d)) {}

std::vector<SearchResult> HttpSearchBackend::search(const SearchQuery& q, int k) {
    std::string joined;
    for (const auto& t : q.terms) {
        if (!joined.empty()) joined += ' ';
        joined += t;
    }
    std::string path = desc_.path_template;
    replace_all(path, "{{query}}", percent_encode(joined));
    replace_all(path, "{{locale}}", to_string(q.locale));

    httplib::Client client(desc_.base_url);
    client.set_read_timeout(30, 0);
    httplib::Headers headers;
    if (!desc_.api_key_env.empty()) {
        const char* key = std::getenv(desc_.api_key_env.c_str());
        if (!key || !*key)
            throw BackendUnavailable(desc_.name + ": environment variable " + desc_.api_key_env +
                                     " is not set");
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = client.Get(path, headers);
    if (!res) throw BackendUnavailable(desc_.name + ": " + httplib::to_string(res.error()));
    if (res->status == 429) throw QuotaExceeded(desc_.name);
    if (res->status != 200) throw BackendUnavailable(desc_.name + ": HTTP " +
                                                     std::to_string(res->status));

    auto body = json::parse(res->body, nullptr, false);
    if (body.is_discarded()) throw BackendUnavailable(desc_.name + ": malformed response body");
    json hits = body.value(json::json_pointer(desc_.results_pointer), json::array());

    std::vector<SearchResult> out;
    for (const auto& h : hits) {
        if (static_cast<int>(out.size()) >= k) break;
        SearchResult r;
        r.url = h.value(desc_.url_key, "");
        r.title = h.value(desc_.title_key, "");
        r.snippet = h.value(desc_.snippet_key, "");
        if (r.url.empty()) continue;
        r.rank = static_cast<int>(out.size()) + 1;
        r.backend = desc_.name;
        out.push_back(std::move(r));
    }
    return out;
}

WebDocument HttpSearchBackend::fetch(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw FetchError(0, url);
    auto host_end = url.find('/', scheme_end + 3);
    std::string origin = host_end == std::string::npos ? url : url.substr(0, host_end);
    std::string path = host_end == std::string::npos ? "/" : url.substr(host_end);

    httplib::Client client(origin);
    client.set_read_timeout(30, 0);
    client.set_follow_location(true);
    auto res = client.Get(path);
    if (!res) throw FetchError(0, url);
    if (res->status != 200) throw FetchError(res->status, url);

    std::string text = strip_html(res->body);
    if (text.size() < static_cast<size_t>(desc_.fetch_min_chars)) throw ExtractionEmpty(url);
    WebDocument doc;
    doc.url = url;
    doc.fetched_text = text;
    doc.fetched_at = iso_now();
    doc.language = guess_language(text);
    return doc;
}

}  // namespace scholarlink
