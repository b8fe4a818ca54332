#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scholarlink/profile.hpp"

namespace scholarlink {

/// Query-composition recipes: name rendering x institution language x email.
enum class Strategy {
    pinyin_inst_en,
    pinyin_inst_native,
    native_inst_native,
    pinyin_inst_native_email,
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

enum class LocaleHint { en, zh, none };
std::string to_string(LocaleHint h);

struct SearchQuery {
    std::vector<std::string> terms;  // non-empty; [name, institution, (email), (keywords)]
    Strategy strategy = Strategy::pinyin_inst_en;
    LocaleHint locale = LocaleHint::none;
};

/// Enrichment values accumulated by the workflow and consumed by queries.
struct QueryExtras {
    std::optional<std::string> native_name;
    std::optional<std::string> translated_institution;
    std::vector<std::string> research_keywords;
};

/// True for comma segments that look like street/city/country address parts
/// (contain digits or are bare place names) rather than organization names.
bool address_like(const std::string& segment);

/// The primary institution phrase of an affiliation: the first comma segment
/// naming an organization, address/country segments skipped.
std::string primary_institution(const std::string& affiliation);

/// Composes query terms for a strategy. Throws MissingExtra when the
/// strategy's required extras (or the mention's email) are absent.
SearchQuery build_query(const ScholarMention& m, Strategy strategy, const QueryExtras& extras);

struct SearchResult {
    std::string url;
    std::string title;
    std::string snippet;
    int rank = 0;  // 1-based, unique per response
    std::string backend;
};

struct WebDocument {
    std::string url;
    std::string fetched_text;  // markup stripped
    std::string fetched_at;    // ISO-8601
    std::string language;      // "en", "zh", or "" when unknown
};

// Strips tags/scripts/styles, decodes basic entities, collapses whitespace.
std::string strip_html(const std::string& html);
// "zh" when CJK codepoints dominate letters, "en" for Latin text, else "".
std::string guess_language(const std::string& text);

class SearchBackend {
public:
    virtual ~SearchBackend() = default;
    virtual std::string name() const = 0;
    virtual std::vector<SearchResult> search(const SearchQuery& q, int k) = 0;
    virtual WebDocument fetch(const std::string& url) = 0;
};

/// Injectable time source so rate-limit behavior is testable.
class Clock {
public:
    virtual ~Clock() = default;
    virtual double now() = 0;                 // seconds, monotonic
    virtual void sleep_until(double when) = 0;
};

class SystemClock : public Clock {
public:
    double now() override;
    void sleep_until(double when) override;
};

class ManualClock : public Clock {
public:
    double now() override;
    void sleep_until(double when) override;  // jumps time forward
    void advance(double seconds);

private:
    double now_ = 0;
    std::mutex mu_;
};

struct RateLimit {
    int max_requests = 0;        // 0 = unlimited
    double interval_seconds = 1.0;
};

struct BackendStats {
    long searches = 0;  // calls that reached the backend (cache misses)
    long fetches = 0;
};

/// Uniform client over registered backends: per-query and per-url disk cache
/// within an epoch, shared per-backend rate limiting, instrumented counters.
class SearchGateway {
public:
    explicit SearchGateway(std::string cache_dir = "", std::shared_ptr<Clock> clock = nullptr,
                           std::string epoch = "");

    void register_backend(std::shared_ptr<SearchBackend> backend, RateLimit limit = {});
    std::vector<std::string> backends() const;

    std::vector<SearchResult> search(const SearchQuery& q, const std::string& backend, int k);
    WebDocument fetch(const std::string& url, const std::string& backend);

    BackendStats stats(const std::string& backend) const;
    const std::string& epoch() const { return epoch_; }

private:
    struct Entry {
        std::shared_ptr<SearchBackend> backend;
        RateLimit limit;
        std::deque<double> recent;  // rate-limiter window timestamps
        BackendStats stats;
    };

    Entry& entry(const std::string& name);
    void acquire_slot(Entry& e);
    void persist(const nlohmann::json& record);

    std::string cache_dir_;
    std::shared_ptr<Clock> clock_;
    std::string epoch_;
    std::map<std::string, Entry> backends_;
    std::map<std::string, std::vector<SearchResult>> search_cache_;
    std::map<std::string, WebDocument> fetch_cache_;
    mutable std::mutex mu_;
};

/// Offline corpus backend: an inverted index over a document directory.
/// Manifest: {"documents": [{"file", "url", "title", "language"}]}.
/// Scoring per query term: phrase (multi-token or CJK) substring match = 2,
/// single-token hit = 1; only scores > 0 return; ties break by url.
class FixtureBackend : public SearchBackend {
public:
    explicit FixtureBackend(std::string corpus_dir, std::string name = "fixture",
                            int fetch_min_chars = 40);

    std::string name() const override { return name_; }
    std::vector<SearchResult> search(const SearchQuery& q, int k) override;
    WebDocument fetch(const std::string& url) override;

    size_t document_count() const { return docs_.size(); }

private:
    struct Doc {
        std::string url, title, language;
        std::string raw;         // as stored (may be HTML)
        std::string plain;       // stripped, whitespace-normalized
        std::string folded;      // plain, case-folded, for matching
        std::vector<std::string> token_set;  // sorted unique tokens of folded
    };

    std::string name_;
    int fetch_min_chars_;
    std::vector<Doc> docs_;  // sorted by url
};

/// Thin live adapter: HTTP search endpoint returning JSON, engine-specific
/// field mapping in the descriptor. Credentials come from the environment
/// variable named in the descriptor, never from config values.
struct LiveBackendDescriptor {
    std::string name;
    std::string base_url;                       // scheme://host[:port]
    std::string path_template;                  // contains {{query}}, optional {{locale}}
    std::string api_key_env;                    // bearer header when set
    std::string results_pointer = "/results";   // JSON pointer to the hit array
    std::string url_key = "url";
    std::string title_key = "title";
    std::string snippet_key = "snippet";
    int fetch_min_chars = 40;
};

LiveBackendDescriptor sogou_descriptor();
LiveBackendDescriptor google_descriptor();
LiveBackendDescriptor bing_descriptor();

class HttpSearchBackend : public SearchBackend {
public:
    explicit HttpSearchBackend(LiveBackendDescriptor d);

    std::string name() const override { return desc_.name; }
    std::vector<SearchResult> search(const SearchQuery& q, int k) override;
    WebDocument fetch(const std::string& url) override;

private:
    LiveBackendDescriptor desc_;
};

}  // namespace scholarlink
