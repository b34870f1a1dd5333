#pragma once

#include "hallucheck/matcher.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace hallucheck {

enum class Service { OpenAlex, Dblp };
enum class QueryKind { TitleSearch, IdLookup };

[[nodiscard]] std::string_view to_string(Service s) noexcept;
[[nodiscard]] std::string_view to_string(QueryKind k) noexcept;

struct ExternalQuery {
    Service service = Service::OpenAlex;
    QueryKind kind = QueryKind::TitleSearch;
    std::string payload;

    friend bool operator==(const ExternalQuery&, const ExternalQuery&) = default;
};

struct ExternalHit {
    std::string title;
    std::optional<int> year;
    std::optional<std::string> url;
    std::string external_id;

    friend bool operator==(const ExternalHit&, const ExternalHit&) = default;
};

struct ExternalResult {
    static constexpr int kSchemaVersion = 1;

    ExternalQuery query;
    std::vector<ExternalHit> hits;
    std::string fetched_at;
    bool from_cache = false;
};

[[nodiscard]] std::string cache_key(const ExternalQuery& q);
[[nodiscard]] std::string serialize_result(const ExternalResult& r);
/// Throws Error(ParseError) on a damaged entry.
[[nodiscard]] ExternalResult deserialize_result(std::string_view text);

/// Directory of immutable entries, one file per query digest.
class CacheStore {
public:
    explicit CacheStore(std::string dir);

    [[nodiscard]] std::optional<ExternalResult> get(const ExternalQuery& q) const;
    /// Writes the entry unless one already exists. Returns false if it existed.
    bool put(const ExternalResult& r);
    [[nodiscard]] const std::string& dir() const noexcept { return dir_; }

private:
    std::string dir_;
    std::mutex write_mutex_;
};

class Clock {
public:
    virtual ~Clock() = default;
    [[nodiscard]] virtual std::chrono::milliseconds now() const = 0;
    virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

class SystemClock final : public Clock {
public:
    [[nodiscard]] std::chrono::milliseconds now() const override;
    void sleep_for(std::chrono::milliseconds d) override;
};

/// One request in flight per service, successive starts at least `interval` apart.
class RateLimiter {
public:
    class Slot {
    public:
        Slot(Slot&&) noexcept = default;
        Slot& operator=(Slot&&) noexcept = default;
        ~Slot() = default;

    private:
        friend class RateLimiter;
        explicit Slot(std::unique_lock<std::mutex> lock) : lock_(std::move(lock)) {}
        std::unique_lock<std::mutex> lock_;
    };

    RateLimiter(Clock& clock, std::chrono::milliseconds interval);

    [[nodiscard]] Slot acquire(Service s);
    [[nodiscard]] std::chrono::milliseconds interval() const noexcept { return interval_; }

private:
    struct Lane {
        std::mutex in_flight;
        std::optional<std::chrono::milliseconds> last_start;
    };

    Clock& clock_;
    std::chrono::milliseconds interval_;
    std::map<Service, Lane> lanes_;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    /// Throws Error(NetworkError) when no response arrives.
    [[nodiscard]] virtual HttpResponse get(const std::string& host, const std::string& target) = 0;
};

/// HTTPS client with connection and read timeouts.
[[nodiscard]] std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(20));

struct ServiceRequest {
    std::string host;
    std::string target;
};

[[nodiscard]] ServiceRequest build_request(const ExternalQuery& q);
/// Maps a service response body onto hits. Throws Error(ParseError) naming the service.
[[nodiscard]] std::vector<ExternalHit> parse_response(Service s, std::string_view body);

struct VerifierOptions {
    bool online = false;
    int max_attempts = 3;
    std::chrono::milliseconds backoff {500};
};

class ExternalVerifier {
public:
    ExternalVerifier(CacheStore& cache, RateLimiter& limiter, HttpTransport* transport, Clock& clock,
                     VerifierOptions options = {});

    /// Errors: NetworkError, ServiceError, ParseError, OfflineMiss.
    [[nodiscard]] ExternalResult search_external(const ExternalQuery& q);

    [[nodiscard]] std::uint64_t network_requests() const noexcept { return requests_; }

private:
    CacheStore& cache_;
    RateLimiter& limiter_;
    HttpTransport* transport_;
    Clock& clock_;
    VerifierOptions options_;
    std::atomic<std::uint64_t> requests_ {0};
};

struct ScoredHit {
    Service service = Service::OpenAlex;
    ExternalHit hit;
    double score = 0.0;
};

inline constexpr std::string_view kExternallyResolvable = "externally resolvable";
inline constexpr std::string_view kNoExternalMatch = "no external match";
inline constexpr std::string_view kUncheckedOffline = "unchecked (offline)";

struct Enrichment {
    CandidateFlag flag;
    std::vector<ScoredHit> external;
    std::string annotation;
};

/// Looks the candidate's title up on every service; never alters or drops the flag.
[[nodiscard]] Enrichment confirm_candidate(const CandidateFlag& flag, ExternalVerifier& verifier,
                                           double threshold = 0.9);

} // namespace hallucheck
