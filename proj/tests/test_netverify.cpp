#include "hallucheck/error.hpp"
#include "hallucheck/netverify.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include <unistd.h>

using namespace hallucheck;
namespace fs = std::filesystem;

namespace {

class FakeClock final : public Clock {
public:
    std::chrono::milliseconds now() const override
    {
        std::lock_guard l(m_);
        return t_;
    }
    void sleep_for(std::chrono::milliseconds d) override
    {
        std::lock_guard l(m_);
        t_ += d;
        slept_.push_back(d);
    }
    std::vector<std::chrono::milliseconds> slept() const
    {
        std::lock_guard l(m_);
        return slept_;
    }

private:
    mutable std::mutex m_;
    std::chrono::milliseconds t_ {1000};
    std::vector<std::chrono::milliseconds> slept_;
};

struct Call {
    std::string host;
    std::string target;
    std::chrono::milliseconds at;
};

class FakeTransport final : public HttpTransport {
public:
    explicit FakeTransport(Clock& clock) : clock_(clock) {}

    HttpResponse get(const std::string& host, const std::string& target) override
    {
        calls.push_back({host, target, clock_.now()});
        if (script.empty()) {
            return {200, host == "dblp.org" ? R"({"result":{"hits":{"@total":"0"}}})" : R"({"results":[]})"};
        }
        auto next = script.front();
        script.erase(script.begin());
        if (next.status < 0) {
            throw Error(ErrorCode::NetworkError, "connection refused");
        }
        return next;
    }

    std::vector<HttpResponse> script;
    std::vector<Call> calls;

private:
    Clock& clock_;
};

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("hallucheck-net-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

const char* kOpenAlexBody = R"({"results":[
 {"id":"https://openalex.org/W1","title":"Attention Is All You Need","publication_year":2017,"doi":"https://doi.org/10.5555/1"},
 {"id":"https://openalex.org/W2","display_name":"Something Else","publication_year":null},
 {"id":"https://openalex.org/W3"}
]})";

const char* kDblpBody = R"({"result":{"hits":{"@total":"1","hit":
 {"info":{"title":"Attention is All you Need.","year":"2017","ee":["https://papers.nips.cc/x","https://other"],"key":"conf/nips/VaswaniSPUJGKP17"}}}}})";

} // namespace

TEST_CASE("service responses map onto hits")
{
    auto oa = parse_response(Service::OpenAlex, kOpenAlexBody);
    REQUIRE(oa.size() == 2);
    CHECK(oa[0].title == "Attention Is All You Need");
    CHECK(oa[0].year == 2017);
    CHECK(oa[0].url == "https://doi.org/10.5555/1");
    CHECK(oa[1].title == "Something Else");
    CHECK_FALSE(oa[1].year.has_value());

    auto single = parse_response(Service::OpenAlex, R"({"id":"https://openalex.org/W9","title":"One"})");
    REQUIRE(single.size() == 1);
    CHECK(single[0].external_id == "https://openalex.org/W9");

    auto db = parse_response(Service::Dblp, kDblpBody);
    REQUIRE(db.size() == 1);
    CHECK(db[0].year == 2017);
    CHECK(db[0].url == "https://papers.nips.cc/x");
    CHECK(db[0].external_id == "dblp:conf/nips/VaswaniSPUJGKP17");
    CHECK(parse_response(Service::Dblp, R"({"result":{"hits":{"@total":"0"}}})").empty());

    for (auto [s, body] : std::vector<std::pair<Service, std::string>> {
             {Service::OpenAlex, "<html>"}, {Service::OpenAlex, "{\"results\":3}"},
             {Service::OpenAlex, "{\"meta\":{}}"}, {Service::Dblp, "{}"}, {Service::Dblp, "[1]"}}) {
        try {
            (void)parse_response(s, body);
            FAIL("expected ParseError for " << body);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
        }
    }
}

TEST_CASE("requests are URL-encoded per service")
{
    auto oa = build_request({Service::OpenAlex, QueryKind::TitleSearch, "bert: pre-training, deep & more"});
    CHECK(oa.host == "api.openalex.org");
    CHECK(oa.target == "/works?filter=title.search:bert%3A%20pre-training%20%20deep%20%26%20more&per-page=10");
    auto db = build_request({Service::Dblp, QueryKind::TitleSearch, "a b"});
    CHECK(db.host == "dblp.org");
    CHECK(db.target == "/search/publ/api?q=a%20b&format=json&h=10");
    CHECK(build_request({Service::OpenAlex, QueryKind::IdLookup, "W123"}).target == "/works/W123");
    CHECK_THROWS_AS((void)build_request({Service::Dblp, QueryKind::TitleSearch, ""}), Error);
}

TEST_CASE("cache entries round-trip and are write-once")
{
    fs::path dir = scratch("cache");
    CacheStore cache(dir.string());
    ExternalQuery q {Service::Dblp, QueryKind::TitleSearch, "attention"};
    CHECK_FALSE(cache.get(q));
    ExternalResult r {q, {{"Attention", 2017, "https://x", "dblp:k"}}, "2026-01-01T00:00:00.000Z", false};
    CHECK(cache.put(r));
    ExternalResult other = r;
    other.hits.clear();
    CHECK_FALSE(cache.put(other));
    auto got = cache.get(q);
    REQUIRE(got);
    CHECK(got->hits == r.hits);
    CHECK(got->from_cache);
    CHECK(cache_key(q) != cache_key({Service::OpenAlex, QueryKind::TitleSearch, "attention"}));
    CHECK(cache_key(q) == cache_key(ExternalQuery {q}));
    CHECK(deserialize_result(serialize_result(r)).hits == r.hits);
    CHECK_THROWS_AS((void)deserialize_result("{\"schema_version\":99}"), Error);
    CHECK_THROWS_AS((void)deserialize_result("nope"), Error);
    fs::remove_all(dir);
}

TEST_CASE("offline lookups use the cache or fail with OfflineMiss")
{
    fs::path dir = scratch("offline");
    CacheStore cache(dir.string());
    FakeClock clock;
    RateLimiter limiter(clock, std::chrono::milliseconds(1000));
    ExternalVerifier v(cache, limiter, nullptr, clock);
    ExternalQuery q {Service::OpenAlex, QueryKind::TitleSearch, "x"};
    try {
        (void)v.search_external(q);
        FAIL("expected OfflineMiss");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OfflineMiss);
    }
    CHECK(cache.put({q, {{"X", std::nullopt, std::nullopt, "W"}}, "t", false}));
    CHECK(v.search_external(q).hits.size() == 1);
    CHECK(v.network_requests() == 0);
    fs::remove_all(dir);
}

TEST_CASE("online lookups pace requests, retry transient failures and cache answers")
{
    fs::path dir = scratch("online");
    CacheStore cache(dir.string());
    FakeClock clock;
    RateLimiter limiter(clock, std::chrono::milliseconds(1000));
    FakeTransport transport(clock);
    VerifierOptions opts;
    opts.online = true;
    ExternalVerifier v(cache, limiter, &transport, clock, opts);

    transport.script = {{-1, ""}, {503, "busy"}, {200, kOpenAlexBody}};
    ExternalQuery q {Service::OpenAlex, QueryKind::TitleSearch, "attention is all you need"};
    auto r = v.search_external(q);
    CHECK(r.hits.size() == 2);
    CHECK_FALSE(r.from_cache);
    REQUIRE(transport.calls.size() == 3);
    for (std::size_t i = 1; i < transport.calls.size(); ++i) {
        CHECK((transport.calls[i].at - transport.calls[i - 1].at).count() >= 1000);
    }
    auto again = v.search_external(q);
    CHECK(again.from_cache);
    CHECK(transport.calls.size() == 3);
    CHECK(v.network_requests() == 3);

    transport.script = {{404, "<html>not found</html>"}};
    try {
        (void)v.search_external({Service::Dblp, QueryKind::TitleSearch, "missing"});
        FAIL("expected ServiceError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ServiceError);
        CHECK(std::string(e.what()).find("404") != std::string::npos);
    }

    transport.script = {{-1, ""}, {-1, ""}, {-1, ""}};
    try {
        (void)v.search_external({Service::Dblp, QueryKind::TitleSearch, "down"});
        FAIL("expected NetworkError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NetworkError);
    }

    transport.script = {{200, "garbage"}};
    try {
        (void)v.search_external({Service::Dblp, QueryKind::TitleSearch, "garbled"});
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
    }
    // Failed lookups are not cached.
    CHECK_FALSE(cache.get({Service::Dblp, QueryKind::TitleSearch, "garbled"}));
    fs::remove_all(dir);
}

TEST_CASE("rate limiter spacing holds under concurrent callers")
{
    SystemClock clock;
    RateLimiter limiter(clock, std::chrono::milliseconds(20));
    std::mutex m;
    std::vector<std::chrono::milliseconds> starts;
    std::vector<std::thread> threads;
    for (int i = 0; i < 6; ++i) {
        threads.emplace_back([&] {
            auto slot = limiter.acquire(Service::Dblp);
            std::lock_guard l(m);
            starts.push_back(clock.now());
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    std::sort(starts.begin(), starts.end());
    for (std::size_t i = 1; i < starts.size(); ++i) {
        CHECK((starts[i] - starts[i - 1]).count() >= 20);
    }
}

TEST_CASE("confirmation annotates but never drops a flag")
{
    fs::path dir = scratch("confirm");
    CacheStore cache(dir.string());
    FakeClock clock;
    RateLimiter limiter(clock, std::chrono::milliseconds(0));
    FakeTransport transport(clock);
    VerifierOptions opts;
    opts.online = true;
    ExternalVerifier v(cache, limiter, &transport, clock, opts);

    CandidateFlag flag;
    flag.kind = FlagKind::TitleNotFound;
    flag.citation.title = "Attention is all you need";
    transport.script = {{200, kOpenAlexBody}, {200, kDblpBody}};
    Enrichment e = confirm_candidate(flag, v);
    CHECK(e.annotation == kExternallyResolvable);
    CHECK(e.flag.kind == FlagKind::TitleNotFound);
    REQUIRE(e.external.size() == 3);
    CHECK(e.external[0].score == doctest::Approx(1.0));

    flag.citation.title = "A title no service knows";
    CHECK(confirm_candidate(flag, v).annotation == kNoExternalMatch);

    ExternalVerifier offline(cache, limiter, nullptr, clock);
    flag.citation.title = "Never asked before";
    CHECK(confirm_candidate(flag, offline).annotation == kUncheckedOffline);

    flag.kind = FlagKind::IdentifierTitleMismatch;
    std::size_t calls = transport.calls.size();
    (void)confirm_candidate(flag, v);
    CHECK(transport.calls.size() == calls);
    fs::remove_all(dir);
}
