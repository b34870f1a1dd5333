#include "hallucheck/error.hpp"
#include "hallucheck/netverify.hpp"
#include "hallucheck/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace hallucheck {

using nlohmann::json;

namespace {

std::optional<std::string> string_or_first(const json& v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_array() && !v.empty() && v[0].is_string()) {
        return v[0].get<std::string>();
    }
    return std::nullopt;
}

std::optional<int> year_of(const json& v)
{
    if (v.is_number_integer()) {
        return v.get<int>();
    }
    if (v.is_string()) {
        try {
            return std::stoi(v.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

std::optional<ExternalHit> openalex_work(const json& w)
{
    if (!w.is_object()) {
        return std::nullopt;
    }
    ExternalHit hit;
    for (const char* key : {"title", "display_name"}) {
        if (auto it = w.find(key); it != w.end() && it->is_string()) {
            hit.title = it->get<std::string>();
            break;
        }
    }
    if (hit.title.empty()) {
        return std::nullopt;
    }
    if (auto it = w.find("publication_year"); it != w.end()) {
        hit.year = year_of(*it);
    }
    if (auto it = w.find("doi"); it != w.end() && it->is_string()) {
        hit.url = it->get<std::string>();
    }
    if (auto it = w.find("id"); it != w.end() && it->is_string()) {
        hit.external_id = it->get<std::string>();
        if (!hit.url) {
            hit.url = hit.external_id;
        }
    }
    return hit;
}

std::vector<ExternalHit> parse_openalex(const json& doc)
{
    std::vector<ExternalHit> hits;
    if (auto it = doc.find("results"); it != doc.end()) {
        if (!it->is_array()) {
            throw Error(ErrorCode::ParseError, "openalex: 'results' is not an array");
        }
        for (const json& w : *it) {
            if (auto hit = openalex_work(w)) {
                hits.push_back(std::move(*hit));
            }
        }
        return hits;
    }
    if (auto hit = openalex_work(doc)) {
        hits.push_back(std::move(*hit));
        return hits;
    }
    throw Error(ErrorCode::ParseError, "openalex: response has neither results nor a work");
}

std::vector<ExternalHit> parse_dblp(const json& doc)
{
    std::vector<ExternalHit> hits;
    auto result = doc.find("result");
    if (result == doc.end() || !result->is_object()) {
        throw Error(ErrorCode::ParseError, "dblp: response lacks 'result'");
    }
    auto h = result->find("hits");
    if (h == result->end() || !h->is_object()) {
        throw Error(ErrorCode::ParseError, "dblp: response lacks 'result.hits'");
    }
    auto list = h->find("hit");
    if (list == h->end()) {
        return hits; // zero results
    }
    const json items = list->is_array() ? *list : json::array({*list});
    for (const json& item : items) {
        auto info = item.find("info");
        if (info == item.end() || !info->is_object()) {
            continue;
        }
        ExternalHit hit;
        if (auto t = info->find("title"); t != info->end()) {
            if (auto s = string_or_first(*t)) {
                hit.title = *s;
            }
        }
        if (hit.title.empty()) {
            continue;
        }
        if (auto y = info->find("year"); y != info->end()) {
            hit.year = year_of(*y);
        }
        if (auto ee = info->find("ee"); ee != info->end()) {
            hit.url = string_or_first(*ee);
        }
        if (auto u = info->find("url"); u != info->end() && !hit.url) {
            hit.url = string_or_first(*u);
        }
        if (auto k = info->find("key"); k != info->end() && k->is_string()) {
            hit.external_id = "dblp:" + k->get<std::string>();
        }
        hits.push_back(std::move(hit));
    }
    return hits;
}

bool retryable_status(int status)
{
    return status == 429 || status == 502 || status == 503 || status == 504;
}

} // namespace

ServiceRequest build_request(const ExternalQuery& q)
{
    if (q.payload.empty()) {
        throw Error(ErrorCode::ValidationError, "external query payload is empty");
    }
    if (q.service == Service::OpenAlex) {
        if (q.kind == QueryKind::IdLookup) {
            return {"api.openalex.org", "/works/" + util::url_encode(q.payload)};
        }
        std::string value = q.payload;
        std::replace(value.begin(), value.end(), ',', ' ');
        return {"api.openalex.org", "/works?filter=title.search:" + util::url_encode(value) + "&per-page=10"};
    }
    return {"dblp.org", "/search/publ/api?q=" + util::url_encode(q.payload) + "&format=json&h=10"};
}

std::vector<ExternalHit> parse_response(Service s, std::string_view body)
{
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::ParseError, std::string(to_string(s)) + ": malformed JSON response");
    }
    try {
        return s == Service::OpenAlex ? parse_openalex(doc) : parse_dblp(doc);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string(to_string(s)) + ": " + e.what());
    }
}

ExternalVerifier::ExternalVerifier(CacheStore& cache, RateLimiter& limiter, HttpTransport* transport, Clock& clock,
                                   VerifierOptions options)
    : cache_(cache), limiter_(limiter), transport_(transport), clock_(clock), options_(options)
{
}

ExternalResult ExternalVerifier::search_external(const ExternalQuery& q)
{
    if (auto cached = cache_.get(q)) {
        return *cached;
    }
    if (!options_.online || transport_ == nullptr) {
        throw Error(ErrorCode::OfflineMiss,
                    std::string(to_string(q.service)) + ": network disabled and no cached answer for '" + q.payload + "'");
    }
    ServiceRequest req = build_request(q);
    HttpResponse response;
    std::string last_error;
    int attempts = std::max(1, options_.max_attempts);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            clock_.sleep_for(options_.backoff * (1 << (attempt - 1)));
        }
        response = {};
        try {
            auto slot = limiter_.acquire(q.service);
            ++requests_;
            response = transport_->get(req.host, req.target);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NetworkError) {
                throw;
            }
            last_error = e.what();
            continue;
        }
        if (retryable_status(response.status) && attempt + 1 < attempts) {
            continue;
        }
        break;
    }
    if (!last_error.empty() && response.status == 0) {
        throw Error(ErrorCode::NetworkError, std::string(to_string(q.service)) + ": " + last_error + " (after "
                        + std::to_string(attempts) + " attempts)");
    }
    if (response.status < 200 || response.status >= 300) {
        throw Error(ErrorCode::ServiceError, std::string(to_string(q.service)) + ": HTTP "
                        + std::to_string(response.status) + ": " + response.body.substr(0, 200));
    }
    ExternalResult result;
    result.query = q;
    result.hits = parse_response(q.service, response.body);
    result.fetched_at = util::iso_timestamp_now();
    cache_.put(result);
    return result;
}

} // namespace hallucheck
