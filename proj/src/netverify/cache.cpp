#include "hallucheck/error.hpp"
#include "hallucheck/netverify.hpp"
#include "hallucheck/util.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

namespace hallucheck {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<Service> service_from(std::string_view s)
{
    if (s == "openalex") {
        return Service::OpenAlex;
    }
    if (s == "dblp") {
        return Service::Dblp;
    }
    return std::nullopt;
}

} // namespace

std::string_view to_string(Service s) noexcept
{
    return s == Service::OpenAlex ? "openalex" : "dblp";
}

std::string_view to_string(QueryKind k) noexcept
{
    return k == QueryKind::TitleSearch ? "title_search" : "id_lookup";
}

std::string cache_key(const ExternalQuery& q)
{
    std::string material;
    material += to_string(q.service);
    material.push_back('\0');
    material += to_string(q.kind);
    material.push_back('\0');
    material += q.payload;
    return util::sha256_hex(material);
}

std::string serialize_result(const ExternalResult& r)
{
    json hits = json::array();
    for (const ExternalHit& h : r.hits) {
        json j {{"title", h.title}, {"external_id", h.external_id}};
        j["year"] = h.year ? json(*h.year) : json(nullptr);
        j["url"] = h.url ? json(*h.url) : json(nullptr);
        hits.push_back(std::move(j));
    }
    json doc {
        {"schema_version", ExternalResult::kSchemaVersion},
        {"query", {{"service", to_string(r.query.service)}, {"kind", to_string(r.query.kind)}, {"payload", r.query.payload}}},
        {"hits", hits},
        {"fetched_at", r.fetched_at},
    };
    return doc.dump(2) + "\n";
}

ExternalResult deserialize_result(std::string_view text)
{
    try {
        json doc = json::parse(text);
        if (doc.at("schema_version").get<int>() != ExternalResult::kSchemaVersion) {
            throw Error(ErrorCode::ParseError, "cache entry has an unsupported schema version");
        }
        ExternalResult r;
        const json& q = doc.at("query");
        auto service = service_from(q.at("service").get<std::string>());
        if (!service) {
            throw Error(ErrorCode::ParseError, "cache entry names an unknown service");
        }
        r.query.service = *service;
        r.query.kind = q.at("kind").get<std::string>() == "id_lookup" ? QueryKind::IdLookup : QueryKind::TitleSearch;
        r.query.payload = q.at("payload").get<std::string>();
        for (const json& h : doc.at("hits")) {
            ExternalHit hit;
            hit.title = h.at("title").get<std::string>();
            hit.external_id = h.at("external_id").get<std::string>();
            if (!h.at("year").is_null()) {
                hit.year = h.at("year").get<int>();
            }
            if (!h.at("url").is_null()) {
                hit.url = h.at("url").get<std::string>();
            }
            r.hits.push_back(std::move(hit));
        }
        r.fetched_at = doc.at("fetched_at").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("damaged cache entry: ") + e.what());
    }
}

CacheStore::CacheStore(std::string dir) : dir_(std::move(dir))
{
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create cache directory " + dir_ + ": " + ec.message());
    }
}

std::optional<ExternalResult> CacheStore::get(const ExternalQuery& q) const
{
    fs::path path = fs::path(dir_) / cache_key(q);
    std::error_code ec;
    if (!fs::exists(path, ec)) {
        return std::nullopt;
    }
    ExternalResult r = deserialize_result(util::read_file(path.string()));
    if (!(r.query == q)) {
        throw Error(ErrorCode::ParseError, "cache entry " + path.string() + " belongs to another query");
    }
    r.from_cache = true;
    return r;
}

bool CacheStore::put(const ExternalResult& r)
{
    std::lock_guard lock(write_mutex_);
    fs::path path = fs::path(dir_) / cache_key(r.query);
    std::error_code ec;
    if (fs::exists(path, ec)) {
        return false;
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        ExternalResult stored = r;
        stored.from_cache = false;
        out << serialize_result(stored);
        if (!out.flush()) {
            throw Error(ErrorCode::IoError, "cannot write cache entry " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot publish cache entry " + path.string() + ": " + ec.message());
    }
    return true;
}

} // namespace hallucheck
