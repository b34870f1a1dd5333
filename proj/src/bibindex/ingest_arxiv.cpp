#include "hallucheck/bibindex.hpp"
#include "hallucheck/error.hpp"
#include "hallucheck/util.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cctype>
#include <fstream>

namespace hallucheck {

namespace {

std::optional<int> year_from_id(std::string_view id)
{
    std::string_view digits = id;
    if (auto slash = id.find('/'); slash != std::string_view::npos) {
        digits = id.substr(slash + 1);
    }
    if (digits.size() < 4 || !std::isdigit(static_cast<unsigned char>(digits[0]))
        || !std::isdigit(static_cast<unsigned char>(digits[1]))) {
        return std::nullopt;
    }
    int yy = (digits[0] - '0') * 10 + (digits[1] - '0');
    return yy >= 91 ? 1900 + yy : 2000 + yy;
}

std::vector<std::string> authors_of(const nlohmann::json& obj)
{
    std::vector<std::string> out;
    if (auto it = obj.find("authors_parsed"); it != obj.end() && it->is_array()) {
        for (const auto& a : *it) {
            if (!a.is_array() || a.empty() || !a[0].is_string()) {
                continue;
            }
            std::string name;
            if (a.size() > 1 && a[1].is_string()) {
                name = a[1].get<std::string>() + " ";
            }
            name += a[0].get<std::string>();
            name = util::collapse_whitespace(name);
            if (!name.empty()) {
                out.push_back(std::move(name));
            }
        }
        return out;
    }
    if (auto it = obj.find("authors"); it != obj.end() && it->is_string()) {
        std::string all = util::collapse_whitespace(it->get<std::string>());
        std::size_t start = 0;
        while (start < all.size()) {
            std::size_t comma = all.find(", ", start);
            std::size_t conj = all.find(" and ", start);
            std::size_t cut = std::min(comma, conj);
            std::string piece = util::collapse_whitespace(std::string_view(all).substr(start, cut - start));
            if (!piece.empty()) {
                out.push_back(std::move(piece));
            }
            if (cut == std::string::npos) {
                break;
            }
            start = cut + (cut == comma ? 2 : 5);
        }
    }
    return out;
}

} // namespace

IngestStats ingest_arxiv_snapshot(const std::string& path, const RecordSink& sink)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    IngestStats stats;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) {
            continue;
        }
        auto obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            spdlog::debug("{}:{}: not a JSON object", path, line_no);
            ++stats.skipped;
            continue;
        }
        auto id = obj.find("id");
        auto title = obj.find("title");
        if (id == obj.end() || !id->is_string() || title == obj.end() || !title->is_string()) {
            ++stats.skipped;
            continue;
        }
        std::string ident = std::string(util::trim(id->get<std::string>()));
        BibRecord rec = make_record("arxiv:" + ident, util::collapse_whitespace(title->get<std::string>()));
        if (ident.empty() || rec.norm_title.empty()) {
            ++stats.skipped;
            continue;
        }
        rec.authors = authors_of(obj);
        rec.year = year_from_id(ident);
        if (auto jr = obj.find("journal-ref"); jr != obj.end() && jr->is_string()) {
            rec.venue = util::collapse_whitespace(jr->get<std::string>());
        }
        rec.url = "https://arxiv.org/abs/" + ident;
        if (rec.year && (!stats.newest_year || *rec.year > *stats.newest_year)) {
            stats.newest_year = rec.year;
        }
        ++stats.records;
        sink(std::move(rec));
    }
    if (in.bad()) {
        throw Error(ErrorCode::IoError, "read failed: " + path);
    }
    if (stats.skipped > 0) {
        spdlog::warn("arXiv snapshot: skipped {} malformed or untitled lines", stats.skipped);
    }
    return stats;
}

} // namespace hallucheck
