#include "hallucheck/bibindex.hpp"
#include "hallucheck/error.hpp"
#include "hallucheck/util.hpp"
#include "xml_stream.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>

namespace hallucheck {

namespace fs = std::filesystem;

namespace {

std::string anthology_id(const std::string& collection, const std::string& volume, const std::string& paper)
{
    if (collection.find('.') != std::string::npos) {
        return collection + "-" + volume + "." + paper;
    }
    int vol = std::stoi(volume);
    int num = std::stoi(paper);
    char buf[32];
    bool two_digit = collection.starts_with('W') || collection == "C69"
        || (collection == "D19" && vol >= 5);
    if (two_digit) {
        std::snprintf(buf, sizeof buf, "%02d%02d", vol, num);
    } else {
        std::snprintf(buf, sizeof buf, "%d%03d", vol, num);
    }
    return collection + "-" + buf;
}

struct AclState {
    const RecordSink* sink = nullptr;
    IngestStats* stats = nullptr;

    std::string collection;
    std::string volume;
    std::string volume_title;
    std::optional<int> volume_year;

    bool in_paper = false;
    bool in_meta = false;
    std::string paper_id;
    std::string title;
    std::string first, last;
    std::vector<std::string> authors;
    std::optional<int> year;

    std::vector<std::string> path; // open elements below <paper> or <meta>
    std::string text;

    void start(std::string_view name, const detail::XmlAttributes& attrs)
    {
        if (name == "collection") {
            collection = std::string(detail::attribute(attrs, "id"));
        } else if (name == "volume") {
            volume = std::string(detail::attribute(attrs, "id"));
            volume_title.clear();
            volume_year.reset();
        } else if (name == "meta" && !in_paper) {
            in_meta = true;
            path.clear();
            return;
        } else if (name == "paper") {
            in_paper = true;
            paper_id = std::string(detail::attribute(attrs, "id"));
            title.clear();
            authors.clear();
            year.reset();
            path.clear();
            return;
        }
        if (in_paper || in_meta) {
            if (path.empty() || path.back() == "author") {
                text.clear();
            }
            path.emplace_back(name);
        }
    }

    void end(std::string_view name)
    {
        if (name == "paper" && in_paper) {
            in_paper = false;
            finish_paper();
            return;
        }
        if (name == "meta" && in_meta && path.empty()) {
            in_meta = false;
            path.clear();
            return;
        }
        if (!(in_paper || in_meta) || path.empty()) {
            return;
        }
        path.pop_back();
        std::string value = util::collapse_whitespace(text);
        if (path.empty()) {
            if (in_paper && name == "title") {
                title = value;
            } else if (in_paper && name == "year") {
                year = parse_year(value);
            } else if (in_meta && name == "booktitle") {
                volume_title = value;
            } else if (in_meta && name == "year") {
                volume_year = parse_year(value);
            } else if (in_paper && name == "author") {
                std::string full = util::collapse_whitespace(first + " " + last);
                if (!full.empty()) {
                    authors.push_back(full);
                }
                first.clear();
                last.clear();
            }
            text.clear();
        } else if (path.back() == "author" && path.size() == 1) {
            if (name == "first") {
                first = value;
            } else if (name == "last") {
                last = value;
            }
            text.clear();
        }
    }

    void on_text(std::string_view t)
    {
        if ((in_paper || in_meta) && !path.empty()) {
            text.append(t);
        }
    }

    static std::optional<int> parse_year(const std::string& v)
    {
        try {
            return std::stoi(v);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    void finish_paper()
    {
        BibRecord rec = make_record("acl:" + anthology_id(collection, volume, paper_id), title);
        if (rec.norm_title.empty()) {
            ++stats->skipped;
            return;
        }
        rec.authors = std::move(authors);
        rec.year = year ? year : volume_year;
        if (!volume_title.empty()) {
            rec.venue = volume_title;
        }
        rec.url = "https://aclanthology.org/" + rec.id.substr(4);
        if (rec.year && (!stats->newest_year || *rec.year > *stats->newest_year)) {
            stats->newest_year = rec.year;
        }
        ++stats->records;
        (*sink)(std::move(rec));
    }
};

} // namespace

IngestStats ingest_acl_anthology(const std::string& dir, const RecordSink& sink)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw Error(ErrorCode::IoError, "not a directory: " + dir);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") {
            files.push_back(entry.path());
        }
    }
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot list " + dir + ": " + ec.message());
    }
    std::sort(files.begin(), files.end());

    IngestStats stats;
    for (const fs::path& file : files) {
        AclState state;
        state.sink = &sink;
        state.stats = &stats;
        detail::XmlHandlers handlers;
        handlers.start = [&](std::string_view n, const detail::XmlAttributes& a) { state.start(n, a); };
        handlers.end = [&](std::string_view n) { state.end(n); };
        handlers.text = [&](std::string_view t) { state.on_text(t); };
        try {
            detail::parse_xml_file(file.string(), handlers);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::IoError) {
                throw;
            }
            throw Error(ErrorCode::FormatError, e.what());
        } catch (const std::invalid_argument&) {
            throw Error(ErrorCode::FormatError, file.string() + ": non-numeric volume or paper id");
        } catch (const std::out_of_range&) {
            throw Error(ErrorCode::FormatError, file.string() + ": volume or paper id out of range");
        }
    }
    if (stats.skipped > 0) {
        spdlog::warn("ACL Anthology: skipped {} entries without a title", stats.skipped);
    }
    return stats;
}

} // namespace hallucheck
