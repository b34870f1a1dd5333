#include "hallucheck/bibindex.hpp"
#include "hallucheck/util.hpp"
#include "xml_stream.hpp"

#include <spdlog/spdlog.h>

#include <array>

namespace hallucheck {

namespace {

constexpr std::array<std::string_view, 7> kPublicationElements {
    "article", "inproceedings", "proceedings", "book", "incollection", "phdthesis", "mastersthesis",
};

bool is_publication(std::string_view name)
{
    for (std::string_view p : kPublicationElements) {
        if (p == name) {
            return true;
        }
    }
    return false;
}

struct DblpState {
    const RecordSink* sink = nullptr;
    IngestStats stats;

    int depth = 0;
    bool in_pub = false;
    int field_depth = 0; // depth of the open direct child of the publication
    std::string field;
    std::string text;

    std::string key;
    std::string title;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::optional<std::string> venue;
    std::optional<std::string> url;

    void start(std::string_view name, const detail::XmlAttributes& attrs)
    {
        ++depth;
        if (depth == 2 && is_publication(name)) {
            in_pub = true;
            key = std::string(detail::attribute(attrs, "key"));
            title.clear();
            authors.clear();
            year.reset();
            venue.reset();
            url.reset();
        } else if (in_pub && depth == 3) {
            field = std::string(name);
            text.clear();
        }
    }

    void end(std::string_view name)
    {
        if (in_pub && depth == 3) {
            std::string value = util::collapse_whitespace(text);
            if (field == "title") {
                title = value;
            } else if (field == "author" || field == "editor") {
                if (!value.empty()) {
                    authors.push_back(value);
                }
            } else if (field == "year") {
                try {
                    year = std::stoi(value);
                } catch (const std::exception&) {
                }
            } else if ((field == "journal" || field == "booktitle") && !venue && !value.empty()) {
                venue = value;
            } else if (field == "ee" && !url && !value.empty()) {
                url = value;
            }
            field.clear();
        } else if (in_pub && depth == 2) {
            (void)name;
            in_pub = false;
            finish();
        }
        --depth;
    }

    void on_text(std::string_view t)
    {
        if (in_pub && depth >= 3) {
            text.append(t);
        }
    }

    void finish()
    {
        BibRecord rec = make_record("dblp:" + key, title);
        if (key.empty() || rec.norm_title.empty()) {
            ++stats.skipped;
            return;
        }
        rec.authors = std::move(authors);
        rec.year = year;
        rec.venue = venue;
        rec.url = url;
        if (year && (!stats.newest_year || *year > *stats.newest_year)) {
            stats.newest_year = year;
        }
        ++stats.records;
        (*sink)(std::move(rec));
    }
};

} // namespace

IngestStats ingest_dblp(const std::string& path, const RecordSink& sink)
{
    DblpState state;
    state.sink = &sink;
    detail::XmlHandlers handlers;
    handlers.start = [&](std::string_view n, const detail::XmlAttributes& a) { state.start(n, a); };
    handlers.end = [&](std::string_view n) { state.end(n); };
    handlers.text = [&](std::string_view t) { state.on_text(t); };
    detail::parse_xml_file(path, handlers);
    if (state.stats.skipped > 0) {
        spdlog::warn("DBLP: skipped {} publications without a key or title", state.stats.skipped);
    }
    return state.stats;
}

} // namespace hallucheck
