#include "hallucheck/error.hpp"
#include "hallucheck/report.hpp"
#include "hallucheck/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace hallucheck {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    return it->get<T>();
}

json scored(const ScoredRecord& s)
{
    return {{"id", s.id}, {"score", s.score}};
}

ScoredRecord scored_from(const json& j)
{
    return {j.at("id").get<std::string>(), j.at("score").get<double>()};
}

IdentifierEvidence::Status status_from(const std::string& s)
{
    for (auto st : {IdentifierEvidence::Status::Matches, IdentifierEvidence::Status::Mismatch,
                    IdentifierEvidence::Status::NotFound, IdentifierEvidence::Status::Malformed}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    throw Error(ErrorCode::FormatError, "unknown identifier status '" + s + "'");
}

Service service_from(const std::string& s)
{
    if (s == "openalex") {
        return Service::OpenAlex;
    }
    if (s == "dblp") {
        return Service::Dblp;
    }
    throw Error(ErrorCode::FormatError, "unknown service '" + s + "'");
}

} // namespace

const ReportedFlag* PaperEntry::flag_at(std::size_t ordinal) const
{
    for (const ReportedFlag& f : flags) {
        if (f.ordinal() == ordinal) {
            return &f;
        }
    }
    return nullptr;
}

const PaperEntry* ScanReport::paper(std::string_view source_id) const
{
    auto it = std::lower_bound(papers.begin(), papers.end(), source_id,
                               [](const PaperEntry& p, std::string_view id) { return p.source_id < id; });
    return it != papers.end() && it->source_id == source_id ? &*it : nullptr;
}

json flag_to_json(const ReportedFlag& rf)
{
    const CandidateFlag& f = rf.flag;
    const ParsedReference& c = f.citation;
    json ids {
        {"arxiv", c.identifiers.arxiv_id ? json(c.identifiers.arxiv_id->render()) : json(nullptr)},
        {"doi", opt(c.identifiers.doi)},
        {"url", opt(c.identifiers.url)},
        {"acl", opt(c.identifiers.acl_id)},
        {"malformed_arxiv", opt(c.identifiers.malformed_arxiv)},
    };
    json j {
        {"ordinal", c.raw_ref.ordinal},
        {"raw", c.raw_ref.raw},
        {"span", {c.raw_ref.span_begin, c.raw_ref.span_end}},
        {"kind", to_string(f.kind)},
        {"title", opt(c.title)},
        {"authors", c.authors},
        {"year", opt(c.year)},
        {"venue", opt(c.venue)},
        {"pages", opt(c.pages)},
        {"identifiers", ids},
        {"db_coverage_note", opt(f.db_coverage_note)},
    };
    if (f.match) {
        json runners = json::array();
        for (const ScoredRecord& s : f.match->runners_up) {
            runners.push_back(scored(s));
        }
        j["match"] = {
            {"query_title", f.match->query_title.text},
            {"best", f.match->best ? scored(*f.match->best) : json(nullptr)},
            {"runners_up", runners},
            {"decision", f.match->decision == Decision::Matched ? "Matched" : "Candidate"},
            {"threshold_used", f.match->threshold_used},
        };
    } else {
        j["match"] = nullptr;
    }
    json evidence = json::array();
    for (const IdentifierEvidence& e : f.identifiers) {
        evidence.push_back({
            {"scheme", e.scheme},
            {"cited_id", e.cited_id},
            {"status", to_string(e.status)},
            {"record_id", opt(e.record_id)},
            {"record_title", opt(e.record_title)},
            {"cited_title", opt(e.cited_title)},
            {"score", opt(e.score)},
        });
    }
    j["identifier_evidence"] = evidence;
    if (rf.external) {
        json hits = json::array();
        for (const ScoredHit& h : rf.external->hits) {
            hits.push_back({{"service", to_string(h.service)}, {"title", h.hit.title}, {"year", opt(h.hit.year)},
                            {"url", opt(h.hit.url)}, {"external_id", h.hit.external_id}, {"score", h.score}});
        }
        j["external"] = {{"annotation", rf.external->annotation}, {"hits", hits}};
    } else {
        j["external"] = nullptr;
    }
    return j;
}

ReportedFlag flag_from_json(const json& j)
{
    ReportedFlag rf;
    CandidateFlag& f = rf.flag;
    ParsedReference& c = f.citation;
    c.raw_ref.ordinal = j.at("ordinal").get<std::size_t>();
    c.raw_ref.raw = j.at("raw").get<std::string>();
    c.raw_ref.span_begin = j.at("span").at(0).get<std::size_t>();
    c.raw_ref.span_end = j.at("span").at(1).get<std::size_t>();
    auto kind = flag_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) {
        throw Error(ErrorCode::FormatError, "unknown flag kind " + j.at("kind").dump());
    }
    f.kind = *kind;
    c.title = get_opt<std::string>(j, "title");
    c.authors = j.at("authors").get<std::vector<std::string>>();
    c.year = get_opt<int>(j, "year");
    c.venue = get_opt<std::string>(j, "venue");
    c.pages = get_opt<std::string>(j, "pages");
    const json& ids = j.at("identifiers");
    if (auto a = get_opt<std::string>(ids, "arxiv")) {
        c.identifiers.arxiv_id = parse_bare_arxiv_id(*a);
    }
    c.identifiers.doi = get_opt<std::string>(ids, "doi");
    c.identifiers.url = get_opt<std::string>(ids, "url");
    c.identifiers.acl_id = get_opt<std::string>(ids, "acl");
    c.identifiers.malformed_arxiv = get_opt<std::string>(ids, "malformed_arxiv");
    f.db_coverage_note = get_opt<std::string>(j, "db_coverage_note");
    if (const json& m = j.at("match"); !m.is_null()) {
        MatchOutcome out;
        out.query_title = normalize_title(m.at("query_title").get<std::string>());
        if (!m.at("best").is_null()) {
            out.best = scored_from(m.at("best"));
        }
        for (const json& r : m.at("runners_up")) {
            out.runners_up.push_back(scored_from(r));
        }
        out.decision = m.at("decision").get<std::string>() == "Matched" ? Decision::Matched : Decision::Candidate;
        out.threshold_used = m.at("threshold_used").get<double>();
        f.match = std::move(out);
    }
    for (const json& e : j.at("identifier_evidence")) {
        IdentifierEvidence ev;
        ev.scheme = e.at("scheme").get<std::string>();
        ev.cited_id = e.at("cited_id").get<std::string>();
        ev.status = status_from(e.at("status").get<std::string>());
        ev.record_id = get_opt<std::string>(e, "record_id");
        ev.record_title = get_opt<std::string>(e, "record_title");
        ev.cited_title = get_opt<std::string>(e, "cited_title");
        ev.score = get_opt<double>(e, "score");
        f.identifiers.push_back(std::move(ev));
    }
    if (const json& x = j.at("external"); !x.is_null()) {
        ExternalEvidence ev;
        ev.annotation = x.at("annotation").get<std::string>();
        for (const json& h : x.at("hits")) {
            ScoredHit sh;
            sh.service = service_from(h.at("service").get<std::string>());
            sh.hit.title = h.at("title").get<std::string>();
            sh.hit.year = get_opt<int>(h, "year");
            sh.hit.url = get_opt<std::string>(h, "url");
            sh.hit.external_id = h.at("external_id").get<std::string>();
            sh.score = h.at("score").get<double>();
            ev.hits.push_back(std::move(sh));
        }
        rf.external = std::move(ev);
    }
    return rf;
}

json report_to_json(const ScanReport& r)
{
    json sources = json::array();
    for (const SourceDescriptor& s : r.index.sources) {
        sources.push_back({{"name", s.name}, {"path", s.path}, {"records", s.records}, {"skipped", s.skipped},
                           {"newest_year", opt(s.newest_year)}});
    }
    json papers = json::array();
    for (const PaperEntry& p : r.papers) {
        json flags = json::array();
        for (const ReportedFlag& f : p.flags) {
            flags.push_back(flag_to_json(f));
        }
        papers.push_back({{"source_id", p.source_id}, {"path", p.path}, {"citation_total", p.citation_total},
                          {"flags", flags}, {"tier", to_string(p.tier)}, {"error", opt(p.error)}});
    }
    const CandidateStats& s = r.summary;
    json summary {
        {"papers_flagged", s.papers_flagged},
        {"papers_flagged_fraction", s.papers_flagged_fraction},
        {"citations_flagged", s.citations_flagged},
        {"citations_flagged_fraction", s.citations_flagged_fraction},
        {"avg_flags_per_flagged_paper", s.avg_flags_per_flagged_paper},
        {"max_flags_in_one_paper", s.max_flags_in_one_paper},
    };
    json citations = nullptr;
    if (r.citations) {
        const CitationStats& c = *r.citations;
        citations = {{"mean", c.mean}, {"std", c.std}, {"q1", c.q1}, {"q2", c.q2}, {"q3", c.q3}, {"total", c.total}};
    }
    return {
        {"schema_version", ScanReport::kSchemaVersion},
        {"tool_version", r.tool_version},
        {"generated_at", r.generated_at},
        {"config_digest", r.config_digest},
        {"config", r.config},
        {"index", {{"sources", sources}, {"built_at", r.index.built_at}}},
        {"papers", papers},
        {"summary", summary},
        {"citation_stats", citations},
        {"methods", {
            {"similarity", "1 - levenshtein/max(len) over normalized titles"},
            {"std", "population"},
            {"quartiles", "inclusive linear interpolation"},
            {"avg_flags", "per flagged paper"},
        }},
    };
}

ScanReport report_from_json(const json& j)
{
    try {
        if (!j.is_object() || j.value("schema_version", 0) != ScanReport::kSchemaVersion) {
            throw Error(ErrorCode::FormatError, "not a schema-1 scan report");
        }
        ScanReport r;
        r.tool_version = j.at("tool_version").get<std::string>();
        r.generated_at = j.at("generated_at").get<std::string>();
        r.config_digest = j.at("config_digest").get<std::string>();
        r.config = j.at("config").get<std::vector<std::string>>();
        r.index.built_at = j.at("index").at("built_at").get<std::string>();
        for (const json& s : j.at("index").at("sources")) {
            r.index.sources.push_back({s.at("name").get<std::string>(), s.at("path").get<std::string>(),
                                       s.at("records").get<std::uint64_t>(), s.at("skipped").get<std::uint64_t>(),
                                       get_opt<int>(s, "newest_year")});
        }
        for (const json& p : j.at("papers")) {
            PaperEntry e;
            e.source_id = p.at("source_id").get<std::string>();
            e.path = p.at("path").get<std::string>();
            e.citation_total = p.at("citation_total").get<std::uint64_t>();
            for (const json& f : p.at("flags")) {
                e.flags.push_back(flag_from_json(f));
            }
            auto tier = risk_tier_from_string(p.at("tier").get<std::string>());
            if (!tier) {
                throw Error(ErrorCode::FormatError, "unknown tier for " + e.source_id);
            }
            e.tier = *tier;
            e.error = get_opt<std::string>(p, "error");
            r.papers.push_back(std::move(e));
        }
        std::sort(r.papers.begin(), r.papers.end(),
                  [](const PaperEntry& a, const PaperEntry& b) { return a.source_id < b.source_id; });
        const json& s = j.at("summary");
        r.summary.papers_flagged = s.at("papers_flagged").get<std::uint64_t>();
        r.summary.papers_flagged_fraction = s.at("papers_flagged_fraction").get<double>();
        r.summary.citations_flagged = s.at("citations_flagged").get<std::uint64_t>();
        r.summary.citations_flagged_fraction = s.at("citations_flagged_fraction").get<double>();
        r.summary.avg_flags_per_flagged_paper = s.at("avg_flags_per_flagged_paper").get<double>();
        r.summary.max_flags_in_one_paper = s.at("max_flags_in_one_paper").get<std::uint64_t>();
        if (const json& c = j.at("citation_stats"); !c.is_null()) {
            r.citations = CitationStats {c.at("mean").get<double>(), c.at("std").get<double>(), c.at("q1").get<double>(),
                                         c.at("q2").get<double>(), c.at("q3").get<double>(),
                                         c.at("total").get<std::uint64_t>()};
        }
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("malformed scan report: ") + e.what());
    }
}

std::string serialize_report(const ScanReport& r)
{
    return report_to_json(r).dump(2) + "\n";
}

void write_report(const ScanReport& r, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path);
    }
    out << serialize_report(r);
    if (!out.flush()) {
        throw Error(ErrorCode::IoError, "write failed: " + path);
    }
}

ScanReport read_report(const std::string& path)
{
    json j = json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded()) {
        throw Error(ErrorCode::FormatError, path + ": not valid JSON");
    }
    return report_from_json(j);
}

bool tiers_consistent(const ScanReport& r, const TierBoundaries& tiers)
{
    return std::all_of(r.papers.begin(), r.papers.end(),
                       [&](const PaperEntry& p) { return p.tier == risk_tier(p.flags.size(), tiers); });
}

} // namespace hallucheck
