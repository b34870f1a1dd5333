#include "hallucheck/error.hpp"
#include "hallucheck/report.hpp"

#include <fmt/format.h>

namespace hallucheck {

namespace {

std::string csv_field(std::string_view v)
{
    if (v.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(v);
    }
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string md_cell(std::string_view v)
{
    std::string out;
    for (char c : v) {
        if (c == '|') {
            out += "\\|";
        } else if (c == '\n') {
            out += ' ';
        } else {
            out += c;
        }
    }
    return out;
}

std::string render_markdown(const ScanReport& r, const std::vector<HitRateRow>* hit_rate)
{
    std::string out = "# Citation scan report\n\n";
    out += fmt::format("- tool version: {}\n- generated: {}\n- config digest: `{}`\n", r.tool_version, r.generated_at,
                       r.config_digest);
    for (const SourceDescriptor& s : r.index.sources) {
        out += fmt::format("- index source `{}`: {} records{}\n", s.name, s.records,
                           s.newest_year ? fmt::format(", newest {}", *s.newest_year) : std::string());
    }
    std::size_t errors = 0;
    for (const PaperEntry& p : r.papers) {
        errors += p.error ? 1 : 0;
    }
    out += fmt::format("- papers: {} ({} unreadable)\n\n", r.papers.size(), errors);

    out += "## Citations per paper\n\n";
    out += r.citations ? citation_stats_markdown(*r.citations) : std::string("No readable papers.\n");
    out += "\n## Candidate citations\n\n";
    out += candidate_stats_markdown(r.summary);
    out += "\nThe average counts candidates per flagged paper.\n";

    out += "\n## Flagged papers\n\n| paper | citations | candidates | tier |\n|---|---:|---:|---|\n";
    for (const PaperEntry& p : r.papers) {
        if (!p.flags.empty()) {
            out += fmt::format("| {} | {} | {} | {} |\n", md_cell(p.source_id), p.citation_total, p.flags.size(),
                               to_string(p.tier));
        }
    }
    out += "\n## Candidates\n\n| paper | # | kind | reference |\n|---|---:|---|---|\n";
    for (const PaperEntry& p : r.papers) {
        for (const ReportedFlag& f : p.flags) {
            out += fmt::format("| {} | {} | {} | {} |\n", md_cell(p.source_id), f.ordinal(), to_string(f.flag.kind),
                               md_cell(f.flag.raw()));
        }
    }
    if (errors > 0) {
        out += "\n## Unreadable inputs\n\n";
        for (const PaperEntry& p : r.papers) {
            if (p.error) {
                out += fmt::format("- {}: {}\n", p.path, *p.error);
            }
        }
    }
    if (hit_rate) {
        out += "\n## Hit rate by candidate frequency\n\n" + hit_rate_markdown(*hit_rate);
    }
    return out;
}

std::string render_csv(const ScanReport& r, const std::vector<HitRateRow>* hit_rate)
{
    std::string out = "paper,ordinal,kind,tier,paper_candidates,title,raw\n";
    for (const PaperEntry& p : r.papers) {
        for (const ReportedFlag& f : p.flags) {
            out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(p.source_id), f.ordinal(), to_string(f.flag.kind),
                               to_string(p.tier), p.flags.size(), csv_field(f.flag.citation.title.value_or("")),
                               csv_field(f.flag.raw()));
        }
    }
    out += "\n" + candidate_stats_csv(r.summary);
    if (r.citations) {
        out += "\n" + citation_stats_csv(*r.citations);
    }
    if (hit_rate) {
        out += "\n" + hit_rate_csv(*hit_rate);
    }
    return out;
}

} // namespace

std::string render_report(const ScanReport& r, std::string_view format, const std::vector<HitRateRow>* hit_rate)
{
    if (format == "md" || format == "markdown") {
        return render_markdown(r, hit_rate);
    }
    if (format == "csv") {
        return render_csv(r, hit_rate);
    }
    throw Error(ErrorCode::UnknownFormat, "unknown report format '" + std::string(format) + "' (expected md or csv)");
}

} // namespace hallucheck
