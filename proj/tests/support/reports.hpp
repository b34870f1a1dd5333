#pragma once

// Hand-built scan reports for triage tests.

#include "hallucheck/report.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fixture {

inline hallucheck::ReportedFlag flag(std::size_t ordinal, std::string title)
{
    hallucheck::ReportedFlag f;
    f.flag.kind = hallucheck::FlagKind::TitleNotFound;
    f.flag.citation.raw_ref.ordinal = ordinal;
    f.flag.citation.raw_ref.raw = "A. Author. 2025. " + title + ". In Proceedings of ACL.";
    f.flag.citation.title = std::move(title);
    f.flag.citation.year = 2025;
    hallucheck::MatchOutcome m;
    m.query_title = hallucheck::normalize_title(*f.flag.citation.title);
    m.best = hallucheck::ScoredRecord {"dblp:near/1", 0.5};
    m.runners_up = {{"acl:2020.acl-main.3", 0.4}, {"arxiv:2101.00001", 0.3}};
    f.flag.match = m;
    return f;
}

/// Papers with the given flag counts; every paper cites 20 works.
inline hallucheck::ScanReport report(const std::vector<std::pair<std::string, std::size_t>>& papers)
{
    hallucheck::ScanReport r;
    r.generated_at = "2026-01-01T00:00:00.000Z";
    hallucheck::Config cfg;
    r.config_digest = cfg.digest();
    r.config = cfg.canonical_lines();
    for (const auto& [id, n] : papers) {
        hallucheck::PaperEntry p;
        p.source_id = id;
        p.path = id + ".txt";
        p.citation_total = 20;
        for (std::size_t i = 0; i < n; ++i) {
            p.flags.push_back(flag(2 * i + 1, "Fabricated study number " + std::to_string(i) + " of " + id));
        }
        r.papers.push_back(std::move(p));
    }
    std::sort(r.papers.begin(), r.papers.end(),
              [](const auto& a, const auto& b) { return a.source_id < b.source_id; });
    hallucheck::finalize_summary(r, cfg.tiers);
    return r;
}

inline hallucheck::Verdict verdict(std::string paper, std::size_t ordinal, hallucheck::Label label,
                                   std::string stamp = "2026-01-01T00:00:00.000Z", std::string verifier = "v1")
{
    hallucheck::Verdict v;
    v.paper = std::move(paper);
    v.ordinal = ordinal;
    v.label = label;
    v.no_corresponding_work = label == hallucheck::Label::HalluCitation;
    v.verifier = std::move(verifier);
    v.timestamp = std::move(stamp);
    return v;
}

} // namespace fixture
