#include "hallucheck/analytics.hpp"
#include "hallucheck/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hallucheck {

double quantile_inclusive(const std::vector<double>& sorted, double p)
{
    if (sorted.empty()) {
        throw Error(ErrorCode::EmptyInput, "quantile of an empty sample");
    }
    double pos = p * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

CitationStats citation_stats(const std::vector<std::uint64_t>& counts)
{
    if (counts.empty()) {
        throw Error(ErrorCode::EmptyInput, "citation statistics need at least one paper");
    }
    CitationStats s;
    s.total = std::accumulate(counts.begin(), counts.end(), std::uint64_t {0});
    auto n = static_cast<double>(counts.size());
    s.mean = static_cast<double>(s.total) / n;
    double ss = 0.0;
    for (std::uint64_t c : counts) {
        double d = static_cast<double>(c) - s.mean;
        ss += d * d;
    }
    s.std = std::sqrt(ss / n);

    std::vector<double> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end());
    s.q1 = quantile_inclusive(sorted, 0.25);
    s.q2 = quantile_inclusive(sorted, 0.5);
    s.q3 = quantile_inclusive(sorted, 0.75);
    return s;
}

CandidateStats candidate_stats(const std::map<std::string, std::uint64_t>& flags_per_paper, std::uint64_t paper_total,
                               std::uint64_t citation_total)
{
    CandidateStats s;
    for (const auto& [paper, flags] : flags_per_paper) {
        if (flags == 0) {
            continue;
        }
        ++s.papers_flagged;
        s.citations_flagged += flags;
        s.max_flags_in_one_paper = std::max(s.max_flags_in_one_paper, flags);
    }
    if (s.papers_flagged > paper_total) {
        throw Error(ErrorCode::InconsistentTotals, std::to_string(s.papers_flagged) + " flagged papers but only "
                        + std::to_string(paper_total) + " papers in total");
    }
    if (s.citations_flagged > citation_total) {
        throw Error(ErrorCode::InconsistentTotals, std::to_string(s.citations_flagged) + " flagged citations but only "
                        + std::to_string(citation_total) + " citations in total");
    }
    if (paper_total > 0) {
        s.papers_flagged_fraction = static_cast<double>(s.papers_flagged) / static_cast<double>(paper_total);
    }
    if (citation_total > 0) {
        s.citations_flagged_fraction = static_cast<double>(s.citations_flagged) / static_cast<double>(citation_total);
    }
    if (s.papers_flagged > 0) {
        s.avg_flags_per_flagged_paper = static_cast<double>(s.citations_flagged) / static_cast<double>(s.papers_flagged);
    }
    return s;
}

RiskTier risk_tier(std::uint64_t flag_count, const TierBoundaries& bounds)
{
    if (flag_count == 0) {
        return RiskTier::Clean;
    }
    if (flag_count >= bounds.high_from) {
        return RiskTier::High;
    }
    if (flag_count >= bounds.doubtful_from) {
        return RiskTier::Doubtful;
    }
    return RiskTier::Low;
}

std::string_view to_string(RiskTier tier) noexcept
{
    switch (tier) {
    case RiskTier::Clean: return "Clean";
    case RiskTier::Low: return "Low";
    case RiskTier::Doubtful: return "Doubtful";
    case RiskTier::High: return "High";
    }
    return "Clean";
}

std::optional<RiskTier> risk_tier_from_string(std::string_view s) noexcept
{
    for (RiskTier t : {RiskTier::Clean, RiskTier::Low, RiskTier::Doubtful, RiskTier::High}) {
        if (to_string(t) == s) {
            return t;
        }
    }
    return std::nullopt;
}

} // namespace hallucheck
