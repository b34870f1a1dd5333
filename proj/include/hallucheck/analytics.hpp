#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hallucheck {

struct CitationStats {
    double mean = 0.0;
    double std = 0.0; // population
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    std::uint64_t total = 0;
};

/// Quartiles by inclusive linear interpolation. Throws Error(EmptyInput).
[[nodiscard]] CitationStats citation_stats(const std::vector<std::uint64_t>& counts);

/// Value at fraction p of a sorted sample, position p·(n−1).
[[nodiscard]] double quantile_inclusive(const std::vector<double>& sorted, double p);

struct CandidateStats {
    std::uint64_t papers_flagged = 0;
    double papers_flagged_fraction = 0.0;
    std::uint64_t citations_flagged = 0;
    double citations_flagged_fraction = 0.0;
    /// Mean flags over papers with at least one flag.
    double avg_flags_per_flagged_paper = 0.0;
    std::uint64_t max_flags_in_one_paper = 0;
};

/// Throws Error(InconsistentTotals) if flagged papers or flags exceed the totals.
[[nodiscard]] CandidateStats candidate_stats(const std::map<std::string, std::uint64_t>& flags_per_paper,
                                             std::uint64_t paper_total, std::uint64_t citation_total);

struct HitRateRow {
    std::uint64_t freq_bin = 0;
    bool open_top = false; // rendered as "≥N"
    std::uint64_t num_candidates = 0;
    std::uint64_t cum_candidates = 0;
    std::uint64_t num_hallucited = 0;
    std::uint64_t cum_hallucited = 0;
    double hit_rate = 0.0;
    double cum_hit_rate = 0.0;

    [[nodiscard]] std::string bin_label() const;
};

struct HitRateInput {
    std::uint64_t flag_count = 0;
    bool hallucited = false;
};

/// Rows from the open top bin down to 1; cumulative columns run from the top.
[[nodiscard]] std::vector<HitRateRow> hit_rate_table(const std::map<std::string, HitRateInput>& rows,
                                                     std::uint64_t top_bin = 9);

/// Same table from pre-aggregated per-bin counts, index = bin, used when only
/// published totals are available.
[[nodiscard]] std::vector<HitRateRow> hit_rate_table_from_bins(
    const std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>& bins, std::uint64_t top_bin);

enum class RiskTier { Clean, Low, Doubtful, High };

struct TierBoundaries {
    std::uint64_t doubtful_from = 3;
    std::uint64_t high_from = 4;
};

[[nodiscard]] RiskTier risk_tier(std::uint64_t flag_count, const TierBoundaries& bounds = {});
[[nodiscard]] std::string_view to_string(RiskTier tier) noexcept;
[[nodiscard]] std::optional<RiskTier> risk_tier_from_string(std::string_view s) noexcept;

struct TermWeightDiff {
    std::string term;
    double weight_a = 0.0;
    double weight_b = 0.0;
    double diff = 0.0;
};

/// Throws Error(EmptyCorpus) when either group has no titles. top_k = 0 keeps all terms.
[[nodiscard]] std::vector<TermWeightDiff> tfidf_diff(const std::vector<std::string>& titles_a,
                                                     const std::vector<std::string>& titles_b, std::size_t top_k = 0);

/// Percentage with one decimal, e.g. 0.9375 → "93.8%".
[[nodiscard]] std::string format_percent(double fraction);

[[nodiscard]] std::string citation_stats_markdown(const CitationStats& s);
[[nodiscard]] std::string citation_stats_csv(const CitationStats& s);
[[nodiscard]] std::string candidate_stats_markdown(const CandidateStats& s);
[[nodiscard]] std::string candidate_stats_csv(const CandidateStats& s);
[[nodiscard]] std::string hit_rate_markdown(const std::vector<HitRateRow>& rows);
[[nodiscard]] std::string hit_rate_csv(const std::vector<HitRateRow>& rows);
[[nodiscard]] std::string tfidf_csv(const std::vector<TermWeightDiff>& diffs);

} // namespace hallucheck
