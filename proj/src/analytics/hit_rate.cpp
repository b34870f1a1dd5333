#include "hallucheck/analytics.hpp"

#include <algorithm>

namespace hallucheck {

std::string HitRateRow::bin_label() const
{
    return (open_top ? "≥" : "") + std::to_string(freq_bin);
}

std::vector<HitRateRow> hit_rate_table_from_bins(
    const std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>& bins, std::uint64_t top_bin)
{
    top_bin = std::max<std::uint64_t>(top_bin, 1);
    std::vector<HitRateRow> rows;
    std::uint64_t cum_c = 0;
    std::uint64_t cum_h = 0;
    for (std::uint64_t bin = top_bin; bin >= 1; --bin) {
        HitRateRow row;
        row.freq_bin = bin;
        row.open_top = bin == top_bin;
        for (const auto& [count, totals] : bins) {
            bool in_bin = row.open_top ? count >= bin : count == bin;
            if (in_bin) {
                row.num_candidates += totals.first;
                row.num_hallucited += totals.second;
            }
        }
        cum_c += row.num_candidates;
        cum_h += row.num_hallucited;
        row.cum_candidates = cum_c;
        row.cum_hallucited = cum_h;
        if (row.num_candidates > 0) {
            row.hit_rate = static_cast<double>(row.num_hallucited) / static_cast<double>(row.num_candidates);
        }
        if (cum_c > 0) {
            row.cum_hit_rate = static_cast<double>(cum_h) / static_cast<double>(cum_c);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<HitRateRow> hit_rate_table(const std::map<std::string, HitRateInput>& rows, std::uint64_t top_bin)
{
    std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> bins;
    for (const auto& [paper, in] : rows) {
        if (in.flag_count == 0) {
            continue;
        }
        auto& b = bins[in.flag_count];
        ++b.first;
        b.second += in.hallucited ? 1 : 0;
    }
    return hit_rate_table_from_bins(bins, top_bin);
}

} // namespace hallucheck
