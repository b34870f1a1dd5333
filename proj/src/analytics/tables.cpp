#include "hallucheck/analytics.hpp"

#include <fmt/format.h>

namespace hallucheck {

std::string format_percent(double fraction)
{
    return fmt::format("{:.1f}%", fraction * 100.0);
}

std::string citation_stats_markdown(const CitationStats& s)
{
    std::string out = "| mean | std | q1 | q2 | q3 | total |\n|---:|---:|---:|---:|---:|---:|\n";
    out += fmt::format("| {:.1f} | {:.1f} | {:g} | {:g} | {:g} | {} |\n", s.mean, s.std, s.q1, s.q2, s.q3, s.total);
    return out;
}

std::string citation_stats_csv(const CitationStats& s)
{
    return fmt::format("mean,std,q1,q2,q3,total\n{},{},{},{},{},{}\n", s.mean, s.std, s.q1, s.q2, s.q3, s.total);
}

std::string candidate_stats_markdown(const CandidateStats& s)
{
    std::string out = "| papers_flagged | citations_flagged | avg_flags_per_flagged_paper | max_flags_in_one_paper |\n"
                      "|---:|---:|---:|---:|\n";
    out += fmt::format("| {} ({}) | {} ({}) | {:.2f} | {} |\n", s.papers_flagged, format_percent(s.papers_flagged_fraction),
                       s.citations_flagged, format_percent(s.citations_flagged_fraction), s.avg_flags_per_flagged_paper,
                       s.max_flags_in_one_paper);
    return out;
}

std::string candidate_stats_csv(const CandidateStats& s)
{
    return fmt::format("papers_flagged,papers_flagged_fraction,citations_flagged,citations_flagged_fraction,"
                       "avg_flags_per_flagged_paper,max_flags_in_one_paper\n{},{},{},{},{},{}\n",
                       s.papers_flagged, s.papers_flagged_fraction, s.citations_flagged, s.citations_flagged_fraction,
                       s.avg_flags_per_flagged_paper, s.max_flags_in_one_paper);
}

std::string hit_rate_markdown(const std::vector<HitRateRow>& rows)
{
    std::string out = "| freq_bin | num_candidates | cum_candidates | num_hallucited | cum_hallucited | hit_rate | cum_hit_rate |\n"
                      "|---|---:|---:|---:|---:|---:|---:|\n";
    for (const HitRateRow& r : rows) {
        out += fmt::format("| {} | {} | {} | {} | {} | {} | {} |\n", r.bin_label(), r.num_candidates, r.cum_candidates,
                           r.num_hallucited, r.cum_hallucited, format_percent(r.hit_rate), format_percent(r.cum_hit_rate));
    }
    return out;
}

std::string hit_rate_csv(const std::vector<HitRateRow>& rows)
{
    std::string out = "freq_bin,num_candidates,cum_candidates,num_hallucited,cum_hallucited,hit_rate,cum_hit_rate\n";
    for (const HitRateRow& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", r.bin_label(), r.num_candidates, r.cum_candidates, r.num_hallucited,
                           r.cum_hallucited, r.hit_rate, r.cum_hit_rate);
    }
    return out;
}

std::string tfidf_csv(const std::vector<TermWeightDiff>& diffs)
{
    std::string out = "# weight = l2-normalized tf*(ln((1+N)/(1+df))+1) per group; diff = a - b\n"
                      "term,weight_a,weight_b,diff\n";
    for (const TermWeightDiff& d : diffs) {
        out += fmt::format("{},{:.6f},{:.6f},{:.6f}\n", d.term, d.weight_a, d.weight_b, d.diff);
    }
    return out;
}

} // namespace hallucheck
