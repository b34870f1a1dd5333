#include "hallucheck/error.hpp"
#include "hallucheck/matcher.hpp"

#include <algorithm>

namespace hallucheck {

namespace {

struct Hit {
    std::uint32_t record = 0;
    double score = 0.0;
};

bool better(const Hit& a, const Hit& b) noexcept
{
    // Records are stored in id order, so the index doubles as the id tie-break.
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.record < b.record;
}

std::vector<Hit> scored_candidates(const TitleIndex& index, const CachedLevenshtein& query,
                                   std::u32string_view query_chars, double level)
{
    std::vector<Hit> hits;
    for (std::uint32_t rec : index.candidates(query_chars, level)) {
        const std::u32string& chars = index.chars(rec);
        double score = similarity_from_distance(query.distance(chars), query_chars.size(), chars.size());
        if (meets_threshold(score, level)) {
            hits.push_back({rec, score});
        }
    }
    std::sort(hits.begin(), hits.end(), better);
    return hits;
}

/// The trigram bound is informative at this level for a query of length L.
bool trigram_filter_useful(std::size_t length, double level)
{
    std::size_t k = max_distance_for(length, level);
    return length > 2 + 3 * k;
}

std::vector<Hit> exhaustive_top(const TitleIndex& index, const CachedLevenshtein& query,
                                std::size_t query_len, std::size_t keep, double floor)
{
    std::vector<Hit> top;
    auto kth_score = [&] { return top.size() < keep ? -1.0 : top.back().score; };
    for (std::uint32_t rec = 0; rec < index.size(); ++rec) {
        const std::u32string& chars = index.chars(rec);
        std::size_t longer = std::max(query_len, chars.size());
        std::size_t gap = query_len > chars.size() ? query_len - chars.size() : chars.size() - query_len;
        double bound = similarity_from_distance(gap, longer, longer);
        if (bound < kth_score() || (floor > 0.0 && !meets_threshold(bound, floor))) {
            continue;
        }
        double score = similarity_from_distance(query.distance(chars), query_len, chars.size());
        if (floor > 0.0 && !meets_threshold(score, floor)) {
            continue;
        }
        Hit hit {rec, score};
        if (top.size() == keep && !better(hit, top.back())) {
            continue;
        }
        top.insert(std::upper_bound(top.begin(), top.end(), hit, better), hit);
        if (top.size() > keep) {
            top.pop_back();
        }
    }
    return top;
}

} // namespace

MatchOutcome search_title(const TitleIndex& index, std::string_view title, const SearchOptions& options)
{
    MatchOutcome outcome;
    outcome.query_title = normalize_title(title);
    outcome.threshold_used = options.threshold;
    if (outcome.query_title.empty()) {
        throw Error(ErrorCode::EmptyQuery, "title normalizes to an empty string");
    }
    const std::u32string& q = outcome.query_title.chars;
    CachedLevenshtein query(q);
    std::size_t keep = options.top_k + 1;

    std::vector<Hit> hits = scored_candidates(index, query, q, options.threshold);
    if (hits.empty()) {
        // No match: find the true nearest records, widening the blocked probe
        // while the trigram bound still prunes, then scanning.
        bool done = false;
        for (double level = options.threshold - 0.1; level > 0.0; level -= 0.1) {
            if (level < options.near_floor || !trigram_filter_useful(q.size(), level)) {
                break;
            }
            hits = scored_candidates(index, query, q, level);
            if (hits.size() >= keep) {
                done = true;
                break;
            }
        }
        if (!done) {
            hits = exhaustive_top(index, query, q.size(), keep, options.near_floor);
        }
    }
    if (hits.size() > keep) {
        hits.resize(keep);
    }
    auto to_scored = [&](const Hit& h) { return ScoredRecord {index.records()[h.record].id, h.score}; };
    if (!hits.empty()) {
        outcome.best = to_scored(hits.front());
        for (std::size_t i = 1; i < hits.size(); ++i) {
            outcome.runners_up.push_back(to_scored(hits[i]));
        }
    }
    outcome.decision = outcome.best && meets_threshold(outcome.best->score, options.threshold)
        ? Decision::Matched
        : Decision::Candidate;
    return outcome;
}

} // namespace hallucheck
