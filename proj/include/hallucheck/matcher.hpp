#pragma once

#include "hallucheck/bibindex.hpp"
#include "hallucheck/refingest.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hallucheck {

/// Compatibility-folded, lower-cased title with punctuation mapped to single spaces.
struct NormalizedTitle {
    std::string text;
    std::u32string chars;

    [[nodiscard]] bool empty() const noexcept { return chars.empty(); }
    friend bool operator==(const NormalizedTitle& a, const NormalizedTitle& b) { return a.text == b.text; }
};

[[nodiscard]] NormalizedTitle normalize_title(std::string_view title);

/// Character-level Levenshtein distance over code points.
[[nodiscard]] std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// Bit-parallel distance against a fixed pattern; build once per query.
class CachedLevenshtein {
public:
    explicit CachedLevenshtein(std::u32string_view pattern);

    [[nodiscard]] std::size_t distance(std::u32string_view text) const;
    [[nodiscard]] std::size_t pattern_size() const noexcept { return size_; }

private:
    [[nodiscard]] const std::uint64_t* match_vector(char32_t c) const noexcept;

    std::size_t size_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> ascii_;                                   // 128 * words_
    std::vector<std::pair<char32_t, std::vector<std::uint64_t>>> other_; // sorted by code point
    std::vector<std::uint64_t> zero_;
};

/// 1 − d/max(|a|, |b|); two empty strings score 1.
[[nodiscard]] double similarity(std::u32string_view a, std::u32string_view b);
[[nodiscard]] double similarity(const NormalizedTitle& a, const NormalizedTitle& b);
[[nodiscard]] double similarity_from_distance(std::size_t distance, std::size_t len_a, std::size_t len_b) noexcept;

/// Scores are compared with this slack so that e.g. 1 − 4/40 counts as 0.9.
inline constexpr double kScoreEpsilon = 1e-9;

[[nodiscard]] bool meets_threshold(double score, double threshold) noexcept;

/// Largest edit distance d such that 1 − d/longer still meets the threshold.
[[nodiscard]] std::size_t max_distance_for(std::size_t longer, double threshold) noexcept;

struct ScoredRecord {
    std::string id;
    double score = 0.0;
    friend bool operator==(const ScoredRecord&, const ScoredRecord&) = default;
};

enum class Decision { Matched, Candidate };

struct MatchOutcome {
    NormalizedTitle query_title;
    std::optional<ScoredRecord> best;
    /// Next-best records, score descending then id ascending. Exact over the
    /// whole index for Candidate outcomes; limited to records meeting the
    /// threshold for Matched outcomes.
    std::vector<ScoredRecord> runners_up;
    Decision decision = Decision::Candidate;
    double threshold_used = 0.9;
};

struct SearchOptions {
    double threshold = 0.9;
    std::size_t top_k = 5;
    /// Near matches scoring below this are not reported; 0 keeps the search exact.
    double near_floor = 0.0;
};

/// Throws Error(EmptyQuery) when the title normalizes to nothing.
[[nodiscard]] MatchOutcome search_title(const TitleIndex& index, std::string_view title,
                                        const SearchOptions& options = {});

struct KeywordSet {
    std::vector<std::string> keywords;

    [[nodiscard]] static KeywordSet defaults();
};

/// Whole-token scan; venue keywords are case-sensitive, "arXiv" is not.
[[nodiscard]] std::set<std::string> detect_keywords(const RawReference& raw, const KeywordSet& keywords);
[[nodiscard]] std::set<std::string> detect_keywords(std::string_view text, const KeywordSet& keywords);

enum class FlagKind {
    TitleNotFound,
    IdentifierTitleMismatch,
    IdentifierNotFound,
    MalformedIdentifier,
    NoTitleExtracted,
};

[[nodiscard]] std::string_view to_string(FlagKind kind) noexcept;
[[nodiscard]] std::optional<FlagKind> flag_kind_from_string(std::string_view s) noexcept;
/// Lower rank wins when several flags fire for one citation.
[[nodiscard]] int precedence_rank(FlagKind kind) noexcept;

struct IdentifierEvidence {
    enum class Status { Matches, Mismatch, NotFound, Malformed };

    std::string scheme; // "arxiv", "acl"
    std::string cited_id;
    Status status = Status::Matches;
    std::optional<std::string> record_id;
    std::optional<std::string> record_title;
    std::optional<std::string> cited_title;
    std::optional<double> score;
};

[[nodiscard]] std::string_view to_string(IdentifierEvidence::Status status) noexcept;

struct CandidateFlag {
    ParsedReference citation;
    FlagKind kind = FlagKind::TitleNotFound;
    std::optional<MatchOutcome> match;
    std::vector<IdentifierEvidence> identifiers;
    std::optional<std::string> db_coverage_note;

    [[nodiscard]] const std::string& raw() const noexcept { return citation.raw_ref.raw; }
};

struct MatcherConfig {
    double threshold = 0.9;
    KeywordSet keywords = KeywordSet::defaults();
    bool scan_all = false;
    std::size_t top_k = 5;
    double near_floor = 0.0;

    [[nodiscard]] SearchOptions search_options() const { return {threshold, top_k, near_floor}; }
};

[[nodiscard]] std::optional<CandidateFlag> cross_check_identifier(const ParsedReference& parsed,
                                                                  const TitleIndex& index,
                                                                  const MatcherConfig& config = {});

[[nodiscard]] std::optional<CandidateFlag> classify_citation(const ParsedReference& parsed,
                                                             const TitleIndex& index,
                                                             const MatcherConfig& config = {});

} // namespace hallucheck
