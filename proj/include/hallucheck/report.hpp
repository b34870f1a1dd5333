#pragma once

#include "hallucheck/analytics.hpp"
#include "hallucheck/bibindex.hpp"
#include "hallucheck/config.hpp"
#include "hallucheck/matcher.hpp"
#include "hallucheck/netverify.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hallucheck {

struct ExternalEvidence {
    std::string annotation;
    std::vector<ScoredHit> hits;
};

struct ReportedFlag {
    CandidateFlag flag;
    std::optional<ExternalEvidence> external;

    [[nodiscard]] std::size_t ordinal() const noexcept { return flag.citation.raw_ref.ordinal; }
};

struct PaperEntry {
    std::string source_id;
    std::string path;
    std::uint64_t citation_total = 0;
    std::vector<ReportedFlag> flags;
    RiskTier tier = RiskTier::Clean;
    /// Set when the file could not be scanned; the entry then has no citations.
    std::optional<std::string> error;

    [[nodiscard]] const ReportedFlag* flag_at(std::size_t ordinal) const;
};

struct ScanReport {
    static constexpr int kSchemaVersion = 1;

    std::string tool_version {kToolVersion};
    std::string generated_at;
    std::string config_digest;
    std::vector<std::string> config;
    IndexMeta index;
    std::vector<PaperEntry> papers; // sorted by source_id
    CandidateStats summary;
    std::optional<CitationStats> citations;

    [[nodiscard]] const PaperEntry* paper(std::string_view source_id) const;
};

[[nodiscard]] nlohmann::json flag_to_json(const ReportedFlag& f);
[[nodiscard]] ReportedFlag flag_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json report_to_json(const ScanReport& r);
/// Throws Error(FormatError) for documents that are not schema-1 reports.
[[nodiscard]] ScanReport report_from_json(const nlohmann::json& j);

[[nodiscard]] std::string serialize_report(const ScanReport& r);
void write_report(const ScanReport& r, const std::string& path);
[[nodiscard]] ScanReport read_report(const std::string& path);

/// "md" or "csv"; the hit-rate table is included when verdict-derived rows are given.
/// Throws Error(UnknownFormat).
[[nodiscard]] std::string render_report(const ScanReport& r, std::string_view format,
                                        const std::vector<HitRateRow>* hit_rate = nullptr);

/// Recomputes summary, citation statistics and tiers from the paper entries.
void finalize_summary(ScanReport& r, const TierBoundaries& tiers);

/// True when every entry's tier equals risk_tier(|flags|).
[[nodiscard]] bool tiers_consistent(const ScanReport& r, const TierBoundaries& tiers);

struct ScanOptions {
    Config config;
    std::size_t threads = 0; // 0 = hardware concurrency
    /// Optional external lookups for unresolved candidates.
    ExternalVerifier* verifier = nullptr;
};

/// Expands directories to their *.txt, *.bib and *.blocks files (sorted).
/// Throws Error(NoInputs) when nothing is left.
[[nodiscard]] std::vector<std::string> collect_inputs(const std::vector<std::string>& paths);

/// Reads one input according to its extension and returns its parsed references.
[[nodiscard]] std::vector<ParsedReference> load_references(const std::string& path, const std::string& source_id,
                                                           const SectionOptions& section);

/// Files are scanned in parallel; a failing file becomes an entry with an error note.
[[nodiscard]] ScanReport scan_corpus(const std::vector<std::string>& inputs, const TitleIndex& index,
                                     const ScanOptions& options);

} // namespace hallucheck
