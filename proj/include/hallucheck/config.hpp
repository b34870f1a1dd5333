#pragma once

#include "hallucheck/analytics.hpp"
#include "hallucheck/matcher.hpp"
#include "hallucheck/refingest.hpp"

#include <string>
#include <vector>

namespace hallucheck {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Effective settings for a scan or triage session.
///
/// File format: one `key = value` per line, '#' starts a comment. Keys:
/// threshold, keywords (comma separated), scan_all, top_k, near_floor,
/// headings, tier.doubtful_from, tier.high_from, top_bin, rate_ms,
/// exhaustive, online, cache_dir.
struct Config {
    MatcherConfig matcher;
    SectionOptions section;
    TierBoundaries tiers;
    std::uint64_t top_bin = 9;
    int rate_ms = 1000;
    bool exhaustive = false;
    bool online = false;
    std::string cache_dir = ".hallucheck-cache";

    /// Throws Error(ConfigError) for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    void validate() const;

    /// Sorted `key=value` lines covering every setting.
    [[nodiscard]] std::vector<std::string> canonical_lines() const;
    [[nodiscard]] std::string digest() const;
};

[[nodiscard]] Config parse_config_text(std::string_view text, Config base = {});
[[nodiscard]] Config load_config_file(const std::string& path, Config base = {});

} // namespace hallucheck
