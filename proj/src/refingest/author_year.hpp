#pragma once

// Shared by segmentation and parsing: locating the "Authors. YEAR." opener.

#include <cstddef>
#include <optional>
#include <string_view>

namespace hallucheck::detail {

struct YearSentence {
    /// End of the author block, including its closing period.
    std::size_t authors_end = 0;
    std::size_t year_pos = 0;
    int year = 0;
    /// First position after the year token and its delimiter.
    std::size_t after = 0;
};

/// Finds the first "<prefix>. YYYY[a-z]." or "<prefix>. (YYYY)." within the
/// first `limit` bytes. Does not judge whether the prefix looks like authors.
[[nodiscard]] std::optional<YearSentence> find_year_sentence(std::string_view text,
                                                             std::size_t limit = 600);

[[nodiscard]] bool looks_like_author_list(std::string_view prefix);

[[nodiscard]] bool starts_with_numeric_label(std::string_view line);

} // namespace hallucheck::detail
