#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hallucheck::util {

[[nodiscard]] std::string_view trim(std::string_view s) noexcept;

/// Replaces every run of ASCII whitespace with one space and trims the ends.
[[nodiscard]] std::string collapse_whitespace(std::string_view s);

[[nodiscard]] std::vector<std::string_view> split_lines(std::string_view s);

/// Lenient UTF-8 decoding; invalid bytes decode to U+FFFD.
[[nodiscard]] std::u32string decode_utf8(std::string_view s);
[[nodiscard]] std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

[[nodiscard]] bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept;
[[nodiscard]] std::string ascii_lower(std::string_view s);
[[nodiscard]] std::size_t find_icase(std::string_view haystack, std::string_view needle,
                                     std::size_t from = 0) noexcept;

[[nodiscard]] int current_year();
/// UTC wall-clock time as ISO-8601 with millisecond precision.
[[nodiscard]] std::string iso_timestamp_now();
[[nodiscard]] std::string iso_timestamp(std::int64_t epoch_ms);
[[nodiscard]] std::int64_t epoch_millis_now();

[[nodiscard]] std::string sha256_hex(std::string_view data);

/// Percent-encodes everything except RFC 3986 unreserved characters.
[[nodiscard]] std::string url_encode(std::string_view s);

[[nodiscard]] std::string read_file(const std::string& path);

} // namespace hallucheck::util
