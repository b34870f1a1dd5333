#include "hallucheck/error.hpp"
#include "hallucheck/refingest.hpp"
#include "hallucheck/util.hpp"

#include <cctype>

namespace hallucheck {

namespace {

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
bool is_lower(char c) noexcept { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }

bool valid_month(std::string_view two) noexcept
{
    int month = (two[0] - '0') * 10 + (two[1] - '0');
    return month >= 1 && month <= 12;
}

std::size_t count_digits(std::string_view s, std::size_t from) noexcept
{
    std::size_t n = 0;
    while (from + n < s.size() && is_digit(s[from + n])) {
        ++n;
    }
    return n;
}

/// Parses an optional "vN" suffix at pos. Returns false on an invalid suffix.
bool parse_version(std::string_view s, std::size_t& pos, std::optional<int>& version)
{
    if (pos >= s.size() || s[pos] != 'v') {
        return true;
    }
    std::size_t n = count_digits(s, pos + 1);
    if (n == 0 || n > 4) {
        return false;
    }
    int v = std::stoi(std::string(s.substr(pos + 1, n)));
    if (v < 1) {
        return false;
    }
    version = v;
    pos += 1 + n;
    return true;
}

bool at_boundary(std::string_view s, std::size_t pos) noexcept
{
    if (pos >= s.size()) {
        return true;
    }
    auto c = static_cast<unsigned char>(s[pos]);
    return !std::isalnum(c) && c != '_' && c != '/';
}

struct Match {
    ArxivId id;
    std::size_t consumed = 0;
};

std::optional<Match> match_new_style(std::string_view s)
{
    if (count_digits(s, 0) != 4 || s.size() < 5 || s[4] != '.') {
        return std::nullopt;
    }
    if (!valid_month(s.substr(2, 2))) {
        return std::nullopt;
    }
    std::size_t seq = count_digits(s, 5);
    if (seq < 4 || seq > 5) {
        return std::nullopt;
    }
    Match m;
    m.id.style = ArxivStyle::New;
    m.id.value = std::string(s.substr(0, 5 + seq));
    std::size_t pos = 5 + seq;
    if (!parse_version(s, pos, m.id.version) || !at_boundary(s, pos)) {
        return std::nullopt;
    }
    m.consumed = pos;
    return m;
}

std::optional<Match> match_old_style(std::string_view s)
{
    std::size_t pos = 0;
    // archive: lowercase words joined by '-', optional ".XX" subject class
    while (true) {
        std::size_t start = pos;
        while (pos < s.size() && is_lower(s[pos])) {
            ++pos;
        }
        if (pos == start) {
            return std::nullopt;
        }
        if (pos < s.size() && s[pos] == '-') {
            ++pos;
            continue;
        }
        break;
    }
    if (pos + 2 < s.size() && s[pos] == '.' && is_upper(s[pos + 1]) && is_upper(s[pos + 2])) {
        pos += 3;
    }
    if (pos >= s.size() || s[pos] != '/') {
        return std::nullopt;
    }
    ++pos;
    if (count_digits(s, pos) != 7 || !valid_month(s.substr(pos + 2, 2))) {
        return std::nullopt;
    }
    Match m;
    m.id.style = ArxivStyle::Old;
    m.id.value = std::string(s.substr(0, pos + 7));
    pos += 7;
    if (!parse_version(s, pos, m.id.version) || !at_boundary(s, pos)) {
        return std::nullopt;
    }
    m.consumed = pos;
    return m;
}

std::optional<Match> match_at(std::string_view s)
{
    if (auto m = match_new_style(s)) {
        return m;
    }
    return match_old_style(s);
}

std::string_view token_at(std::string_view s)
{
    std::size_t n = 0;
    while (n < s.size() && !std::isspace(static_cast<unsigned char>(s[n])) && s[n] != ','
           && s[n] != ';' && s[n] != ')' && s[n] != ']') {
        ++n;
    }
    std::string_view tok = s.substr(0, n);
    while (!tok.empty() && tok.back() == '.') {
        tok.remove_suffix(1);
    }
    return tok;
}

} // namespace

std::string ArxivId::render() const
{
    if (version) {
        return value + "v" + std::to_string(*version);
    }
    return value;
}

std::optional<ArxivId> parse_bare_arxiv_id(std::string_view text)
{
    auto m = match_at(text);
    if (!m || m->consumed != text.size()) {
        return std::nullopt;
    }
    return m->id;
}

ArxivId parse_arxiv_id(std::string_view text)
{
    static constexpr std::string_view marker = "arxiv:";
    std::size_t pos = util::find_icase(text, marker);
    if (pos == std::string_view::npos) {
        throw Error(ErrorCode::NoIdentifier, "no arXiv: marker");
    }
    std::string first_bad;
    while (pos != std::string_view::npos) {
        std::size_t start = pos + marker.size();
        while (start < text.size() && text[start] == ' ') {
            ++start;
        }
        std::string_view rest = text.substr(start);
        if (auto m = match_at(rest)) {
            return m->id;
        }
        if (first_bad.empty()) {
            first_bad = std::string(token_at(rest));
        }
        pos = util::find_icase(text, marker, start);
    }
    throw Error(ErrorCode::MalformedIdentifier, "malformed arXiv identifier '" + first_bad + "'");
}

} // namespace hallucheck
