#include "hallucheck/config.hpp"
#include "hallucheck/error.hpp"
#include "hallucheck/util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>

namespace hallucheck {

namespace {

std::vector<std::string> split_list(std::string_view value)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        std::string_view piece = util::trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!piece.empty()) {
            out.emplace_back(piece);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) {
            out.push_back(',');
        }
        out += s;
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    std::string l = util::ascii_lower(v);
    if (l == "true" || l == "yes" || l == "1" || l == "on") {
        return true;
    }
    if (l == "false" || l == "no" || l == "0" || l == "off") {
        return false;
    }
    throw Error(ErrorCode::ConfigError, key + ": expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v, double lo, double hi)
{
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used == v.size() && d >= lo && d <= hi) {
            return d;
        }
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ConfigError, fmt::format("{}: expected a number in [{}, {}], got '{}'", key, lo, hi, v));
}

std::uint64_t parse_uint(const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw Error(ErrorCode::ConfigError, key + ": expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

} // namespace

void Config::set(const std::string& raw_key, const std::string& value)
{
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "threshold") {
        matcher.threshold = parse_double(key, value, 0.0, 1.0);
    } else if (key == "keywords") {
        matcher.keywords.keywords = split_list(value);
    } else if (key == "scan_all") {
        matcher.scan_all = parse_bool(key, value);
    } else if (key == "top_k") {
        matcher.top_k = parse_uint(key, value);
    } else if (key == "near_floor") {
        matcher.near_floor = parse_double(key, value, 0.0, 1.0);
    } else if (key == "headings") {
        section.headings = split_list(value);
        if (section.headings.empty()) {
            throw Error(ErrorCode::ConfigError, "headings: at least one heading is required");
        }
    } else if (key == "tier.doubtful_from") {
        tiers.doubtful_from = parse_uint(key, value);
    } else if (key == "tier.high_from") {
        tiers.high_from = parse_uint(key, value);
    } else if (key == "top_bin") {
        top_bin = std::max<std::uint64_t>(1, parse_uint(key, value));
    } else if (key == "rate_ms") {
        rate_ms = static_cast<int>(std::min<std::uint64_t>(parse_uint(key, value), 600000));
    } else if (key == "exhaustive") {
        exhaustive = parse_bool(key, value);
    } else if (key == "online") {
        online = parse_bool(key, value);
    } else if (key == "cache_dir") {
        cache_dir = value;
    } else {
        throw Error(ErrorCode::ConfigError, "unknown configuration key '" + key + "'");
    }
}

void Config::validate() const
{
    if (tiers.doubtful_from < 1 || tiers.high_from < tiers.doubtful_from) {
        throw Error(ErrorCode::ConfigError, "tier boundaries must satisfy 1 <= doubtful_from <= high_from");
    }
}

std::vector<std::string> Config::canonical_lines() const
{
    std::vector<std::string> lines {
        fmt::format("cache_dir={}", cache_dir),
        fmt::format("exhaustive={}", exhaustive),
        fmt::format("headings={}", join_list(section.headings)),
        fmt::format("keywords={}", join_list(matcher.keywords.keywords)),
        fmt::format("near_floor={}", matcher.near_floor),
        fmt::format("online={}", online),
        fmt::format("rate_ms={}", rate_ms),
        fmt::format("scan_all={}", matcher.scan_all),
        fmt::format("threshold={}", matcher.threshold),
        fmt::format("tier.doubtful_from={}", tiers.doubtful_from),
        fmt::format("tier.high_from={}", tiers.high_from),
        fmt::format("top_bin={}", top_bin),
        fmt::format("top_k={}", matcher.top_k),
    };
    std::sort(lines.begin(), lines.end());
    return lines;
}

std::string Config::digest() const
{
    std::string text;
    for (const auto& l : canonical_lines()) {
        text += l;
        text.push_back('\n');
    }
    return util::sha256_hex(text);
}

Config parse_config_text(std::string_view text, Config base)
{
    std::size_t line_no = 0;
    for (std::string_view line : util::split_lines(text)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = util::trim(line);
        if (line.empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ConfigError, fmt::format("line {}: expected key = value", line_no));
        }
        std::string key(util::trim(line.substr(0, eq)));
        std::string value(util::trim(line.substr(eq + 1)));
        try {
            base.set(key, value);
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    base.validate();
    return base;
}

Config load_config_file(const std::string& path, Config base)
{
    return parse_config_text(util::read_file(path), std::move(base));
}

} // namespace hallucheck
