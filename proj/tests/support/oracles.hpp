#pragma once

// Reference implementations the fast paths are checked against.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace oracle {

/// Textbook Wagner-Fischer table.
inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b)
{
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) {
        d[i][0] = i;
    }
    for (std::size_t j = 0; j <= b.size(); ++j) {
        d[0][j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
        }
    }
    return d[a.size()][b.size()];
}

/// Breadth-first search over single-character edits drawn from `alphabet`;
/// the first level that reaches `b` is the distance. Only for tiny inputs.
/// States are strings of alphabet indices packed into one integer.
inline std::size_t edit_script_search(const std::u32string& a, const std::u32string& b,
                                      const std::u32string& alphabet)
{
    using Digits = std::vector<std::uint8_t>;
    const std::uint64_t base = alphabet.size() + 1;
    auto digits_of = [&](const std::u32string& s) {
        Digits d;
        for (char32_t c : s) {
            d.push_back(static_cast<std::uint8_t>(alphabet.find(c) + 1));
        }
        return d;
    };
    auto pack = [&](const Digits& d) {
        std::uint64_t v = 0;
        for (std::uint8_t x : d) {
            v = v * base + x;
        }
        return v;
    };
    const std::size_t limit = std::max(a.size(), b.size());
    const std::uint64_t target = pack(digits_of(b));
    Digits start = digits_of(a);
    std::unordered_set<std::uint64_t> seen {pack(start)};
    std::vector<Digits> frontier {start};
    for (std::size_t depth = 0;; ++depth) {
        for (const Digits& s : frontier) {
            if (pack(s) == target) {
                return depth;
            }
        }
        std::vector<Digits> next;
        auto push = [&](Digits s) {
            if (s.size() <= limit && seen.insert(pack(s)).second) {
                next.push_back(std::move(s));
            }
        };
        for (const Digits& s : frontier) {
            for (std::size_t i = 0; i <= s.size(); ++i) {
                if (i < s.size()) {
                    Digits del = s;
                    del.erase(del.begin() + static_cast<std::ptrdiff_t>(i));
                    push(std::move(del));
                }
                for (std::uint8_t c = 1; c < base; ++c) {
                    Digits ins = s;
                    ins.insert(ins.begin() + static_cast<std::ptrdiff_t>(i), c);
                    push(std::move(ins));
                    if (i < s.size() && s[i] != c) {
                        Digits sub = s;
                        sub[i] = c;
                        push(std::move(sub));
                    }
                }
            }
        }
        frontier = std::move(next);
    }
}

inline double similarity(std::u32string_view a, std::u32string_view b)
{
    std::size_t longer = std::max(a.size(), b.size());
    if (longer == 0) {
        return 1.0;
    }
    return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longer);
}

inline std::u32string random_string(std::mt19937_64& rng, const std::u32string& alphabet, std::size_t max_len,
                                    std::size_t min_len = 0)
{
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::u32string s(len(rng), U'a');
    for (auto& c : s) {
        c = alphabet[pick(rng)];
    }
    return s;
}


/// Quartile k/4 of an integer sample: position k(n−1)/4 split into whole and
/// quarter parts with integer arithmetic, then linear interpolation.
inline double quartile(std::vector<std::uint64_t> xs, unsigned k)
{
    std::sort(xs.begin(), xs.end());
    std::size_t scaled = k * (xs.size() - 1);
    std::size_t lo = scaled / 4;
    std::size_t hi = std::min(lo + 1, xs.size() - 1);
    double frac = static_cast<double>(scaled % 4) / 4.0;
    double a = static_cast<double>(xs[lo]);
    double b = static_cast<double>(xs[hi]);
    return a + (b - a) * frac;
}

} // namespace oracle
