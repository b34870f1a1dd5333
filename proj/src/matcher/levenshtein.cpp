#include "hallucheck/matcher.hpp"

#include <algorithm>
#include <cmath>

namespace hallucheck {

CachedLevenshtein::CachedLevenshtein(std::u32string_view pattern)
    : size_(pattern.size()), words_((pattern.size() + 63) / 64)
{
    ascii_.assign(128 * words_, 0);
    zero_.assign(words_, 0);
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        char32_t c = pattern[i];
        std::uint64_t bit = std::uint64_t {1} << (i % 64);
        if (c < 128) {
            ascii_[c * words_ + i / 64] |= bit;
            continue;
        }
        auto it = std::lower_bound(other_.begin(), other_.end(), c,
                                   [](const auto& entry, char32_t key) { return entry.first < key; });
        if (it == other_.end() || it->first != c) {
            it = other_.insert(it, {c, std::vector<std::uint64_t>(words_, 0)});
        }
        it->second[i / 64] |= bit;
    }
}

const std::uint64_t* CachedLevenshtein::match_vector(char32_t c) const noexcept
{
    if (c < 128) {
        return ascii_.data() + c * words_;
    }
    auto it = std::lower_bound(other_.begin(), other_.end(), c,
                               [](const auto& entry, char32_t key) { return entry.first < key; });
    if (it == other_.end() || it->first != c) {
        return zero_.data();
    }
    return it->second.data();
}

// Myers/Hyyrö bit-vector algorithm, blocked over 64-bit words. Vertical
// deltas of each column are kept as VP/VN bit vectors; the horizontal delta
// crossing each word boundary is carried into the next word.
std::size_t CachedLevenshtein::distance(std::u32string_view text) const
{
    if (size_ == 0) {
        return text.size();
    }
    if (text.empty()) {
        return size_;
    }
    std::vector<std::uint64_t> vp(words_, ~std::uint64_t {0});
    std::vector<std::uint64_t> vn(words_, 0);
    const std::uint64_t last = std::uint64_t {1} << ((size_ - 1) % 64);
    std::size_t dist = size_;

    for (char32_t c : text) {
        const std::uint64_t* pm = match_vector(c);
        std::uint64_t hp_carry = 1;
        std::uint64_t hn_carry = 0;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t x = pm[w] | hn_carry;
            std::uint64_t d0 = (((x & vp[w]) + vp[w]) ^ vp[w]) | x | vn[w];
            std::uint64_t hp = vn[w] | ~(d0 | vp[w]);
            std::uint64_t hn = d0 & vp[w];

            std::uint64_t hp_in = hp_carry;
            std::uint64_t hn_in = hn_carry;
            if (w + 1 < words_) {
                hp_carry = hp >> 63;
                hn_carry = hn >> 63;
            } else {
                if (hp & last) {
                    ++dist;
                } else if (hn & last) {
                    --dist;
                }
            }
            hp = (hp << 1) | hp_in;
            hn = (hn << 1) | hn_in;
            vp[w] = hn | ~(d0 | hp);
            vn[w] = hp & d0;
        }
    }
    return dist;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b)
{
    if (a.size() < b.size()) {
        std::swap(a, b);
    }
    // Pattern is the shorter string to minimise the number of words.
    return CachedLevenshtein(b).distance(a);
}

double similarity_from_distance(std::size_t distance, std::size_t len_a, std::size_t len_b) noexcept
{
    std::size_t longer = std::max(len_a, len_b);
    if (longer == 0) {
        return 1.0;
    }
    return 1.0 - static_cast<double>(distance) / static_cast<double>(longer);
}

double similarity(std::u32string_view a, std::u32string_view b)
{
    return similarity_from_distance(levenshtein(a, b), a.size(), b.size());
}

double similarity(const NormalizedTitle& a, const NormalizedTitle& b)
{
    return similarity(a.chars, b.chars);
}

bool meets_threshold(double score, double threshold) noexcept
{
    return score + kScoreEpsilon >= threshold;
}

std::size_t max_distance_for(std::size_t longer, double threshold) noexcept
{
    if (longer == 0) {
        return 0;
    }
    auto d = static_cast<std::size_t>(std::max(0.0, std::floor((1.0 - threshold) * static_cast<double>(longer))) + 1);
    d = std::min(d, longer);
    while (d > 0 && !meets_threshold(similarity_from_distance(d, longer, longer), threshold)) {
        --d;
    }
    return d;
}

} // namespace hallucheck
