#include "hallucheck/bibindex.hpp"
#include "hallucheck/error.hpp"
#include "hallucheck/matcher.hpp"
#include "hallucheck/util.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace hallucheck {

namespace {

std::uint32_t bucket_of(std::size_t length) noexcept
{
    return static_cast<std::uint32_t>(length / TitleIndex::kBucketWidth);
}

/// Shared-trigram count a record of length `m` needs to stay within reach of
/// a length-`n` query at threshold t. Non-positive means no filtering.
long required_shared(std::size_t n, std::size_t m, double threshold)
{
    std::size_t longer = std::max(n, m);
    long k = static_cast<long>(max_distance_for(longer, threshold));
    return static_cast<long>(longer) - 2 - 3 * k;
}

std::vector<std::uint32_t>& scratch_counts(std::size_t size)
{
    thread_local std::vector<std::uint32_t> counts;
    if (counts.size() < size) {
        counts.assign(size, 0);
    }
    return counts;
}

} // namespace

BibRecord make_record(std::string id, std::string title)
{
    BibRecord rec;
    rec.id = std::move(id);
    rec.title = std::move(title);
    rec.norm_title = normalize_title(rec.title).text;
    return rec;
}

std::uint64_t trigram_key(char32_t a, char32_t b, char32_t c) noexcept
{
    auto mask = [](char32_t x) { return static_cast<std::uint64_t>(x) & 0x1FFFFF; };
    return (mask(a) << 42) | (mask(b) << 21) | mask(c);
}

std::vector<std::pair<std::uint64_t, std::uint32_t>> trigram_counts(std::u32string_view s)
{
    std::vector<std::uint64_t> keys;
    if (s.size() >= 3) {
        keys.reserve(s.size() - 2);
        for (std::size_t i = 0; i + 2 < s.size(); ++i) {
            keys.push_back(trigram_key(s[i], s[i + 1], s[i + 2]));
        }
    }
    std::sort(keys.begin(), keys.end());
    std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
    for (std::uint64_t k : keys) {
        if (!out.empty() && out.back().first == k) {
            ++out.back().second;
        } else {
            out.emplace_back(k, 1);
        }
    }
    return out;
}

TitleIndex TitleIndex::build(std::vector<BibRecord> records, IndexMeta meta)
{
    std::sort(records.begin(), records.end(), [](const BibRecord& a, const BibRecord& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].id == records[i - 1].id) {
            throw Error(ErrorCode::DuplicateId, "duplicate record id: " + records[i].id);
        }
    }

    TitleIndex index;
    index.meta_ = std::move(meta);
    index.chars_.reserve(records.size());
    for (const BibRecord& r : records) {
        index.chars_.push_back(util::decode_utf8(r.norm_title));
    }

    // Gather (gram, record, count) per bucket, then lay out CSR arrays.
    std::map<std::uint32_t, std::vector<std::pair<std::uint64_t, Posting>>> raw;
    for (std::uint32_t r = 0; r < records.size(); ++r) {
        std::uint32_t b = bucket_of(index.chars_[r].size());
        index.buckets_[b].members.push_back(r);
        auto& list = raw[b];
        for (const auto& [gram, count] : trigram_counts(index.chars_[r])) {
            list.push_back({gram, Posting {r, count}});
        }
    }
    for (auto& [b, list] : raw) {
        std::sort(list.begin(), list.end(), [](const auto& x, const auto& y) {
            return x.first != y.first ? x.first < y.first : x.second.record < y.second.record;
        });
        Bucket& bucket = index.buckets_[b];
        bucket.postings.reserve(list.size());
        for (const auto& [gram, posting] : list) {
            if (bucket.grams.empty() || bucket.grams.back() != gram) {
                bucket.grams.push_back(gram);
                bucket.offsets.push_back(static_cast<std::uint32_t>(bucket.postings.size()));
            }
            bucket.postings.push_back(posting);
        }
        bucket.offsets.push_back(static_cast<std::uint32_t>(bucket.postings.size()));
    }
    for (auto& [b, bucket] : index.buckets_) {
        if (bucket.offsets.empty()) {
            bucket.offsets.push_back(0);
        }
    }
    index.records_ = std::move(records);
    return index;
}

TitleIndex TitleIndex::from_parts(std::vector<BibRecord> records, std::map<std::uint32_t, Bucket> buckets,
                                  IndexMeta meta)
{
    TitleIndex index;
    index.chars_.reserve(records.size());
    for (const BibRecord& r : records) {
        index.chars_.push_back(util::decode_utf8(r.norm_title));
    }
    index.records_ = std::move(records);
    index.buckets_ = std::move(buckets);
    index.meta_ = std::move(meta);
    return index;
}

const BibRecord* TitleIndex::get_by_id(std::string_view id) const
{
    auto it = std::lower_bound(records_.begin(), records_.end(), id,
                               [](const BibRecord& r, std::string_view key) { return r.id < key; });
    if (it == records_.end() || it->id != id) {
        return nullptr;
    }
    return &*it;
}

std::vector<std::uint32_t> TitleIndex::candidates(std::u32string_view query, double threshold) const
{
    std::vector<std::uint32_t> out;
    if (records_.empty()) {
        return out;
    }
    const std::size_t n = query.size();
    if (threshold <= 0.0) {
        out.resize(records_.size());
        std::iota(out.begin(), out.end(), 0u);
        return out;
    }

    // Lengths m that can still reach the threshold: m ≥ n − k(n) below,
    // m − n ≤ k(m) above.
    std::size_t lo = n - std::min(n, max_distance_for(n, threshold));
    std::size_t max_len = (buckets_.rbegin()->first + 1) * kBucketWidth;
    std::size_t hi = n;
    while (hi + 1 <= max_len && hi + 1 - n <= max_distance_for(hi + 1, threshold)) {
        ++hi;
    }

    auto q_grams = trigram_counts(query);
    std::vector<std::uint32_t>& counts = scratch_counts(records_.size());
    std::vector<std::uint32_t> touched;

    for (auto it = buckets_.lower_bound(bucket_of(lo)); it != buckets_.end() && it->first <= bucket_of(hi); ++it) {
        const Bucket& bucket = it->second;
        bool need_counts = false;
        for (std::uint32_t r : bucket.members) {
            std::size_t m = chars_[r].size();
            if (m >= lo && m <= hi && required_shared(n, m, threshold) > 0) {
                need_counts = true;
                break;
            }
        }
        if (need_counts) {
            for (const auto& [gram, qc] : q_grams) {
                auto g = std::lower_bound(bucket.grams.begin(), bucket.grams.end(), gram);
                if (g == bucket.grams.end() || *g != gram) {
                    continue;
                }
                auto gi = static_cast<std::size_t>(g - bucket.grams.begin());
                for (std::uint32_t p = bucket.offsets[gi]; p < bucket.offsets[gi + 1]; ++p) {
                    const Posting& post = bucket.postings[p];
                    if (counts[post.record] == 0) {
                        touched.push_back(post.record);
                    }
                    counts[post.record] += std::min(qc, post.count);
                }
            }
        }
        for (std::uint32_t r : bucket.members) {
            std::size_t m = chars_[r].size();
            if (m < lo || m > hi) {
                continue;
            }
            long need = required_shared(n, m, threshold);
            if (need <= 0 || static_cast<long>(counts[r]) >= need) {
                out.push_back(r);
            }
        }
        for (std::uint32_t r : touched) {
            counts[r] = 0;
        }
        touched.clear();
    }
    std::sort(out.begin(), out.end());
    return out;
}

TitleIndex::Audit TitleIndex::audit() const
{
    Audit result;
    auto problem = [&](std::string msg) {
        result.ok = false;
        if (result.problems.size() < 20) {
            result.problems.push_back(std::move(msg));
        }
    };
    if (chars_.size() != records_.size()) {
        problem("character cache size differs from record count");
        return result;
    }
    for (std::size_t i = 1; i < records_.size(); ++i) {
        if (!(records_[i - 1].id < records_[i].id)) {
            problem("records not strictly ordered by id at " + records_[i].id);
        }
    }

    std::vector<std::uint8_t> seen_member(records_.size(), 0);
    for (const auto& [b, bucket] : buckets_) {
        if (bucket.offsets.size() != bucket.grams.size() + 1 || bucket.offsets.back() != bucket.postings.size()) {
            problem("bucket " + std::to_string(b) + ": offsets do not frame postings");
            continue;
        }
        if (!std::is_sorted(bucket.offsets.begin(), bucket.offsets.end())
            || !std::is_sorted(bucket.grams.begin(), bucket.grams.end())) {
            problem("bucket " + std::to_string(b) + ": unsorted grams or offsets");
            continue;
        }
        for (std::uint32_t r : bucket.members) {
            if (r >= records_.size()) {
                problem("bucket " + std::to_string(b) + ": member out of range");
                continue;
            }
            if (bucket_of(chars_[r].size()) != b) {
                problem(records_[r].id + " sits in the wrong length bucket");
            }
            ++seen_member[r];
        }
        for (const Posting& p : bucket.postings) {
            if (p.record >= records_.size()) {
                problem("bucket " + std::to_string(b) + ": posting references a missing record");
            } else if (bucket_of(chars_[p.record].size()) != b) {
                problem("posting for " + records_[p.record].id + " in a foreign bucket");
            }
        }
    }
    for (std::uint32_t r = 0; r < records_.size(); ++r) {
        if (seen_member[r] != 1) {
            problem(records_[r].id + " is listed in " + std::to_string(seen_member[r]) + " buckets");
            continue;
        }
        if (normalize_title(records_[r].title).text != records_[r].norm_title) {
            problem(records_[r].id + ": norm_title is not the normalized title");
        }
        const Bucket& bucket = buckets_.at(bucket_of(chars_[r].size()));
        for (const auto& [gram, count] : trigram_counts(chars_[r])) {
            auto g = std::lower_bound(bucket.grams.begin(), bucket.grams.end(), gram);
            bool found = false;
            if (g != bucket.grams.end() && *g == gram) {
                auto gi = static_cast<std::size_t>(g - bucket.grams.begin());
                for (std::uint32_t p = bucket.offsets[gi]; p < bucket.offsets[gi + 1]; ++p) {
                    if (bucket.postings[p].record == r) {
                        found = bucket.postings[p].count == count;
                        break;
                    }
                }
            }
            if (!found) {
                problem(records_[r].id + " is not reachable from one of its trigrams");
                break;
            }
        }
    }
    return result;
}

bool TitleIndex::covers_namespace(std::string_view name) const
{
    std::string prefix = std::string(name) + ":";
    auto it = std::lower_bound(records_.begin(), records_.end(), prefix,
                               [](const BibRecord& r, const std::string& key) { return r.id < key; });
    return it != records_.end() && it->id.starts_with(prefix);
}

std::optional<int> TitleIndex::newest_year(std::string_view name) const
{
    std::optional<int> newest;
    bool described = false;
    for (const SourceDescriptor& s : meta_.sources) {
        if (!name.empty() && s.name != name) {
            continue;
        }
        described = true;
        if (s.newest_year && (!newest || *s.newest_year > *newest)) {
            newest = s.newest_year;
        }
    }
    if (described) {
        return newest;
    }
    std::string prefix = name.empty() ? std::string() : std::string(name) + ":";
    for (const BibRecord& r : records_) {
        if (r.year && r.id.starts_with(prefix) && (!newest || *r.year > *newest)) {
            newest = r.year;
        }
    }
    return newest;
}

} // namespace hallucheck
