#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hallucheck {

/// One bibliographic database entry. `id` is namespaced: "acl:", "arxiv:", "dblp:".
struct BibRecord {
    std::string id;
    std::string title;
    std::string norm_title;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::optional<std::string> venue;
    std::optional<std::string> url;

    friend bool operator==(const BibRecord&, const BibRecord&) = default;
};

/// Builds a record with norm_title derived from title.
[[nodiscard]] BibRecord make_record(std::string id, std::string title);

struct SourceDescriptor {
    std::string name; // namespace: "acl", "arxiv", "dblp"
    std::string path;
    std::uint64_t records = 0;
    std::uint64_t skipped = 0;
    std::optional<int> newest_year;

    friend bool operator==(const SourceDescriptor&, const SourceDescriptor&) = default;
};

struct IndexMeta {
    std::vector<SourceDescriptor> sources;
    std::string built_at;

    friend bool operator==(const IndexMeta&, const IndexMeta&) = default;
};

struct IngestStats {
    std::uint64_t records = 0;
    std::uint64_t skipped = 0;
    std::optional<int> newest_year;
};

using RecordSink = std::function<void(BibRecord&&)>;

/// Reads every *.xml volume file in an ACL Anthology data directory.
IngestStats ingest_acl_anthology(const std::string& dir, const RecordSink& sink);

/// arXiv metadata snapshot, one JSON object per line. Bad lines are skipped.
IngestStats ingest_arxiv_snapshot(const std::string& path, const RecordSink& sink);

IngestStats ingest_dblp(const std::string& path, const RecordSink& sink);

/// Length-bucketed character-trigram index over normalized titles.
class TitleIndex {
public:
    static constexpr std::uint32_t kFormatVersion = 1;
    static constexpr std::size_t kBucketWidth = 4;

    struct Posting {
        std::uint32_t record = 0;
        std::uint32_t count = 0;
        friend bool operator==(const Posting&, const Posting&) = default;
    };

    /// CSR layout: postings for grams[i] are postings[offsets[i] .. offsets[i+1]).
    struct Bucket {
        std::vector<std::uint32_t> members;
        std::vector<std::uint64_t> grams;
        std::vector<std::uint32_t> offsets;
        std::vector<Posting> postings;
        friend bool operator==(const Bucket&, const Bucket&) = default;
    };

    struct Audit {
        bool ok = true;
        std::vector<std::string> problems;
    };

    TitleIndex() = default;

    /// Throws Error(DuplicateId) when two records share an id.
    static TitleIndex build(std::vector<BibRecord> records, IndexMeta meta = {});

    /// Reassembles a persisted index; used by load_index.
    static TitleIndex from_parts(std::vector<BibRecord> records,
                                 std::map<std::uint32_t, Bucket> buckets, IndexMeta meta);

    [[nodiscard]] const BibRecord* get_by_id(std::string_view id) const;

    [[nodiscard]] std::span<const BibRecord> records() const noexcept { return records_; }
    [[nodiscard]] const std::u32string& chars(std::uint32_t record) const { return chars_[record]; }
    [[nodiscard]] const std::map<std::uint32_t, Bucket>& buckets() const noexcept { return buckets_; }
    [[nodiscard]] const IndexMeta& meta() const noexcept { return meta_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }

    /// Every record whose similarity to `query` can reach `threshold`
    /// (sound length and shared-trigram filters), sorted ascending.
    [[nodiscard]] std::vector<std::uint32_t> candidates(std::u32string_view query,
                                                        double threshold) const;

    /// Cross-checks postings against records.
    [[nodiscard]] Audit audit() const;

    [[nodiscard]] bool covers_namespace(std::string_view name) const;
    [[nodiscard]] std::optional<int> newest_year(std::string_view name = {}) const;

    friend bool operator==(const TitleIndex& a, const TitleIndex& b)
    {
        return a.records_ == b.records_ && a.buckets_ == b.buckets_ && a.meta_ == b.meta_;
    }

private:
    std::vector<BibRecord> records_; // sorted by id
    std::vector<std::u32string> chars_;
    std::map<std::uint32_t, Bucket> buckets_;
    IndexMeta meta_;
};

/// Trigram key over three code points (21 bits each).
[[nodiscard]] std::uint64_t trigram_key(char32_t a, char32_t b, char32_t c) noexcept;

/// Multiset of trigrams as sorted (key, count) pairs.
[[nodiscard]] std::vector<std::pair<std::uint64_t, std::uint32_t>> trigram_counts(std::u32string_view s);

void save_index(const TitleIndex& index, const std::string& dir);
[[nodiscard]] TitleIndex load_index(const std::string& dir);

} // namespace hallucheck
