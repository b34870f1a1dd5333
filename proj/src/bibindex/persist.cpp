#include "hallucheck/bibindex.hpp"
#include "hallucheck/error.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>

namespace hallucheck {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'H', 'C', 'I', 'X'};
constexpr const char* kFileName = "titles.hcix";

class Writer {
public:
    explicit Writer(std::ofstream& out) : out_(out) {}

    template <class T>
    void pod(T v)
    {
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }

    void str(const std::string& s)
    {
        pod<std::uint64_t>(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

    void opt_str(const std::optional<std::string>& s)
    {
        pod<std::uint8_t>(s ? 1 : 0);
        if (s) {
            str(*s);
        }
    }

    template <class T>
    void vec(const std::vector<T>& v)
    {
        pod<std::uint64_t>(v.size());
        out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
    }

private:
    std::ofstream& out_;
};

class Reader {
public:
    Reader(const std::string& data, std::string path) : data_(data), path_(std::move(path)) {}

    template <class T>
    T pod()
    {
        T v;
        std::memcpy(&v, take(sizeof v), sizeof v);
        return v;
    }

    std::string str()
    {
        auto n = pod<std::uint64_t>();
        const char* p = take(n);
        return std::string(p, n);
    }

    std::optional<std::string> opt_str()
    {
        if (pod<std::uint8_t>() == 0) {
            return std::nullopt;
        }
        return str();
    }

    template <class T>
    std::vector<T> vec()
    {
        auto n = pod<std::uint64_t>();
        if (n > (data_.size() - pos_) / sizeof(T)) {
            truncated();
        }
        std::vector<T> v(n);
        std::memcpy(v.data(), take(n * sizeof(T)), n * sizeof(T));
        return v;
    }

    [[nodiscard]] bool at_end() const noexcept { return pos_ == data_.size(); }

private:
    const char* take(std::size_t n)
    {
        if (n > data_.size() - pos_) {
            truncated();
        }
        const char* p = data_.data() + pos_;
        pos_ += n;
        return p;
    }

    [[noreturn]] void truncated() const
    {
        throw Error(ErrorCode::IndexLoadError, path_ + ": truncated index at byte " + std::to_string(pos_));
    }

    const std::string& data_;
    std::string path_;
    std::size_t pos_ = 0;
};

nlohmann::json meta_to_json(const IndexMeta& meta)
{
    nlohmann::json sources = nlohmann::json::array();
    for (const SourceDescriptor& s : meta.sources) {
        nlohmann::json j {{"name", s.name}, {"path", s.path}, {"records", s.records}, {"skipped", s.skipped}};
        j["newest_year"] = s.newest_year ? nlohmann::json(*s.newest_year) : nlohmann::json(nullptr);
        sources.push_back(std::move(j));
    }
    return {{"sources", sources}, {"built_at", meta.built_at}};
}

IndexMeta meta_from_json(const nlohmann::json& j)
{
    IndexMeta meta;
    meta.built_at = j.at("built_at").get<std::string>();
    for (const auto& s : j.at("sources")) {
        SourceDescriptor d;
        d.name = s.at("name").get<std::string>();
        d.path = s.at("path").get<std::string>();
        d.records = s.at("records").get<std::uint64_t>();
        d.skipped = s.at("skipped").get<std::uint64_t>();
        if (!s.at("newest_year").is_null()) {
            d.newest_year = s.at("newest_year").get<int>();
        }
        meta.sources.push_back(std::move(d));
    }
    return meta;
}

} // namespace

void save_index(const TitleIndex& index, const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
    }
    fs::path final_path = fs::path(dir) / kFileName;
    fs::path tmp_path = final_path;
    tmp_path += ".tmp";
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + tmp_path.string());
        }
        Writer w(out);
        out.write(kMagic, sizeof kMagic);
        w.pod<std::uint32_t>(TitleIndex::kFormatVersion);
        w.str(meta_to_json(index.meta()).dump());

        w.pod<std::uint64_t>(index.size());
        for (const BibRecord& r : index.records()) {
            w.str(r.id);
            w.str(r.title);
            w.str(r.norm_title);
            w.pod<std::uint64_t>(r.authors.size());
            for (const std::string& a : r.authors) {
                w.str(a);
            }
            w.pod<std::uint8_t>(r.year ? 1 : 0);
            w.pod<std::int32_t>(r.year.value_or(0));
            w.opt_str(r.venue);
            w.opt_str(r.url);
        }

        w.pod<std::uint64_t>(index.buckets().size());
        for (const auto& [key, b] : index.buckets()) {
            w.pod<std::uint32_t>(key);
            w.vec(b.members);
            w.vec(b.grams);
            w.vec(b.offsets);
            w.vec(b.postings);
        }
        out.flush();
        if (!out) {
            throw Error(ErrorCode::IoError, "write failed: " + tmp_path.string());
        }
    }
    fs::rename(tmp_path, final_path, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot replace " + final_path.string() + ": " + ec.message());
    }
}

TitleIndex load_index(const std::string& dir)
{
    fs::path path = fs::path(dir) / kFileName;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open index " + path.string());
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 8 || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0) {
        throw Error(ErrorCode::VersionMismatch, path.string() + ": not a title index (bad magic)");
    }
    Reader r(data, path.string());
    r.pod<std::uint32_t>(); // magic
    auto version = r.pod<std::uint32_t>();
    if (version != TitleIndex::kFormatVersion) {
        throw Error(ErrorCode::VersionMismatch, path.string() + ": index format version "
                        + std::to_string(version) + ", expected " + std::to_string(TitleIndex::kFormatVersion));
    }
    IndexMeta meta;
    try {
        meta = meta_from_json(nlohmann::json::parse(r.str()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IndexLoadError, path.string() + ": bad metadata: " + e.what());
    }

    auto n = r.pod<std::uint64_t>();
    std::vector<BibRecord> records;
    records.reserve(std::min<std::uint64_t>(n, data.size() / 8));
    for (std::uint64_t i = 0; i < n; ++i) {
        BibRecord rec;
        rec.id = r.str();
        rec.title = r.str();
        rec.norm_title = r.str();
        auto authors = r.pod<std::uint64_t>();
        for (std::uint64_t a = 0; a < authors; ++a) {
            rec.authors.push_back(r.str());
        }
        bool has_year = r.pod<std::uint8_t>() != 0;
        auto year = r.pod<std::int32_t>();
        if (has_year) {
            rec.year = year;
        }
        rec.venue = r.opt_str();
        rec.url = r.opt_str();
        records.push_back(std::move(rec));
    }

    std::map<std::uint32_t, TitleIndex::Bucket> buckets;
    auto nb = r.pod<std::uint64_t>();
    for (std::uint64_t i = 0; i < nb; ++i) {
        auto key = r.pod<std::uint32_t>();
        TitleIndex::Bucket b;
        b.members = r.vec<std::uint32_t>();
        b.grams = r.vec<std::uint64_t>();
        b.offsets = r.vec<std::uint32_t>();
        b.postings = r.vec<TitleIndex::Posting>();
        buckets.emplace(key, std::move(b));
    }
    if (!r.at_end()) {
        throw Error(ErrorCode::IndexLoadError, path.string() + ": trailing bytes after index");
    }
    TitleIndex index = TitleIndex::from_parts(std::move(records), std::move(buckets), std::move(meta));
    if (auto audit = index.audit(); !audit.ok) {
        throw Error(ErrorCode::IndexLoadError, path.string() + ": " + audit.problems.front());
    }
    return index;
}

} // namespace hallucheck
