#pragma once

#include "hallucheck/report.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace hallucheck {

enum class Label { Exists, HalluCitation, Unsure };

[[nodiscard]] std::string_view to_string(Label l) noexcept;
[[nodiscard]] std::optional<Label> label_from_string(std::string_view s) noexcept;

/// Attributes a verifier may mark as disagreeing with every plausible source.
inline const std::set<std::string> kKeyAttributes {"title", "authors", "venue", "pages", "year", "identifier"};

struct Verdict {
    std::string paper;
    std::size_t ordinal = 0;
    Label label = Label::Unsure;
    std::set<std::string> mismatches;
    bool no_corresponding_work = false;
    std::optional<std::string> evidence_url;
    std::optional<std::string> note;
    std::string verifier;
    std::string timestamp;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

[[nodiscard]] nlohmann::json verdict_to_json(const Verdict& v);
/// Throws Error(ValidationError) for missing or ill-typed fields.
[[nodiscard]] Verdict verdict_from_json(const nlohmann::json& j);
[[nodiscard]] std::string serialize_verdict(const Verdict& v);

struct ValidationFailure {
    std::string reason; // machine-readable
    std::string message;
};

/// Checks the verdict against the report and the two-attribute rule.
[[nodiscard]] std::optional<ValidationFailure> validate_verdict(const Verdict& v, const ScanReport& report);

/// Append-only JSON Lines file; each append is flushed and synced before returning.
class VerdictLog {
public:
    explicit VerdictLog(std::string path);
    ~VerdictLog();
    VerdictLog(const VerdictLog&) = delete;
    VerdictLog& operator=(const VerdictLog&) = delete;

    /// Throws Error(CorruptLog) naming the first bad line.
    [[nodiscard]] std::vector<Verdict> replay() const;
    void append(const Verdict& v);
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    int fd_ = -1;
    std::mutex mutex_;
};

enum class PaperState { Pending, HalluCited, Cleared };
[[nodiscard]] std::string_view to_string(PaperState s) noexcept;

struct PaperStatus {
    std::string source_id;
    PaperState state = PaperState::Pending;
    std::vector<std::size_t> skipped_ordinals;
    /// Effective verdict per (ordinal, verifier).
    std::vector<Verdict> effective;
};

/// Last write per (paper, ordinal, verifier) by timestamp; equal timestamps
/// fall back to the serialized form so the result ignores log order.
[[nodiscard]] std::vector<Verdict> effective_verdicts(const std::vector<Verdict>& log);

[[nodiscard]] std::map<std::string, PaperStatus> derive_statuses(const ScanReport& report,
                                                                 const std::vector<Verdict>& log, bool exhaustive);

struct QueueItem {
    const PaperEntry* paper = nullptr;
    const ReportedFlag* flag = nullptr;
};

/// Unreviewed candidates of Pending papers (and of HalluCited papers in
/// exhaustive mode), papers by flag count descending then id, ordinals ascending.
[[nodiscard]] std::vector<QueueItem> queue_order(const ScanReport& report,
                                                 const std::map<std::string, PaperStatus>& statuses, bool exhaustive);

[[nodiscard]] std::vector<HitRateRow> live_hit_rate(const ScanReport& report,
                                                    const std::map<std::string, PaperStatus>& statuses,
                                                    std::uint64_t top_bin);

struct SearchLink {
    std::string label;
    std::string url;
};

[[nodiscard]] std::vector<SearchLink> search_links(const ReportedFlag& flag);

struct TriageOptions {
    bool exhaustive = false;
    std::uint64_t top_bin = 9;
    std::size_t near_matches = 5;
};

struct ApiResponse {
    int status = 200;
    std::string body;
};

/// Request handling behind the JSON API. Reads run concurrently; verdict
/// writes are serialized and durable before the response is produced.
class TriageService {
public:
    TriageService(ScanReport report, std::string log_path, TriageOptions options = {});

    [[nodiscard]] ApiResponse queue() const;
    [[nodiscard]] ApiResponse paper(const std::string& id) const;
    [[nodiscard]] ApiResponse progress() const;
    [[nodiscard]] ApiResponse links(const std::string& paper, const std::string& ordinal) const;
    [[nodiscard]] ApiResponse post_verdict(const std::string& body);

    [[nodiscard]] std::map<std::string, PaperStatus> statuses() const;

private:
    void rebuild();

    ScanReport report_;
    TriageOptions options_;
    VerdictLog log_;
    std::vector<Verdict> verdicts_;
    std::map<std::string, PaperStatus> statuses_;
    std::int64_t last_stamp_ms_ = 0;
    mutable std::shared_mutex state_mutex_;
    std::mutex write_mutex_;
};

inline constexpr const char* kSchemaHeader = "x-hallucheck-schema";

/// HTTP front end. Throws Error(BindError) when the address cannot be bound.
class TriageServer {
public:
    TriageServer(TriageService& service, std::string ui_dir = {});
    ~TriageServer();

    /// Binds `host:port` (port 0 picks a free one) and returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// "host:port" → pair; throws Error(BindError) on a malformed address.
[[nodiscard]] std::pair<std::string, int> parse_bind_address(const std::string& addr);

} // namespace hallucheck
