#include "hallucheck/error.hpp"
#include "hallucheck/triage.hpp"
#include "hallucheck/util.hpp"

#include <nlohmann/json.hpp>

#include <spdlog/spdlog.h>

#include <charconv>
#include <cstdio>
#include <ctime>

namespace hallucheck {

using nlohmann::json;

namespace {

std::optional<std::string> record_link(const std::string& id)
{
    auto rest = [&](std::size_t n) { return id.substr(n); };
    if (id.starts_with("acl:")) {
        return "https://aclanthology.org/" + rest(4) + "/";
    }
    if (id.starts_with("arxiv:")) {
        return "https://arxiv.org/abs/" + rest(6);
    }
    if (id.starts_with("dblp:")) {
        return "https://dblp.org/rec/" + rest(5);
    }
    return std::nullopt;
}

json near_matches(const ReportedFlag& rf, std::size_t limit)
{
    json out = json::array();
    if (!rf.flag.match) {
        return out;
    }
    std::vector<ScoredRecord> all;
    if (rf.flag.match->best) {
        all.push_back(*rf.flag.match->best);
    }
    all.insert(all.end(), rf.flag.match->runners_up.begin(), rf.flag.match->runners_up.end());
    for (std::size_t i = 0; i < all.size() && i < limit; ++i) {
        auto link = record_link(all[i].id);
        out.push_back({{"id", all[i].id}, {"score", all[i].score}, {"link", link ? json(*link) : json(nullptr)}});
    }
    return out;
}

json error_body(std::string_view error, std::string_view reason, std::string_view message)
{
    return {{"error", error}, {"reason", reason}, {"message", message}};
}

ApiResponse respond(int status, const json& body)
{
    return {status, body.dump()};
}

json hit_rows_json(const std::vector<HitRateRow>& rows)
{
    json out = json::array();
    for (const HitRateRow& r : rows) {
        out.push_back({
            {"freq", r.bin_label()},
            {"num_candidates", r.num_candidates},
            {"cum_candidates", r.cum_candidates},
            {"num_hallucited", r.num_hallucited},
            {"cum_hallucited", r.cum_hallucited},
            {"hit_rate", r.hit_rate},
            {"cum_hit_rate", r.cum_hit_rate},
        });
    }
    return out;
}

json status_json(const PaperStatus& st)
{
    return {{"state", to_string(st.state)}, {"skipped_ordinals", st.skipped_ordinals}};
}

std::optional<std::int64_t> parse_iso_millis(const std::string& ts)
{
    std::tm tm {};
    int ms = 0;
    if (std::sscanf(ts.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                    &tm.tm_min, &tm.tm_sec, &ms)
        != 7) {
        return std::nullopt;
    }
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return static_cast<std::int64_t>(timegm(&tm)) * 1000 + ms;
}

} // namespace

TriageService::TriageService(ScanReport report, std::string log_path, TriageOptions options)
    : report_(std::move(report)), options_(options), log_(std::move(log_path))
{
    verdicts_ = log_.replay();
    for (const Verdict& v : verdicts_) {
        // New stamps must sort after everything already in the log.
        if (auto ms = parse_iso_millis(v.timestamp)) {
            last_stamp_ms_ = std::max(last_stamp_ms_, *ms);
        }
    }
    rebuild();
    spdlog::info("replayed {} verdicts from {}", verdicts_.size(), log_.path());
}

void TriageService::rebuild()
{
    statuses_ = derive_statuses(report_, verdicts_, options_.exhaustive);
}

std::map<std::string, PaperStatus> TriageService::statuses() const
{
    std::shared_lock lock(state_mutex_);
    return statuses_;
}

ApiResponse TriageService::queue() const
{
    std::shared_lock lock(state_mutex_);
    json items = json::array();
    for (const QueueItem& q : queue_order(report_, statuses_, options_.exhaustive)) {
        const CandidateFlag& f = q.flag->flag;
        items.push_back({
            {"paper", q.paper->source_id},
            {"ordinal", q.flag->ordinal()},
            {"raw", f.raw()},
            {"kind", to_string(f.kind)},
            {"title", f.citation.title ? json(*f.citation.title) : json(nullptr)},
            {"paper_flag_count", q.paper->flags.size()},
            {"near_matches", near_matches(*q.flag, options_.near_matches)},
            {"db_coverage_note", f.db_coverage_note ? json(*f.db_coverage_note) : json(nullptr)},
            {"external_annotation", q.flag->external ? json(q.flag->external->annotation) : json(nullptr)},
        });
    }
    return respond(200, {{"items", items}, {"count", items.size()}});
}

ApiResponse TriageService::paper(const std::string& id) const
{
    std::shared_lock lock(state_mutex_);
    const PaperEntry* p = report_.paper(id);
    if (!p) {
        return respond(404, error_body("not_found", "unknown_paper", "no paper '" + id + "' in the report"));
    }
    json flags = json::array();
    for (const ReportedFlag& f : p->flags) {
        flags.push_back(flag_to_json(f));
    }
    const PaperStatus& st = statuses_.at(id);
    json verdicts = json::array();
    for (const Verdict& v : st.effective) {
        verdicts.push_back(verdict_to_json(v));
    }
    json history = json::array();
    for (const Verdict& v : verdicts_) {
        if (v.paper == id) {
            history.push_back(verdict_to_json(v));
        }
    }
    return respond(200, {
                            {"paper", p->source_id},
                            {"path", p->path},
                            {"citation_total", p->citation_total},
                            {"tier", to_string(p->tier)},
                            {"error", p->error ? json(*p->error) : json(nullptr)},
                            {"flags", flags},
                            {"status", status_json(st)},
                            {"verdicts", verdicts},
                            {"history", history},
                        });
}

ApiResponse TriageService::progress() const
{
    std::shared_lock lock(state_mutex_);
    std::uint64_t pending = 0;
    std::uint64_t hallucited = 0;
    std::uint64_t cleared = 0;
    for (const PaperEntry& p : report_.papers) {
        if (p.flags.empty() || p.error) {
            continue;
        }
        switch (statuses_.at(p.source_id).state) {
        case PaperState::Pending: ++pending; break;
        case PaperState::HalluCited: ++hallucited; break;
        case PaperState::Cleared: ++cleared; break;
        }
    }
    return respond(200, {
                            {"pending", pending},
                            {"hallucited", hallucited},
                            {"cleared", cleared},
                            {"papers_flagged", pending + hallucited + cleared},
                            {"verdicts", verdicts_.size()},
                            {"hit_rate", hit_rows_json(live_hit_rate(report_, statuses_, options_.top_bin))},
                        });
}

ApiResponse TriageService::links(const std::string& paper, const std::string& ordinal) const
{
    std::size_t ord = 0;
    auto [ptr, ec] = std::from_chars(ordinal.data(), ordinal.data() + ordinal.size(), ord);
    if (ec != std::errc() || ptr != ordinal.data() + ordinal.size()) {
        return respond(400, error_body("bad_request", "bad_ordinal", "ordinal must be a non-negative integer"));
    }
    const PaperEntry* p = report_.paper(paper);
    if (!p) {
        return respond(404, error_body("not_found", "unknown_paper", "no paper '" + paper + "' in the report"));
    }
    const ReportedFlag* f = p->flag_at(ord);
    if (!f) {
        return respond(404, error_body("not_found", "unknown_candidate", "no candidate at ordinal " + ordinal));
    }
    json links = json::array();
    for (const SearchLink& l : search_links(*f)) {
        links.push_back({{"label", l.label}, {"url", l.url}});
    }
    return respond(200, {{"paper", paper}, {"ordinal", ord}, {"links", links}});
}

ApiResponse TriageService::post_verdict(const std::string& body)
{
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) {
        return respond(400, error_body("bad_request", "invalid_json", "request body is not valid JSON"));
    }
    Verdict v;
    try {
        v = verdict_from_json(j);
    } catch (const Error& e) {
        return respond(422, error_body("validation_failed", "malformed_verdict", e.what()));
    }
    if (auto failure = validate_verdict(v, report_)) {
        return respond(422, error_body("validation_failed", failure->reason, failure->message));
    }

    std::lock_guard writer(write_mutex_);
    std::int64_t now = std::max(util::epoch_millis_now(), last_stamp_ms_ + 1);
    last_stamp_ms_ = now;
    v.timestamp = util::iso_timestamp(now);
    try {
        log_.append(v);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return respond(500, error_body("io_error", "log_write_failed", e.what()));
    }
    PaperStatus st;
    {
        std::unique_lock lock(state_mutex_);
        verdicts_.push_back(v);
        rebuild();
        st = statuses_.at(v.paper);
    }
    return respond(201, {{"verdict", verdict_to_json(v)}, {"status", status_json(st)}});
}

} // namespace hallucheck
