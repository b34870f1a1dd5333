#include "hallucheck/error.hpp"
#include "hallucheck/triage.hpp"
#include "hallucheck/util.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

namespace hallucheck {

using nlohmann::json;

std::string_view to_string(Label l) noexcept
{
    switch (l) {
    case Label::Exists: return "Exists";
    case Label::HalluCitation: return "HalluCitation";
    case Label::Unsure: return "Unsure";
    }
    return "Unsure";
}

std::optional<Label> label_from_string(std::string_view s) noexcept
{
    for (Label l : {Label::Exists, Label::HalluCitation, Label::Unsure}) {
        if (to_string(l) == s) {
            return l;
        }
    }
    return std::nullopt;
}

json verdict_to_json(const Verdict& v)
{
    return {
        {"paper", v.paper},
        {"ordinal", v.ordinal},
        {"label", to_string(v.label)},
        {"mismatches", v.mismatches},
        {"no_corresponding_work", v.no_corresponding_work},
        {"evidence_url", v.evidence_url ? json(*v.evidence_url) : json(nullptr)},
        {"note", v.note ? json(*v.note) : json(nullptr)},
        {"verifier", v.verifier},
        {"timestamp", v.timestamp},
    };
}

Verdict verdict_from_json(const json& j)
{
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ValidationError, what); };
    if (!j.is_object()) {
        fail("verdict must be a JSON object");
    }
    auto str = [&](const char* key, bool required) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) {
            if (required) {
                fail(std::string("missing field '") + key + "'");
            }
            return std::nullopt;
        }
        if (!it->is_string()) {
            fail(std::string("field '") + key + "' must be a string");
        }
        return it->get<std::string>();
    };

    Verdict v;
    v.paper = *str("paper", true);
    auto ord = j.find("ordinal");
    if (ord == j.end() || !ord->is_number_integer() || ord->get<std::int64_t>() < 0) {
        fail("field 'ordinal' must be a non-negative integer");
    }
    v.ordinal = ord->get<std::size_t>();
    auto label = label_from_string(*str("label", true));
    if (!label) {
        fail("field 'label' must be one of Exists, HalluCitation, Unsure");
    }
    v.label = *label;
    if (auto m = j.find("mismatches"); m != j.end() && !m->is_null()) {
        if (!m->is_array()) {
            fail("field 'mismatches' must be an array of attribute names");
        }
        for (const json& a : *m) {
            if (!a.is_string()) {
                fail("field 'mismatches' must be an array of attribute names");
            }
            v.mismatches.insert(a.get<std::string>());
        }
    }
    std::optional<bool> no_work;
    if (auto n = j.find("no_corresponding_work"); n != j.end() && !n->is_null()) {
        if (!n->is_boolean()) {
            fail("field 'no_corresponding_work' must be a boolean");
        }
        no_work = n->get<bool>();
    }
    if (auto f = j.find("found"); f != j.end() && !f->is_null()) {
        if (!f->is_boolean()) {
            fail("field 'found' must be a boolean");
        }
        if (no_work && *no_work == f->get<bool>()) {
            fail("fields 'found' and 'no_corresponding_work' contradict each other");
        }
        no_work = !f->get<bool>();
    }
    v.no_corresponding_work = no_work.value_or(false);
    v.evidence_url = str("evidence_url", false);
    v.note = str("note", false);
    v.verifier = str("verifier", false).value_or("");
    v.timestamp = str("timestamp", false).value_or("");
    return v;
}

std::string serialize_verdict(const Verdict& v)
{
    return verdict_to_json(v).dump();
}

std::optional<ValidationFailure> validate_verdict(const Verdict& v, const ScanReport& report)
{
    if (util::trim(v.verifier).empty()) {
        return ValidationFailure {"missing_verifier", "a verifier id is required"};
    }
    const PaperEntry* paper = report.paper(v.paper);
    if (!paper) {
        return ValidationFailure {"unknown_paper", "no paper '" + v.paper + "' in the report"};
    }
    if (!paper->flag_at(v.ordinal)) {
        return ValidationFailure {"unknown_candidate", "paper '" + v.paper + "' has no candidate at ordinal "
                                                           + std::to_string(v.ordinal)};
    }
    for (const std::string& m : v.mismatches) {
        if (!kKeyAttributes.count(m)) {
            return ValidationFailure {"unknown_attribute", "'" + m + "' is not a key attribute"};
        }
    }
    if (v.label == Label::HalluCitation && !v.no_corresponding_work && v.mismatches.size() < 2) {
        return ValidationFailure {"insufficient_evidence",
                                  "a HalluCitation verdict needs either no corresponding work or at least two "
                                  "mismatched key attributes (title, authors, venue, pages, year, identifier)"};
    }
    return std::nullopt;
}

VerdictLog::VerdictLog(std::string path) : path_(std::move(path))
{
    fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        throw Error(ErrorCode::IoError, "cannot open verdict log " + path_ + ": " + std::strerror(errno));
    }
}

VerdictLog::~VerdictLog()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

std::vector<Verdict> VerdictLog::replay() const
{
    std::string text = util::read_file(path_);
    std::vector<Verdict> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_no;
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            throw Error(ErrorCode::CorruptLog, path_ + ":" + std::to_string(line_no) + ": unterminated last line");
        }
        std::string_view line = util::trim(std::string_view(text).substr(pos, nl - pos));
        pos = nl + 1;
        if (line.empty()) {
            continue;
        }
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw Error(ErrorCode::CorruptLog, path_ + ":" + std::to_string(line_no) + ": not valid JSON");
        }
        try {
            out.push_back(verdict_from_json(j));
        } catch (const Error& e) {
            throw Error(ErrorCode::CorruptLog, path_ + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void VerdictLog::append(const Verdict& v)
{
    std::string line = serialize_verdict(v) + "\n";
    std::lock_guard lock(mutex_);
    const char* p = line.data();
    std::size_t left = line.size();
    while (left > 0) {
        ssize_t n = ::write(fd_, p, left);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw Error(ErrorCode::IoError, "cannot append to " + path_ + ": " + std::strerror(errno));
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) {
        throw Error(ErrorCode::IoError, "cannot sync " + path_ + ": " + std::strerror(errno));
    }
}

std::string_view to_string(PaperState s) noexcept
{
    switch (s) {
    case PaperState::Pending: return "Pending";
    case PaperState::HalluCited: return "HalluCited";
    case PaperState::Cleared: return "Cleared";
    }
    return "Pending";
}

std::vector<Verdict> effective_verdicts(const std::vector<Verdict>& log)
{
    using Key = std::tuple<std::string, std::size_t, std::string>;
    std::map<Key, std::pair<const Verdict*, std::string>> best;
    for (const Verdict& v : log) {
        Key key {v.paper, v.ordinal, v.verifier};
        std::string ser = serialize_verdict(v);
        auto it = best.find(key);
        if (it == best.end()) {
            best.emplace(key, std::make_pair(&v, std::move(ser)));
            continue;
        }
        const Verdict& cur = *it->second.first;
        if (std::tie(v.timestamp, ser) > std::tie(cur.timestamp, it->second.second)) {
            it->second = {&v, std::move(ser)};
        }
    }
    std::vector<Verdict> out;
    out.reserve(best.size());
    for (const auto& [key, entry] : best) {
        out.push_back(*entry.first);
    }
    return out;
}

std::map<std::string, PaperStatus> derive_statuses(const ScanReport& report, const std::vector<Verdict>& log,
                                                   bool exhaustive)
{
    std::map<std::string, std::vector<Verdict>> by_paper;
    for (Verdict& v : effective_verdicts(log)) {
        const PaperEntry* p = report.paper(v.paper);
        if (p && p->flag_at(v.ordinal)) {
            by_paper[v.paper].push_back(std::move(v));
        }
    }
    std::map<std::string, PaperStatus> out;
    for (const PaperEntry& p : report.papers) {
        PaperStatus st;
        st.source_id = p.source_id;
        auto it = by_paper.find(p.source_id);
        if (it != by_paper.end()) {
            st.effective = std::move(it->second);
        }
        std::set<std::size_t> reviewed;
        std::set<std::size_t> exists;
        bool hallucited = false;
        for (const Verdict& v : st.effective) {
            reviewed.insert(v.ordinal);
            if (v.label == Label::HalluCitation) {
                hallucited = true;
            } else if (v.label == Label::Exists) {
                exists.insert(v.ordinal);
            }
        }
        if (hallucited) {
            st.state = PaperState::HalluCited;
            if (!exhaustive) {
                for (const ReportedFlag& f : p.flags) {
                    if (!reviewed.count(f.ordinal())) {
                        st.skipped_ordinals.push_back(f.ordinal());
                    }
                }
            }
        } else {
            // Unsure keeps the paper open: only confirmed existence clears it.
            bool all_exist = std::all_of(p.flags.begin(), p.flags.end(),
                                         [&](const ReportedFlag& f) { return exists.count(f.ordinal()) > 0; });
            st.state = all_exist ? PaperState::Cleared : PaperState::Pending;
        }
        std::sort(st.skipped_ordinals.begin(), st.skipped_ordinals.end());
        out.emplace(p.source_id, std::move(st));
    }
    return out;
}

std::vector<QueueItem> queue_order(const ScanReport& report, const std::map<std::string, PaperStatus>& statuses,
                                   bool exhaustive)
{
    std::vector<const PaperEntry*> papers;
    for (const PaperEntry& p : report.papers) {
        if (p.flags.empty() || p.error) {
            continue;
        }
        auto st = statuses.find(p.source_id);
        PaperState state = st == statuses.end() ? PaperState::Pending : st->second.state;
        if (state == PaperState::Pending || (exhaustive && state == PaperState::HalluCited)) {
            papers.push_back(&p);
        }
    }
    std::sort(papers.begin(), papers.end(), [](const PaperEntry* a, const PaperEntry* b) {
        if (a->flags.size() != b->flags.size()) {
            return a->flags.size() > b->flags.size();
        }
        return a->source_id < b->source_id;
    });
    std::vector<QueueItem> out;
    for (const PaperEntry* p : papers) {
        std::set<std::size_t> reviewed;
        if (auto st = statuses.find(p->source_id); st != statuses.end()) {
            for (const Verdict& v : st->second.effective) {
                reviewed.insert(v.ordinal);
            }
        }
        std::vector<const ReportedFlag*> flags;
        for (const ReportedFlag& f : p->flags) {
            if (!reviewed.count(f.ordinal())) {
                flags.push_back(&f);
            }
        }
        std::sort(flags.begin(), flags.end(),
                  [](const ReportedFlag* a, const ReportedFlag* b) { return a->ordinal() < b->ordinal(); });
        for (const ReportedFlag* f : flags) {
            out.push_back({p, f});
        }
    }
    return out;
}

std::vector<HitRateRow> live_hit_rate(const ScanReport& report, const std::map<std::string, PaperStatus>& statuses,
                                      std::uint64_t top_bin)
{
    std::map<std::string, HitRateInput> rows;
    for (const PaperEntry& p : report.papers) {
        if (p.flags.empty() || p.error) {
            continue;
        }
        auto st = statuses.find(p.source_id);
        bool hc = st != statuses.end() && st->second.state == PaperState::HalluCited;
        rows[p.source_id] = {p.flags.size(), hc};
    }
    return hit_rate_table(rows, top_bin);
}

std::vector<SearchLink> search_links(const ReportedFlag& rf)
{
    const ParsedReference& c = rf.flag.citation;
    std::vector<SearchLink> out;
    std::string query = c.title.value_or(c.raw_ref.raw);
    std::string q = util::url_encode(query);
    out.push_back({"Google Scholar title search", "https://scholar.google.com/scholar?q=" + q});
    out.push_back({"DBLP title search", "https://dblp.org/search?q=" + q});
    out.push_back({"OpenAlex title search", "https://openalex.org/works?search=" + q});
    out.push_back({"ACL Anthology search", "https://aclanthology.org/search/?q=" + q});
    if (c.identifiers.arxiv_id) {
        out.push_back({"arXiv abstract", "https://arxiv.org/abs/" + c.identifiers.arxiv_id->render()});
    }
    if (c.identifiers.doi) {
        out.push_back({"DOI resolver", "https://doi.org/" + *c.identifiers.doi});
    }
    if (c.identifiers.acl_id) {
        out.push_back({"ACL Anthology entry", "https://aclanthology.org/" + *c.identifiers.acl_id + "/"});
    }
    if (c.identifiers.url) {
        out.push_back({"Cited URL", *c.identifiers.url});
    }
    return out;
}

} // namespace hallucheck
