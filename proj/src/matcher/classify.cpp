#include "hallucheck/error.hpp"
#include "hallucheck/matcher.hpp"

#include <algorithm>
#include <array>

namespace hallucheck {

namespace {

constexpr std::array<std::pair<FlagKind, std::string_view>, 5> kKindNames {{
    {FlagKind::TitleNotFound, "TitleNotFound"},
    {FlagKind::IdentifierTitleMismatch, "IdentifierTitleMismatch"},
    {FlagKind::IdentifierNotFound, "IdentifierNotFound"},
    {FlagKind::MalformedIdentifier, "MalformedIdentifier"},
    {FlagKind::NoTitleExtracted, "NoTitleExtracted"},
}};

std::optional<std::string> coverage_note(const ParsedReference& parsed, const TitleIndex& index,
                                         std::string_view name)
{
    auto newest = index.newest_year(name);
    if (!parsed.year || !newest || *parsed.year <= *newest) {
        return std::nullopt;
    }
    std::string where = name.empty() ? std::string("index") : std::string(name) + " source";
    return "cited year " + std::to_string(*parsed.year) + " is newer than the " + where
        + " snapshot (" + std::to_string(*newest) + ")";
}

struct Lookup {
    std::string scheme;
    std::string cited;
    std::string record_id;
};

} // namespace

std::string_view to_string(FlagKind kind) noexcept
{
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "TitleNotFound";
}

std::optional<FlagKind> flag_kind_from_string(std::string_view s) noexcept
{
    for (const auto& [k, name] : kKindNames) {
        if (name == s) {
            return k;
        }
    }
    return std::nullopt;
}

int precedence_rank(FlagKind kind) noexcept
{
    switch (kind) {
    case FlagKind::IdentifierTitleMismatch: return 0;
    case FlagKind::TitleNotFound: return 1;
    case FlagKind::IdentifierNotFound: return 2;
    case FlagKind::MalformedIdentifier: return 3;
    case FlagKind::NoTitleExtracted: return 4;
    }
    return 5;
}

std::string_view to_string(IdentifierEvidence::Status status) noexcept
{
    switch (status) {
    case IdentifierEvidence::Status::Matches: return "matches";
    case IdentifierEvidence::Status::Mismatch: return "mismatch";
    case IdentifierEvidence::Status::NotFound: return "not_found";
    case IdentifierEvidence::Status::Malformed: return "malformed";
    }
    return "matches";
}

std::optional<CandidateFlag> cross_check_identifier(const ParsedReference& parsed, const TitleIndex& index,
                                                    const MatcherConfig& config)
{
    const Identifiers& ids = parsed.identifiers;
    std::vector<Lookup> lookups;
    if (ids.arxiv_id) {
        lookups.push_back({"arxiv", ids.arxiv_id->render(), "arxiv:" + ids.arxiv_id->value});
    }
    if (ids.acl_id) {
        lookups.push_back({"acl", *ids.acl_id, "acl:" + *ids.acl_id});
    }

    CandidateFlag flag;
    flag.citation = parsed;
    std::optional<FlagKind> kind;
    auto raise = [&](FlagKind k) {
        if (!kind || precedence_rank(k) < precedence_rank(*kind)) {
            kind = k;
        }
    };

    std::optional<NormalizedTitle> cited;
    if (parsed.title) {
        cited = normalize_title(*parsed.title);
        if (cited->empty()) {
            cited.reset();
        }
    }
    for (const Lookup& l : lookups) {
        IdentifierEvidence ev;
        ev.scheme = l.scheme;
        ev.cited_id = l.cited;
        if (parsed.title) {
            ev.cited_title = *parsed.title;
        }
        if (const BibRecord* rec = index.get_by_id(l.record_id)) {
            ev.record_id = rec->id;
            ev.record_title = rec->title;
            if (cited) {
                double score = similarity(*cited, normalize_title(rec->title));
                ev.score = score;
                if (!meets_threshold(score, config.threshold)) {
                    ev.status = IdentifierEvidence::Status::Mismatch;
                    raise(FlagKind::IdentifierTitleMismatch);
                }
            }
        } else if (index.covers_namespace(l.scheme)) {
            ev.status = IdentifierEvidence::Status::NotFound;
            raise(FlagKind::IdentifierNotFound);
            if (!flag.db_coverage_note) {
                flag.db_coverage_note = coverage_note(parsed, index, l.scheme);
            }
        } else {
            continue;
        }
        flag.identifiers.push_back(std::move(ev));
    }
    if (ids.malformed_arxiv) {
        IdentifierEvidence ev;
        ev.scheme = "arxiv";
        ev.cited_id = *ids.malformed_arxiv;
        ev.status = IdentifierEvidence::Status::Malformed;
        flag.identifiers.push_back(std::move(ev));
        raise(FlagKind::MalformedIdentifier);
    }
    if (!kind) {
        return std::nullopt;
    }
    flag.kind = *kind;
    return flag;
}

std::optional<CandidateFlag> classify_citation(const ParsedReference& parsed, const TitleIndex& index,
                                               const MatcherConfig& config)
{
    if (!config.scan_all && detect_keywords(parsed.raw_ref, config.keywords).empty()) {
        return std::nullopt;
    }

    CandidateFlag flag;
    flag.citation = parsed;
    std::optional<FlagKind> kind;

    bool has_title = parsed.title && !normalize_title(*parsed.title).empty();
    if (!has_title) {
        kind = FlagKind::NoTitleExtracted;
    } else {
        flag.match = search_title(index, *parsed.title, config.search_options());
        if (flag.match->decision == Decision::Candidate) {
            kind = FlagKind::TitleNotFound;
            flag.db_coverage_note = coverage_note(parsed, index, {});
        }
    }

    if (auto id_flag = cross_check_identifier(parsed, index, config)) {
        flag.identifiers = std::move(id_flag->identifiers);
        if (!kind || precedence_rank(id_flag->kind) < precedence_rank(*kind)) {
            kind = id_flag->kind;
            if (id_flag->db_coverage_note) {
                flag.db_coverage_note = id_flag->db_coverage_note;
            }
        }
    }
    if (!kind) {
        return std::nullopt;
    }
    flag.kind = *kind;
    return flag;
}

} // namespace hallucheck
