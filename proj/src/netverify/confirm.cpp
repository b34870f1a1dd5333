#include "hallucheck/error.hpp"
#include "hallucheck/netverify.hpp"

#include <algorithm>

namespace hallucheck {

Enrichment confirm_candidate(const CandidateFlag& flag, ExternalVerifier& verifier, double threshold)
{
    Enrichment out;
    out.flag = flag;
    if (flag.kind != FlagKind::TitleNotFound && flag.kind != FlagKind::IdentifierNotFound) {
        out.annotation = "not applicable";
        return out;
    }
    if (!flag.citation.title) {
        out.annotation = "no title to search";
        return out;
    }
    NormalizedTitle cited = normalize_title(*flag.citation.title);
    if (cited.empty()) {
        out.annotation = "no title to search";
        return out;
    }

    bool offline = false;
    std::vector<std::string> failures;
    for (Service service : {Service::OpenAlex, Service::Dblp}) {
        try {
            ExternalResult result = verifier.search_external({service, QueryKind::TitleSearch, cited.text});
            for (ExternalHit& hit : result.hits) {
                double score = similarity(cited, normalize_title(hit.title));
                out.external.push_back({service, std::move(hit), score});
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::OfflineMiss) {
                offline = true;
            } else {
                failures.push_back(e.what());
            }
        }
    }
    std::stable_sort(out.external.begin(), out.external.end(),
                     [](const ScoredHit& a, const ScoredHit& b) { return a.score > b.score; });

    bool resolvable = std::any_of(out.external.begin(), out.external.end(),
                                  [&](const ScoredHit& h) { return meets_threshold(h.score, threshold); });
    if (resolvable) {
        out.annotation = kExternallyResolvable;
    } else if (offline) {
        out.annotation = kUncheckedOffline;
    } else if (!failures.empty()) {
        out.annotation = "lookup failed: " + failures.front();
    } else {
        out.annotation = kNoExternalMatch;
    }
    return out;
}

} // namespace hallucheck
