#include "hallucheck/error.hpp"
#include "hallucheck/report.hpp"
#include "hallucheck/util.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <thread>

namespace hallucheck {

namespace fs = std::filesystem;

namespace {

bool scannable_extension(const fs::path& p)
{
    auto ext = p.extension().string();
    return ext == ".txt" || ext == ".bib" || ext == ".blocks";
}

PaperEntry scan_one(const std::string& path, const std::string& source_id, const TitleIndex& index,
                    const ScanOptions& options)
{
    PaperEntry entry;
    entry.source_id = source_id;
    entry.path = path;
    try {
        std::vector<ParsedReference> refs = load_references(path, source_id, options.config.section);
        entry.citation_total = refs.size();
        for (const ParsedReference& ref : refs) {
            auto flag = classify_citation(ref, index, options.config.matcher);
            if (!flag) {
                continue;
            }
            ReportedFlag rf {std::move(*flag), std::nullopt};
            if (options.verifier
                && (rf.flag.kind == FlagKind::TitleNotFound || rf.flag.kind == FlagKind::IdentifierNotFound)) {
                Enrichment e = confirm_candidate(rf.flag, *options.verifier, options.config.matcher.threshold);
                rf.external = ExternalEvidence {std::move(e.annotation), std::move(e.external)};
            }
            entry.flags.push_back(std::move(rf));
        }
    } catch (const Error& e) {
        entry.citation_total = 0;
        entry.flags.clear();
        entry.error = std::string(to_string(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
        entry.citation_total = 0;
        entry.flags.clear();
        entry.error = std::string("unexpected failure: ") + e.what();
    }
    return entry;
}

} // namespace

std::vector<std::string> collect_inputs(const std::vector<std::string>& paths)
{
    std::vector<std::string> out;
    for (const std::string& p : paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::recursive_directory_iterator(p, ec)) {
                if (entry.is_regular_file() && scannable_extension(entry.path())) {
                    found.push_back(entry.path().string());
                }
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) {
        throw Error(ErrorCode::NoInputs, "no input files to scan");
    }
    return out;
}

std::vector<ParsedReference> load_references(const std::string& path, const std::string& source_id,
                                             const SectionOptions& section)
{
    auto ext = fs::path(path).extension().string();
    if (ext == ".bib") {
        return parse_bibtex(util::read_file(path), source_id);
    }
    TextSpan span;
    if (ext == ".blocks") {
        DocumentText doc = load_block_text(path);
        doc.source_id = source_id;
        span = extract_reference_section(doc, section);
    } else {
        DocumentText doc = load_plaintext_list(path);
        doc.source_id = source_id;
        span = whole_document_span(doc);
    }
    std::vector<ParsedReference> out;
    for (const RawReference& raw : segment_entries(span, source_id)) {
        out.push_back(parse_reference(raw));
    }
    return out;
}

ScanReport scan_corpus(const std::vector<std::string>& inputs, const TitleIndex& index, const ScanOptions& options)
{
    if (inputs.empty()) {
        throw Error(ErrorCode::NoInputs, "no input files to scan");
    }
    std::vector<std::string> paths = inputs;
    std::sort(paths.begin(), paths.end());

    // Source ids are file stems; repeated stems get "~2", "~3" in path order.
    std::vector<std::string> ids;
    std::map<std::string, int> seen;
    for (const std::string& p : paths) {
        std::string stem = source_id_from_path(p);
        int n = ++seen[stem];
        ids.push_back(n == 1 ? stem : stem + "~" + std::to_string(n));
    }

    std::vector<PaperEntry> entries(paths.size());
    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, paths.size());
    std::atomic<std::size_t> next {0};
    auto worker = [&] {
        for (std::size_t i = next++; i < paths.size(); i = next++) {
            entries[i] = scan_one(paths[i], ids[i], index, options);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }

    ScanReport report;
    report.generated_at = util::iso_timestamp_now();
    report.config_digest = options.config.digest();
    report.config = options.config.canonical_lines();
    report.index = index.meta();
    report.papers = std::move(entries);
    std::sort(report.papers.begin(), report.papers.end(),
              [](const PaperEntry& a, const PaperEntry& b) { return a.source_id < b.source_id; });
    for (const PaperEntry& p : report.papers) {
        if (p.error) {
            spdlog::warn("{}: {}", p.path, *p.error);
        }
    }
    finalize_summary(report, options.config.tiers);
    return report;
}

void finalize_summary(ScanReport& r, const TierBoundaries& tiers)
{
    std::map<std::string, std::uint64_t> flags;
    std::vector<std::uint64_t> counts;
    std::uint64_t papers = 0;
    std::uint64_t citations = 0;
    for (PaperEntry& p : r.papers) {
        p.tier = risk_tier(p.flags.size(), tiers);
        if (p.error) {
            continue;
        }
        ++papers;
        citations += p.citation_total;
        counts.push_back(p.citation_total);
        flags[p.source_id] = p.flags.size();
    }
    r.summary = candidate_stats(flags, papers, citations);
    r.citations.reset();
    if (!counts.empty()) {
        r.citations = citation_stats(counts);
    }
}

} // namespace hallucheck
