#include "hallucheck/bibindex.hpp"
#include "hallucheck/error.hpp"
#include "hallucheck/report.hpp"
#include "hallucheck/triage.hpp"
#include "hallucheck/util.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace hallucheck;

namespace {

struct IndexArgs {
    std::string acl;
    std::string arxiv;
    std::string dblp;
    std::string out;
};

struct ScanArgs {
    std::vector<std::string> paths;
    std::string index;
    std::string out;
    std::string config;
    std::string format = "json";
    std::string cache_dir;
    std::optional<double> threshold;
    std::optional<int> rate_ms;
    bool online = false;
    bool scan_all = false;
    std::size_t threads = 0;
};

struct ReportArgs {
    std::string report;
    std::string format = "md";
    std::string log;
    bool exhaustive = false;
};

struct TfidfArgs {
    std::string group_a;
    std::string group_b;
    std::size_t top_k = 20;
};

struct VerifyArgs {
    std::string report;
    std::string log;
    std::string bind = "127.0.0.1:8080";
    std::string ui_dir;
    bool exhaustive = false;
};

int cmd_index_build(const IndexArgs& a)
{
    if (a.acl.empty() && a.arxiv.empty() && a.dblp.empty()) {
        throw Error(ErrorCode::NoInputs, "give at least one of --acl, --arxiv, --dblp");
    }
    std::vector<BibRecord> records;
    IndexMeta meta;
    auto sink = [&](BibRecord&& r) { records.push_back(std::move(r)); };
    auto run = [&](const char* name, const std::string& path, auto ingest) {
        if (path.empty()) {
            return;
        }
        IngestStats st = ingest(path, sink);
        spdlog::info("{}: {} records, {} skipped", name, st.records, st.skipped);
        meta.sources.push_back({name, path, st.records, st.skipped, st.newest_year});
    };
    run("acl", a.acl, ingest_acl_anthology);
    run("arxiv", a.arxiv, ingest_arxiv_snapshot);
    run("dblp", a.dblp, ingest_dblp);
    meta.built_at = util::iso_timestamp_now();
    TitleIndex index = TitleIndex::build(std::move(records), std::move(meta));
    save_index(index, a.out);
    std::cout << "indexed " << index.size() << " records into " << a.out << "\n";
    return 0;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text) || !f.flush()) {
        throw Error(ErrorCode::IoError, "cannot write " + path);
    }
}

int cmd_scan(const ScanArgs& a)
{
    Config config;
    if (!a.config.empty()) {
        config = load_config_file(a.config);
    }
    if (a.threshold) {
        config.set("threshold", std::to_string(*a.threshold));
    }
    if (a.rate_ms) {
        config.rate_ms = *a.rate_ms;
    }
    if (a.online) {
        config.online = true;
    }
    if (a.scan_all) {
        config.matcher.scan_all = true;
    }
    if (!a.cache_dir.empty()) {
        config.cache_dir = a.cache_dir;
    }
    config.validate();
    if (a.format != "json" && a.format != "md" && a.format != "csv") {
        throw Error(ErrorCode::UnknownFormat, "unknown format '" + a.format + "' (expected json, md or csv)");
    }

    TitleIndex index = load_index(a.index);
    std::vector<std::string> inputs = collect_inputs(a.paths);

    ScanOptions options {config, a.threads, nullptr};
    std::unique_ptr<CacheStore> cache;
    std::unique_ptr<HttpTransport> transport;
    SystemClock clock;
    std::unique_ptr<RateLimiter> limiter;
    std::unique_ptr<ExternalVerifier> verifier;
    if (config.online || fs::is_directory(config.cache_dir)) {
        cache = std::make_unique<CacheStore>(config.cache_dir);
        limiter = std::make_unique<RateLimiter>(clock, std::chrono::milliseconds(config.rate_ms));
        if (config.online) {
            transport = make_http_transport();
        }
        VerifierOptions vo;
        vo.online = config.online;
        verifier = std::make_unique<ExternalVerifier>(*cache, *limiter, transport.get(), clock, vo);
        options.verifier = verifier.get();
    }

    ScanReport report = scan_corpus(inputs, index, options);
    if (!a.out.empty()) {
        write_report(report, a.out);
    }
    if (a.format == "json") {
        if (a.out.empty()) {
            std::cout << serialize_report(report);
        }
    } else {
        std::cout << render_report(report, a.format);
    }
    spdlog::info("{} papers, {} candidates in {} papers", report.papers.size(), report.summary.citations_flagged,
                 report.summary.papers_flagged);
    return 0;
}

std::uint64_t report_top_bin(const ScanReport& r)
{
    Config c;
    for (const std::string& line : r.config) {
        auto eq = line.find('=');
        if (eq != std::string::npos && line.substr(0, eq) == "top_bin") {
            c.set("top_bin", line.substr(eq + 1));
        }
    }
    return c.top_bin;
}

int cmd_report(const ReportArgs& a)
{
    ScanReport report = read_report(a.report);
    if (a.log.empty()) {
        std::cout << render_report(report, a.format);
        return 0;
    }
    if (!fs::exists(a.log)) {
        throw Error(ErrorCode::IoError, "verdict log not found: " + a.log);
    }
    VerdictLog log(a.log);
    auto statuses = derive_statuses(report, log.replay(), a.exhaustive);
    auto rows = live_hit_rate(report, statuses, report_top_bin(report));
    std::cout << render_report(report, a.format, &rows);
    return 0;
}

std::vector<std::string> read_titles(const std::string& path)
{
    std::vector<std::string> out;
    std::string text = util::read_file(path);
    for (std::string_view line : util::split_lines(text)) {
        std::string_view t = util::trim(line);
        if (!t.empty()) {
            out.emplace_back(t);
        }
    }
    return out;
}

int cmd_tfidf(const TfidfArgs& a)
{
    std::cout << tfidf_csv(tfidf_diff(read_titles(a.group_a), read_titles(a.group_b), a.top_k));
    return 0;
}

int cmd_verify(const VerifyArgs& a)
{
    auto [host, port] = parse_bind_address(a.bind);
    ScanReport report = read_report(a.report);
    TriageOptions opts;
    opts.exhaustive = a.exhaustive;
    opts.top_bin = report_top_bin(report);

    // Signals are taken synchronously by a watcher thread, so block them before any thread starts.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    TriageService service(std::move(report), a.log, opts);
    TriageServer server(service, a.ui_dir);
    int bound = server.bind(host, port);
    std::cout << "triage server listening on http://" << host << ":" << bound << std::endl;

    std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("shutting down");
        server.stop();
    });
    server.run();
    if (watcher.joinable()) {
        pthread_kill(watcher.native_handle(), SIGTERM);
        watcher.join();
    }
    return 0;
}

int exit_code(ErrorCode c)
{
    switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownFormat:
    case ErrorCode::NoInputs: return 2;
    default: return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app {"Flags citations that match no known publication"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    IndexArgs ia;
    auto* index_cmd = app.add_subcommand("index", "Bibliographic index commands");
    index_cmd->require_subcommand(1);
    auto* build = index_cmd->add_subcommand("build", "Ingest metadata dumps and write an index");
    build->add_option("--acl", ia.acl, "ACL Anthology data directory (*.xml)")->check(CLI::ExistingDirectory);
    build->add_option("--arxiv", ia.arxiv, "arXiv metadata snapshot (JSON lines)")->check(CLI::ExistingFile);
    build->add_option("--dblp", ia.dblp, "dblp.xml")->check(CLI::ExistingFile);
    build->add_option("--out", ia.out, "Index directory")->required();

    ScanArgs sa;
    auto* scan = app.add_subcommand("scan", "Scan reference lists and write a report");
    scan->add_option("paths", sa.paths, "Input files or directories (.txt, .bib, .blocks)")->required();
    scan->add_option("--index", sa.index, "Index directory")->required();
    scan->add_option("--out", sa.out, "Write the JSON report here");
    scan->add_option("--config", sa.config, "key = value config file")->check(CLI::ExistingFile);
    scan->add_option("--format", sa.format, "json, md or csv");
    scan->add_option("--threshold", sa.threshold, "Title similarity threshold");
    scan->add_option("--rate-ms", sa.rate_ms, "Minimum spacing between requests to one service");
    scan->add_option("--cache-dir", sa.cache_dir, "External lookup cache");
    scan->add_option("--threads", sa.threads, "Worker threads (0 = all cores)");
    scan->add_flag("--online", sa.online, "Look unresolved candidates up on OpenAlex and DBLP");
    scan->add_flag("--scan-all,--exhaustive-scan-all", sa.scan_all, "Check every citation, not only keyword-bearing ones");

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "Render a scan report");
    report->add_option("report", ra.report, "Report JSON")->required()->check(CLI::ExistingFile);
    report->add_option("--format", ra.format, "md or csv");
    report->add_option("--log", ra.log, "Verdict log; adds the hit-rate table");
    report->add_flag("--exhaustive", ra.exhaustive, "Statuses as in an exhaustive triage session");

    TfidfArgs ta;
    auto* tfidf = app.add_subcommand("tfidf", "Compare title vocabularies of two groups");
    tfidf->add_option("--group-a", ta.group_a, "One title per line")->required()->check(CLI::ExistingFile);
    tfidf->add_option("--group-b", ta.group_b, "One title per line")->required()->check(CLI::ExistingFile);
    tfidf->add_option("--top-k", ta.top_k, "Terms to print (0 = all)");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Serve the triage API over a report");
    verify->add_option("report", va.report, "Report JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--log", va.log, "Verdict log (created if absent)")->required();
    verify->add_option("--bind", va.bind, "host:port");
    verify->add_option("--ui-dir", va.ui_dir, "Static UI files to serve at /")->check(CLI::ExistingDirectory);
    verify->add_flag("--exhaustive", va.exhaustive, "Keep reviewing papers already marked HalluCited");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_default_logger(spdlog::stderr_color_mt("hallucheck"));
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
    spdlog::set_pattern("%^%l%$: %v");

    try {
        if (build->parsed()) {
            return cmd_index_build(ia);
        }
        if (scan->parsed()) {
            return cmd_scan(sa);
        }
        if (report->parsed()) {
            return cmd_report(ra);
        }
        if (tfidf->parsed()) {
            return cmd_tfidf(ta);
        }
        if (verify->parsed()) {
            return cmd_verify(va);
        }
    } catch (const Error& e) {
        spdlog::error("{}: {}", to_string(e.code()), e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
