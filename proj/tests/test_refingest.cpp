#include "hallucheck/error.hpp"
#include "hallucheck/refingest.hpp"
#include "hallucheck/util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace hallucheck;

namespace {

struct Labeled {
    std::string raw;
    std::string title;
};

std::vector<Labeled> load_fixture()
{
    std::ifstream in(std::string(HALLUCHECK_FIXTURES) + "/references_labeled.tsv");
    REQUIRE(in);
    std::vector<Labeled> out;
    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        REQUIRE(tab != std::string::npos);
        out.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return out;
}

DocumentText doc_from_lines(const std::vector<std::string>& lines)
{
    DocumentText doc;
    doc.source_id = "doc";
    for (const auto& l : lines) {
        doc.blocks.push_back({l, 0});
    }
    return doc;
}

std::vector<std::string> wrap(const std::string& text, std::size_t width)
{
    std::vector<std::string> lines;
    std::istringstream words(text);
    std::string w, cur;
    while (words >> w) {
        if (!cur.empty() && cur.size() + 1 + w.size() > width) {
            lines.push_back(cur);
            cur.clear();
        }
        cur += (cur.empty() ? "" : " ") + w;
    }
    if (!cur.empty()) {
        lines.push_back(cur);
    }
    return lines;
}

void check_partition(const TextSpan& section, const std::vector<RawReference>& refs)
{
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const RawReference& r = refs[i];
        REQUIRE(r.ordinal == i);
        REQUIRE(r.span_begin >= cursor);
        REQUIRE(r.span_end <= section.text.size());
        REQUIRE(util::trim(section.text.substr(cursor, r.span_begin - cursor)).empty());
        REQUIRE(util::collapse_whitespace(section.text.substr(r.span_begin, r.span_end - r.span_begin)) == r.raw);
        cursor = r.span_end;
    }
    REQUIRE(util::trim(section.text.substr(cursor)).empty());
}

} // namespace

TEST_CASE("reference section boundaries")
{
    auto doc = doc_from_lines({"Intro text.", "References", "A. Author. 2020. T1.", "B. Author. 2021. T2."});
    TextSpan span = extract_reference_section(doc);
    CHECK(span.text == "A. Author. 2020. T1.\nB. Author. 2021. T2.");

    CHECK_THROWS_AS((void)extract_reference_section(doc_from_lines({"Intro", "Conclusion"})), Error);
    try {
        (void)extract_reference_section(doc_from_lines({"Intro"}));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoReferencesSection);
    }

    auto with_appendix = doc_from_lines({"Body.", "7 REFERENCES", "A. Author. 2020. First title.",
                                         "Venue text (2020).", "Appendix A", "Extra material", "More"});
    span = extract_reference_section(with_appendix);
    CHECK(span.text == "A. Author. 2020. First title.\nVenue text (2020).");

    auto lettered = doc_from_lines({"References", "Zed Author. 2019. A title. In EMNLP.",
                                    "A Dataset Details", "text"});
    CHECK(extract_reference_section(lettered).text == "Zed Author. 2019. A title. In EMNLP.");
}

TEST_CASE("segmentation of simple sections")
{
    TextSpan two {"A. Author. 2020. T1 is a title.\n\nB. Author. 2021. T2 is another.", 0, 0};
    auto refs = segment_entries(two, "s");
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].ordinal == 0);
    CHECK(refs[1].ordinal == 1);
    check_partition(two, refs);

    TextSpan wrapped {"Wei Xu, Yulia Tsvetkov, and Alan Black. 2022. AI for language\nlearning: Conversational agents and\npersonalized feedback. TACL, 10:1-15.", 0, 0};
    refs = segment_entries(wrapped, "s");
    REQUIRE(refs.size() == 1);
    CHECK(refs[0].raw == "Wei Xu, Yulia Tsvetkov, and Alan Black. 2022. AI for language learning: Conversational agents and personalized feedback. TACL, 10:1-15.");

    CHECK(segment_entries(TextSpan {"  \n\t\n", 0, 0}, "s").empty());

    TextSpan numeric {"[1] A. Smith, \"Some title,\" in Proc. X, 2019.\n[2] B. Jones, \"Other title,\" 2020.", 0, 0};
    refs = segment_entries(numeric, "s");
    REQUIRE(refs.size() == 2);
    check_partition(numeric, refs);
}

TEST_CASE("labelled corpus: segmentation and title accuracy")
{
    auto fixture = load_fixture();
    REQUIRE(fixture.size() == 100);

    std::string joined;
    std::vector<std::string> wrapped_lines;
    for (const auto& f : fixture) {
        joined += f.raw + "\n";
        for (auto& l : wrap(f.raw, 72)) {
            wrapped_lines.push_back(std::move(l));
        }
    }
    SUBCASE("one entry per line")
    {
        TextSpan section {joined, 0, joined.size()};
        auto refs = segment_entries(section, "fixture");
        check_partition(section, refs);
        REQUIRE(refs.size() == fixture.size());
        for (std::size_t i = 0; i < refs.size(); ++i) {
            CHECK(refs[i].raw == fixture[i].raw);
        }
    }
    SUBCASE("entries wrapped across lines")
    {
        std::string text;
        for (const auto& l : wrapped_lines) {
            text += l + "\n";
        }
        TextSpan section {text, 0, text.size()};
        auto refs = segment_entries(section, "fixture");
        check_partition(section, refs);
        std::size_t exact = 0;
        for (std::size_t i = 0; i < refs.size() && i < fixture.size(); ++i) {
            exact += refs[i].raw == fixture[i].raw ? 1 : 0;
        }
        CHECK(refs.size() == fixture.size());
        CHECK(exact >= 95);

    }
    SUBCASE("titles")
    {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < fixture.size(); ++i) {
            RawReference raw {"fixture", i, fixture[i].raw, 0, fixture[i].raw.size()};
            ParsedReference p = parse_reference(raw);
            if (p.title && *p.title == fixture[i].title) {
                ++correct;
            } else {
                MESSAGE("title mismatch #" << i << ": got '" << p.title.value_or("<none>") << "'");
            }
            if (p.title) {
                CHECK(fixture[i].raw.find(*p.title) != std::string::npos);
            }
            for (const auto& a : p.authors) {
                CHECK(fixture[i].raw.find(a) != std::string::npos);
            }
            if (p.year) {
                CHECK(fixture[i].raw.find(std::to_string(*p.year)) != std::string::npos);
            }
        }
        CHECK(correct >= 95);
    }
}

TEST_CASE("parse_reference fields")
{
    RawReference tacl {"s", 0,
                       "Wei Xu, Yulia Tsvetkov, and Alan Black. 2022. AI for language learning: Conversational agents "
                       "and personalized feedback. Transactions of the Association for Computational Linguistics "
                       "(TACL), 10:1–15.",
                       0, 0};
    ParsedReference p = parse_reference(tacl);
    CHECK(p.authors == std::vector<std::string> {"Wei Xu", "Yulia Tsvetkov", "Alan Black"});
    CHECK(p.year == 2022);
    CHECK(p.title == "AI for language learning: Conversational agents and personalized feedback");
    REQUIRE(p.venue);
    CHECK(p.venue->find("Transactions of the Association for Computational Linguistics") != std::string::npos);
    CHECK(p.pages == "10:1–15");

    RawReference minimal {"s", 0, "A. Author. 2020. A title. arXiv preprint arXiv:2001.00001.", 0, 0};
    p = parse_reference(minimal);
    CHECK(p.year == 2020);
    CHECK(p.title == "A title");
    REQUIRE(p.identifiers.arxiv_id);
    CHECK(p.identifiers.arxiv_id->value == "2001.00001");

    RawReference debris {"s", 0, "2020. pp. 3", 0, 0};
    p = parse_reference(debris);
    CHECK_FALSE(p.title);
    CHECK_FALSE(p.year);
    CHECK(p.authors.empty());
    CHECK(p.raw_ref.raw == "2020. pp. 3");

    RawReference stale {"s", 0, "Some Person. 1850. Old paper title here. Some venue.", 0, 0};
    CHECK_FALSE(parse_reference(stale).year);
}

TEST_CASE("arXiv identifiers")
{
    CHECK(parse_arxiv_id("arXiv preprint arXiv:2402.12345").value == "2402.12345");
    CHECK(parse_arxiv_id("arXiv preprint arXiv:1910.01708, 7(1):2").value == "1910.01708");
    auto versioned = parse_arxiv_id("see arxiv:2101.0001v3.");
    CHECK(versioned.value == "2101.0001");
    CHECK(versioned.version == 3);
    CHECK(parse_arxiv_id("arXiv:hep-th/9901001").style == ArxivStyle::Old);

    auto code_of = [](std::string_view text) {
        try {
            (void)parse_arxiv_id(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::ConfigError;
    };
    CHECK(code_of("arXiv:2313.99999") == ErrorCode::MalformedIdentifier);
    CHECK(code_of("arXiv:2301.123") == ErrorCode::MalformedIdentifier);
    CHECK(code_of("arXiv:2301.12345v0") == ErrorCode::MalformedIdentifier);
    CHECK(code_of("no marker here 2301.12345") == ErrorCode::NoIdentifier);

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> yy(0, 99), mm(1, 12), digits(4, 5), ver(0, 12), d(0, 9);
    for (int i = 0; i < 2000; ++i) {
        ArxivId id;
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d%02d.", yy(rng), mm(rng));
        id.value = buf;
        for (int k = digits(rng); k > 0; --k) {
            id.value += static_cast<char>('0' + d(rng));
        }
        if (int v = ver(rng); v > 0) {
            id.version = v;
        }
        REQUIRE(parse_arxiv_id("arXiv:" + id.render()) == id);
    }
    for (const char* archive : {"hep-th", "math", "cs", "cond-mat"}) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d%02d%03d", yy(rng), mm(rng), 1 + yy(rng));
        ArxivId id {ArxivStyle::Old, std::string(archive) + "/" + buf, std::nullopt};
        REQUIRE(parse_arxiv_id("arXiv:" + id.render()) == id);
    }
}

TEST_CASE("plaintext and block loaders")
{
    auto dir = std::filesystem::temp_directory_path() / "hallucheck_loaders";
    std::filesystem::create_directories(dir);
    auto list = dir / "paper-7.txt";
    {
        std::ofstream out(list);
        out << "A. One. 2020. First title here. In ACL.\n"
               "B. Two. 2021. Second title here. In EMNLP.\n"
               "C. Three. 2022. Third title here. In NAACL.\n";
    }
    DocumentText doc = load_plaintext_list(list.string());
    CHECK(doc.source_id == "paper-7");
    auto refs = segment_entries(whole_document_span(doc), doc.source_id);
    CHECK(refs.size() == 3);

    auto blocks = dir / "p.blocks";
    {
        std::ofstream out(blocks);
        out << "Title\nReferences\n\fA. One. 2020. T.\n";
    }
    DocumentText bdoc = load_block_text(blocks.string());
    REQUIRE(bdoc.blocks.size() == 3);
    CHECK(bdoc.blocks[2].page == 1);
    CHECK(bdoc.blocks[2].text == "A. One. 2020. T.");
    CHECK_THROWS_AS((void)load_plaintext_list((dir / "missing.txt").string()), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("BibTeX ingestion")
{
    auto refs = parse_bibtex(R"(@string{acl = "Proceedings of ACL"}
@inproceedings{key1,
  title = {Attention {Is} All You Need},
  author = {Ashish Vaswani and Noam Shazeer and others},
  booktitle = acl # " 2017",
  year = 2017,
  eprint = {1706.03762},
  pages = "5998--6008"
}
@comment{ignored @article{x, title={no}} }
@article{key2, title="Quoted \& escaped", author = "Doe, Jane", journal = {TACL}, year = {2020},
  url = {https://aclanthology.org/2020.tacl-1.5/}}
)", "bib");
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].title == "Attention Is All You Need");
    CHECK(refs[0].authors == std::vector<std::string> {"Ashish Vaswani", "Noam Shazeer"});
    CHECK(refs[0].venue == "Proceedings of ACL 2017");
    CHECK(refs[0].year == 2017);
    REQUIRE(refs[0].identifiers.arxiv_id);
    CHECK(refs[0].identifiers.arxiv_id->value == "1706.03762");
    CHECK(refs[1].title == "Quoted & escaped");
    CHECK(refs[1].identifiers.acl_id == "2020.tacl-1.5");
    CHECK(refs[1].raw_ref.ordinal == 1);

    try {
        (void)parse_bibtex("@article{good, title={Fine}}\n@article{broken, title = {Unclosed,\n year = 2020}\n", "b");
        FAIL("expected a syntax error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BibtexSyntaxError);
        CHECK(std::string(e.what()).find("entry 1 (broken)") != std::string::npos);
    }
    try {
        (void)parse_bibtex("@article{a, title = {Missing close\n@article{b, title={x}}\n", "b");
        FAIL("expected a syntax error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("entry 0 (a)") != std::string::npos);
    }
}
