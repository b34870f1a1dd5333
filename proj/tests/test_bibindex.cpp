#include "hallucheck/bibindex.hpp"
#include "hallucheck/error.hpp"
#include "hallucheck/matcher.hpp"

#include "support/corpus.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

using namespace hallucheck;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("hallucheck-bib-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

const char* kAclVolume = R"(<?xml version='1.0' encoding='UTF-8'?>
<collection id="2023.acl">
  <volume id="long" ingest-date="2023-07-01">
    <meta>
      <booktitle>Proceedings of the 61st Annual Meeting of the Association for Computational Linguistics</booktitle>
      <year>2023</year>
    </meta>
    <paper id="1">
      <title>One Cannot Stand for Everyone! Leveraging <fixed-case>M</fixed-case>ulti-task Learning</title>
      <author><first>Ana</first><last>L&#243;pez</last></author>
      <author><first>Bo</first><last>Li</last></author>
    </paper>
    <paper id="2">
      <title>   </title>
    </paper>
    <paper id="3">
      <title>Café Talk: Dialogue at Scale</title>
    </paper>
  </volume>
</collection>
)";

const char* kAclOld = R"(<?xml version='1.0' encoding='UTF-8'?>
<collection id="P19">
  <volume id="1">
    <meta><booktitle>Proceedings of ACL 2019</booktitle><year>2019</year></meta>
    <paper id="42"><title>Old Style Identifiers</title><year>2019</year></paper>
  </volume>
</collection>
)";

} // namespace

TEST_CASE("ACL Anthology volumes")
{
    fs::path dir = scratch("acl");
    write(dir / "2023.acl.xml", kAclVolume);
    write(dir / "P19.xml", kAclOld);
    write(dir / "README.md", "not xml");
    std::vector<BibRecord> out;
    IngestStats st = ingest_acl_anthology(dir.string(), [&](BibRecord&& r) { out.push_back(std::move(r)); });
    CHECK(st.records == 3);
    CHECK(st.skipped == 1);
    CHECK(st.newest_year == 2023);
    REQUIRE(out.size() == 3);
    CHECK(out[0].id == "acl:2023.acl-long.1");
    CHECK(out[0].title == "One Cannot Stand for Everyone! Leveraging Multi-task Learning");
    CHECK(out[0].authors == std::vector<std::string> {"Ana L\xC3\xB3pez", "Bo Li"});
    CHECK(out[0].year == 2023);
    CHECK(out[0].venue == "Proceedings of the 61st Annual Meeting of the Association for Computational Linguistics");
    CHECK(out[0].url == "https://aclanthology.org/2023.acl-long.1");
    CHECK(out[1].title == "Caf\xC3\xA9 Talk: Dialogue at Scale");
    CHECK(out[2].id == "acl:P19-1042");

    write(dir / "broken.xml", "<collection id=\"X\"><volume id=\"1\"><paper id=\"1\"><title>Oops</volume>");
    try {
        (void)ingest_acl_anthology(dir.string(), [](BibRecord&&) {});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("broken.xml") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("arXiv snapshot lines")
{
    fs::path dir = scratch("arxiv");
    write(dir / "snap.jsonl",
          R"({"id":"2402.12345","title":"Homoclinic Floer homology\n  via direct limits","authors":"S. Hohloch","authors_parsed":[["Hohloch","Sonja",""]],"journal-ref":null})"
          "\n\n"
          R"({"id":"hep-th/9901001","title":"Strings","authors":"A. One and B. Two","journal-ref":"Phys. Rev. D 1"})"
          "\n{not json\n"
          R"({"id":"2101.00001","title":""})"
          "\n");
    std::vector<BibRecord> out;
    IngestStats st = ingest_arxiv_snapshot((dir / "snap.jsonl").string(), [&](BibRecord&& r) { out.push_back(std::move(r)); });
    CHECK(st.records == 2);
    CHECK(st.skipped == 2);
    REQUIRE(out.size() == 2);
    CHECK(out[0].id == "arxiv:2402.12345");
    CHECK(out[0].title == "Homoclinic Floer homology via direct limits");
    CHECK(out[0].authors == std::vector<std::string> {"Sonja Hohloch"});
    CHECK(out[0].year == 2024);
    CHECK(out[0].url == "https://arxiv.org/abs/2402.12345");
    CHECK(out[1].year == 1999);
    CHECK(out[1].authors.size() == 2);
    CHECK(out[1].venue == "Phys. Rev. D 1");
    CHECK_THROWS_AS((void)ingest_arxiv_snapshot((dir / "missing").string(), [](BibRecord&&) {}), Error);
    fs::remove_all(dir);
}

TEST_CASE("DBLP publications")
{
    fs::path dir = scratch("dblp");
    write(dir / "dblp.xml", R"(<?xml version="1.0" encoding="ISO-8859-1"?>
<!DOCTYPE dblp SYSTEM "dblp.dtd">
<dblp>
<article key="journals/cl/Smith20" mdate="2020-01-01">
<author>Jo Smith</author><author>M&uuml;ller Ka</author>
<title>Parsing with <i>style</i>.</title>
<year>2020</year><journal>Comput. Linguistics</journal><ee>https://doi.org/10.1/x</ee>
</article>
<www key="homepages/1/2"><title>Home Page</title></www>
<inproceedings key="conf/acl/Doe21"><author>J. Doe</author><title>Sequence Models</title><year>2021</year><booktitle>ACL</booktitle></inproceedings>
</dblp>
)");
    std::vector<BibRecord> out;
    IngestStats st = ingest_dblp((dir / "dblp.xml").string(), [&](BibRecord&& r) { out.push_back(std::move(r)); });
    CHECK(st.records == 2);
    REQUIRE(out.size() == 2);
    CHECK(out[0].id == "dblp:journals/cl/Smith20");
    CHECK(out[0].title == "Parsing with style.");
    CHECK(out[0].authors == std::vector<std::string> {"Jo Smith", "M\xC3\xBCller Ka"});
    CHECK(out[0].venue == "Comput. Linguistics");
    CHECK(out[0].url == "https://doi.org/10.1/x");
    CHECK(out[1].venue == "ACL");
    CHECK(st.newest_year == 2021);
    fs::remove_all(dir);
}

TEST_CASE("index build rejects duplicate ids and audits cleanly")
{
    CHECK_THROWS_AS((void)TitleIndex::build({make_record("x:1", "A"), make_record("x:1", "B")}), Error);

    synth::Rng rng(5);
    auto vocab = synth::vocabulary(rng, 200);
    TitleIndex idx = TitleIndex::build(synth::toy_records(rng, 10000, vocab));
    CHECK(idx.size() == 10000);
    auto audit = idx.audit();
    CHECK(audit.ok);
    CHECK(audit.problems.empty());
    for (std::size_t i = 1; i < idx.size(); ++i) {
        REQUIRE(idx.records()[i - 1].id < idx.records()[i].id);
    }
    CHECK(idx.get_by_id("dblp:toy/00017") != nullptr);
    CHECK(idx.get_by_id("dblp:toy/99999") == nullptr);
    CHECK(idx.covers_namespace("dblp"));
    CHECK_FALSE(idx.covers_namespace("arxiv"));
    CHECK(idx.newest_year() == 2023);
}

TEST_CASE("persisted index round-trips and rejects damage")
{
    synth::Rng rng(11);
    auto vocab = synth::vocabulary(rng, 80);
    IndexMeta meta {{{"dblp", "toy.xml", 500, 3, 2023}}, "2026-01-01T00:00:00.000Z"};
    auto recs = synth::toy_records(rng, 500, vocab);
    recs[3].authors = {"A B", "C \xC3\xA9"};
    recs[3].venue = "Venue";
    recs[3].url = "https://example.org";
    TitleIndex idx = TitleIndex::build(recs, meta);
    fs::path dir = scratch("persist");
    save_index(idx, dir.string());
    TitleIndex back = load_index(dir.string());
    CHECK(back == idx);
    CHECK(back.meta() == meta);
    MatchOutcome a = search_title(idx, recs[7].title);
    MatchOutcome b = search_title(back, recs[7].title);
    CHECK(a.best == b.best);

    fs::path file = dir / "titles.hcix";
    std::string bytes;
    {
        std::ifstream in(file, std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto expect_code = [&](const std::string& content, ErrorCode code) {
        write(file, content);
        try {
            (void)load_index(dir.string());
            FAIL("expected a load error");
        } catch (const Error& e) {
            CHECK(e.code() == code);
        }
    };
    expect_code("XXXX" + bytes.substr(4), ErrorCode::VersionMismatch);
    std::string bumped = bytes;
    bumped[4] = static_cast<char>(bumped[4] + 1);
    expect_code(bumped, ErrorCode::VersionMismatch);
    expect_code(bytes.substr(0, bytes.size() / 2), ErrorCode::IndexLoadError);
    expect_code(bytes + "junk", ErrorCode::IndexLoadError);
    fs::remove_all(dir);
    CHECK_THROWS_AS((void)load_index(dir.string()), Error);
}
