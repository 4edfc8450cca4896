#include "lexlink/cli.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace lexlink;
using testsupport::fixture;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run lexlink_cli(const std::filesystem::path& data, std::vector<std::string> args) {
    args.insert(args.begin(), {"lexlink", "--data", data.string()});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

void write(const std::filesystem::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    f << s;
}

const std::string kMappingsHeader = "l1_ref\tl2_ref\trelation_code\tprecision\tstatus\tprovenance\treviewer\ttimestamp\n";

/// Ingests the canonical and three noun fixtures, checking each succeeds.
void ingest_nouns(const std::filesystem::path& data) {
    EXPECT_EQ(lexlink_cli(data, {"ingest", "--lexicon", fixture("qabas.tsv"), "--canonical"}).out,
              "lexicon=qabas accepted=3 rejected=0\n");
    for (const char* name : {"modern", "ghani", "sama"}) {
        const auto r = lexlink_cli(data, {"ingest", "--lexicon", fixture(std::string(name) + ".tsv")});
        EXPECT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(r.out, "lexicon=" + std::string(name) + " accepted=1 rejected=0\n");
    }
}

}  // namespace

TEST(Cli, AutomapPrintsCandidateCount) {
    const auto data = testsupport::temp_dir("cli_automap");
    ingest_nouns(data);
    const auto r = lexlink_cli(data, {"automap", "--source", "modern", "--target", "ghani"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("candidates=1 ", 0), 0u) << r.out;
    const auto none = lexlink_cli(data, {"automap", "--source", "modern", "--target", "sama"});
    EXPECT_EQ(none.out.rfind("candidates=0 ", 0), 0u) << none.out;
    // the pair already has a link, so re-running adds nothing
    EXPECT_EQ(lexlink_cli(data, {"automap", "--source", "ghani", "--target", "modern"}).out.rfind("candidates=0 ", 0), 0u);
}

TEST(Cli, StatsRelationsOnPaperTotals) {
    const auto data = testsupport::temp_dir("cli_relations");
    const std::vector<std::pair<std::string, std::size_t>> counts = {{"R1", 248882}, {"R2", 3010}, {"R3", 74},
                                                                      {"R4", 1784},   {"R5", 372},  {"R6", 1918}};
    const PrecisionTable precision;
    std::string rows = kMappingsHeader;
    std::size_t n = 0;
    for (const auto& [code, count] : counts)
        for (std::size_t i = 0; i < count; ++i, ++n)
            rows += "lex:" + std::to_string(n) + "\tqabas:" + std::to_string(n + 1) + "\t" + code + "\t" +
                    std::to_string(precision(relation_or_throw(code))) + "\tCONFIRMED\tMANUAL\tann\t" + std::to_string(n + 1) +
                    "\n";
    const auto file = data / "paper_counts.tsv";
    write(file, rows);
    const auto imported = lexlink_cli(data, {"review-import", file.string()});
    EXPECT_EQ(imported.out, "rows=256040 changed=256040\n") << imported.err;
    const auto r = lexlink_cli(data, {"stats", "relations", "--out", (data / "relations.tsv").string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "total=256040 R1=248882 R2=3010 R3=74 R4=1784 R5=372 R6=1918 X1=0 X2=0 X3=0 X4=0 X5=0\n");
    const auto table = testsupport::slurp((data / "relations.tsv").string());
    EXPECT_NE(table.find("R1\tSame Exactly\t100\t248882\n"), std::string::npos);
    EXPECT_NE(table.find("Total\t\t\t256040\n"), std::string::npos);
}

TEST(Cli, ExportImportFixpoint) {
    const auto data = testsupport::temp_dir("cli_fixpoint");
    ingest_nouns(data);
    lexlink_cli(data, {"automap", "--source", "ghani", "--target", "modern"});
    lexlink_cli(data, {"automap", "--source", "ghani", "--target", "sama"});
    const auto exported = data / "mappings.tsv";
    EXPECT_EQ(lexlink_cli(data, {"export", "mappings", "--out", exported.string()}).out, "mappings=2\n");
    EXPECT_EQ(lexlink_cli(data, {"review-import", exported.string()}).out, "rows=2 changed=0\n");

    // a reviewer confirms one row in a spreadsheet and sends it back
    auto text = testsupport::slurp(exported.string());
    const auto first_row = text.find('\n') + 1;
    const auto end = text.find('\n', first_row);
    auto cells = tsv::split(text.substr(first_row, end - first_row), '\t');
    cells[2] = "R4";
    cells[3] = "70";
    cells[4] = "CONFIRMED";
    cells[6] = "ann";
    cells[7] = "9";
    write(data / "reviewed.tsv", kMappingsHeader + tsv::join(cells, "\t") + "\n");
    EXPECT_EQ(lexlink_cli(data, {"review-import", (data / "reviewed.tsv").string()}).out, "rows=1 changed=1\n");
    EXPECT_EQ(lexlink_cli(data, {"stats", "relations"}).out.rfind("total=1 R1=0 R2=0 R3=0 R4=1 ", 0), 0u);

    const auto again = data / "again.tsv";
    lexlink_cli(data, {"export", "mappings", "--out", again.string()});
    EXPECT_EQ(lexlink_cli(data, {"review-import", again.string()}).out, "rows=2 changed=0\n");
}

TEST(Cli, RepeatedSequencesGiveIdenticalExports) {
    auto sequence = [](const std::string& tag) {
        const auto data = testsupport::temp_dir(tag);
        ingest_nouns(data);
        lexlink_cli(data, {"ingest", "--lexicon", fixture("verbs_b.tsv")});
        lexlink_cli(data, {"automap", "--source", "ghani", "--target", "modern"});
        lexlink_cli(data, {"ingest", "--corpus", fixture("corpus_small.tsv")});
        lexlink_cli(data, {"link-corpus", "corpus_small"});
        std::string all;
        for (const auto& args : std::vector<std::vector<std::string>>{
                 {"export", "lemmas"},
                 {"export", "lemmas", "--lexicon", "sama", "--format", "jsonl"},
                 {"export", "mappings"},
                 {"export", "mappings", "--format", "jsonl"},
                 {"export", "corpus", "--corpus", "corpus_small"},
                 {"export", "corpus", "--corpus", "corpus_small", "--format", "jsonl"}}) {
            const auto r = lexlink_cli(data, args);
            EXPECT_EQ(r.code, 0) << r.err;
            all += r.out;
        }
        return all;
    };
    const auto a = sequence("cli_seq_a");
    EXPECT_EQ(a, sequence("cli_seq_b"));
    EXPECT_NE(a.find("زُجَاجٌ"), std::string::npos);
}

TEST(Cli, CorpusLinkingReport) {
    const auto data = testsupport::temp_dir("cli_link");
    ingest_nouns(data);
    lexlink_cli(data, {"ingest", "--lexicon", fixture("verbs_b.tsv")});
    write(data / "links.tsv", kMappingsHeader + "verbs_b:kataba_1\tqabas:3\tR1\t100\tCONFIRMED\tMANUAL\tann\t1\n" +
                                  "modern:1021\tqabas:1\tX2\t30\tCONFIRMED\tMANUAL\tann\t2\n");
    lexlink_cli(data, {"review-import", (data / "links.tsv").string()});
    EXPECT_EQ(lexlink_cli(data, {"ingest", "--corpus", fixture("corpus_small.tsv"), "--id", "small"}).out,
              "corpus=small accepted=5 rejected=0\n");
    auto r = lexlink_cli(data, {"link-corpus", "small"});
    EXPECT_EQ(r.out, "tokens=5 tokens_resolved=2 tokens_percent=40 lemmas=4 lemmas_resolved=1 lemmas_percent=25 ambiguous=0\n");
    r = lexlink_cli(data, {"link-corpus", "small", "--relations", "R1,X2"});
    EXPECT_EQ(r.out, "tokens=5 tokens_resolved=3 tokens_percent=60 lemmas=4 lemmas_resolved=2 lemmas_percent=50 ambiguous=0\n");
    const auto exported = lexlink_cli(data, {"export", "corpus", "--corpus", "small"}).out;
    EXPECT_NE(exported.find("1\t2\tيومي\tmodern\t1021\t1\n"), std::string::npos);
    EXPECT_EQ(lexlink_cli(data, {"link-corpus", "nope"}).code, 2);
}

TEST(Cli, StatsCoverageAndIaa) {
    const auto data = testsupport::temp_dir("cli_stats");
    ingest_nouns(data);
    EXPECT_EQ(lexlink_cli(data, {"stats", "coverage"}).out, "ghani=1 modern=1 sama=1 qabas=3\n");

    // 100 shared items, 90 agreements, balanced marginals: kappa 0.80
    std::string ann = kMappingsHeader, bob = kMappingsHeader;
    for (int i = 0; i < 100; ++i) {
        const bool first_half = i < 50;
        const bool flip = first_half ? i < 5 : i - 50 < 5;
        const std::string a = first_half ? "R1\t100" : "R2\t90";
        const std::string b = flip ? (first_half ? "R2\t90" : "R1\t100") : a;
        const auto pair = "lex:" + std::to_string(i) + "\tqabas:" + std::to_string(i + 1) + "\t";
        ann += pair + a + "\tCONFIRMED\tMANUAL\tann\t" + std::to_string(i + 1) + "\n";
        bob += pair + b + "\tCONFIRMED\tMANUAL\tbob\t" + std::to_string(i + 1) + "\n";
    }
    write(data / "ann.tsv", ann);
    write(data / "bob.tsv", bob);
    const auto r = lexlink_cli(data, {"stats", "iaa", "--annotations", (data / "ann.tsv").string(), (data / "bob.tsv").string(),
                                      "--out", (data / "iaa.tsv").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "items=100 ann-bob=0.80\n");
    EXPECT_NE(testsupport::slurp((data / "iaa.tsv").string()).find("ann\tbob\t100\t"), std::string::npos);

    const auto lonely = lexlink_cli(data, {"stats", "iaa", "--annotations", (data / "ann.tsv").string()});
    EXPECT_EQ(lonely.code, 2);
    EXPECT_NE(lonely.err.find("NotEnoughAnnotators"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    const auto data = testsupport::temp_dir("cli_exit");
    EXPECT_EQ(lexlink_cli(data, {}).code, 1);
    EXPECT_EQ(lexlink_cli(data, {"frobnicate"}).code, 1);
    EXPECT_EQ(lexlink_cli(data, {"automap", "--source", "a"}).code, 1);
    EXPECT_EQ(lexlink_cli(data, {"stats", "bogus"}).code, 1);
    EXPECT_EQ(lexlink_cli(data, {"ingest"}).code, 1);
    EXPECT_EQ(lexlink_cli(data, {"export", "corpus"}).code, 1);
    EXPECT_EQ(lexlink_cli(data, {"--x2-weight", "500", "stats", "relations"}).code, 1);
    EXPECT_EQ(lexlink_cli(data, {"--help"}).code, 0);

    EXPECT_EQ(lexlink_cli(data, {"ingest", "--lexicon", "/no/such/file.tsv"}).code, 2);
    EXPECT_EQ(lexlink_cli(data, {"automap", "--source", "a", "--target", "b"}).code, 2);
    EXPECT_EQ(lexlink_cli(data, {"export", "lemmas", "--lexicon", "nope"}).code, 2);

    write(data / "bad.tsv", kMappingsHeader + "a:1\tb:1\tR1\t100\tCONFIRMED\tMANUAL\tx\t1\nbroken row\n");
    const auto bad = lexlink_cli(data, {"review-import", (data / "bad.tsv").string()});
    EXPECT_EQ(bad.code, 2);
    EXPECT_EQ(bad.out, "rows=0 changed=0\n");
    EXPECT_NE(bad.err.find("row 3"), std::string::npos);
    EXPECT_EQ(lexlink_cli(data, {"stats", "relations"}).out.rfind("total=0 ", 0), 0u);

    write(data / "partial.tsv", testsupport::slurp(fixture("modern.tsv")) + "9\tkataba\tNOUN\n");
    const auto partial = lexlink_cli(data, {"ingest", "--lexicon", (data / "partial.tsv").string()});
    EXPECT_EQ(partial.code, 2);
    EXPECT_EQ(partial.out, "lexicon=partial accepted=1 rejected=1\n");
    EXPECT_NE(partial.err.find("NonArabicCharacter"), std::string::npos);
}

TEST(Cli, DataDirectoryIsLocked) {
    const auto data = testsupport::temp_dir("cli_lock");
    auto held = Workspace::open(data);
    const auto r = lexlink_cli(data, {"stats", "relations"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("in use"), std::string::npos);
}
