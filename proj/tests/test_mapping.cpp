#include "lexlink/mapping.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

using namespace lexlink;
using testsupport::fixture;

namespace {

LemmaForms verb(std::initializer_list<std::string_view> pv, std::initializer_list<std::string_view> iv,
                std::initializer_list<std::string_view> cv, std::initializer_list<std::string_view> roots) {
    LemmaForms f;
    f.ref = {"t", "v"};
    f.pos = PosTag::PV;
    f.forms.pv = WordSet::parse(pv);
    f.forms.iv = WordSet::parse(iv);
    f.forms.cv = WordSet::parse(cv);
    for (auto r : roots) f.roots.insert(analyze_root(r));
    return f;
}

LemmaForms noun(std::initializer_list<std::string_view> sg, std::initializer_list<std::string_view> du,
                std::initializer_list<std::string_view> pl, std::initializer_list<std::string_view> roots) {
    LemmaForms f;
    f.ref = {"t", "n"};
    f.pos = PosTag::NOUN;
    f.forms.singulars = WordSet::parse(sg);
    f.forms.duals = WordSet::parse(du);
    f.forms.plurals = WordSet::parse(pl);
    for (auto r : roots) f.roots.insert(analyze_root(r));
    return f;
}

const LemmaForms& modern() {
    static const auto f = noun({"يَوْميّ"}, {}, {}, {"ي و م"});
    return f;
}
const LemmaForms& ghani() {
    static const auto f = noun({"يَوْمِيٌّ", "يَوْمِيّةٌ"}, {}, {}, {"ي و م"});
    return f;
}
const LemmaForms& sama() {
    static const auto f = noun({"يَوْمِيَّة"}, {"يَوْمِيَّتَي", "يَوْمِيَّتان", "يَوْمِيَّتا", "يَوْمِيَّتَيْن"},
                               {"يَوْمِيّا", "يَوْمِيَّي", "يَوْمِيّان", "يَوْمِيَّيْن"}, {});
    return f;
}

void ingest(LexiconStore& s, const std::string& id, const std::string& file) {
    std::ifstream in(fixture(file));
    const auto r = s.ingest_lexicon({id, id, "test", false, 0}, in);
    ASSERT_TRUE(r.rejected.empty()) << file;
}

LexiconStore three_lexicons() {
    LexiconStore s;
    ingest(s, "modern", "modern.tsv");
    ingest(s, "ghani", "ghani.tsv");
    ingest(s, "sama", "sama.tsv");
    return s;
}

std::set<std::pair<std::string, std::string>> pairs_of(const std::vector<Correspondence>& cs) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& c : cs) {
        auto a = c.l1.str(), b = c.l2.str();
        if (b < a) std::swap(a, b);
        out.insert({a, b});
    }
    return out;
}

Correspondence confirmed(const std::string& a, const std::string& b, Relation r) {
    Correspondence c;
    c.l1 = *LemmaRef::parse(a);
    c.l2 = *LemmaRef::parse(b);
    c.relation = r;
    c.status = Status::Confirmed;
    c.provenance = Provenance::Manual;
    c.reviewer = "A1";
    return c;
}

}  // namespace

TEST(H1, PaperExample) {
    const auto a = verb({"كَتَبَ"}, {"يكتب", "أكتب"}, {}, {"ك ت ب"});
    const auto b = verb({"كَتبَ"}, {"يَكْتُبُ"}, {"أكتب"}, {});
    EXPECT_TRUE(h1_verb_match(a, b));
    EXPECT_TRUE(h1_verb_match(b, a));
}

TEST(H1, EmptyPvFails) { EXPECT_FALSE(h1_verb_match(verb({"كَتَبَ"}, {}, {}, {}), verb({}, {"يكتب"}, {}, {}))); }

TEST(H1, RootClash) {
    const auto a = verb({"كَتَبَ"}, {"يكتب", "أكتب"}, {}, {"ك ت ب"});
    const auto b = verb({"كَتبَ"}, {"يَكْتُبُ"}, {"أكتب"}, {"ق ر أ"});
    EXPECT_FALSE(h1_verb_match(a, b));
    // rule evaluated by hand: roots are the only failing condition
    EXPECT_TRUE(testsupport::oracle_sets({"كَتَبَ"}, {"كَتبَ"}));
    EXPECT_FALSE(testsupport::oracle_sets({"كتب"}, {"قرأ"}));
}

TEST(H1, NotAVerbPair) {
    try {
        h1_verb_match(modern(), ghani());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAVerbPair);
    }
}

TEST(H2, PaperExample) {
    EXPECT_TRUE(h2_noun_match(modern(), ghani()));
    EXPECT_TRUE(h2_noun_match(ghani(), sama()));
    EXPECT_FALSE(h2_noun_match(modern(), sama()));
    EXPECT_FALSE(testsupport::oracle_compatible("يَوْميّ", "يَوْمِيَّة"));
    EXPECT_TRUE(h2_noun_match(sama(), ghani()));
    EXPECT_FALSE(h2_noun_match(sama(), modern()));
}

TEST(H2, NotANounPair) {
    const auto v = verb({"كَتَبَ"}, {}, {}, {});
    EXPECT_THROW(h2_noun_match(v, v), Error);
}

TEST(H2, UnknownPosUsesFormEvidence) {
    auto a = ghani();
    a.pos = PosTag::UNKNOWN;
    EXPECT_TRUE(a.nominal());
    EXPECT_FALSE(a.verbal());
    EXPECT_EQ(match_pair(a, modern()), Provenance::HeuristicH2);
}

TEST(Automap, YawmiyyFixture) {
    const auto s = three_lexicons();
    MappingStore m;
    std::vector<Correspondence> all;
    for (auto [src, tgt] : {std::pair{"modern", "ghani"}, {"ghani", "sama"}, {"modern", "sama"}}) {
        const auto batch = automap(s, m, src, tgt);
        all.insert(all.end(), batch.candidates.begin(), batch.candidates.end());
    }
    EXPECT_EQ(pairs_of(all), (std::set<std::pair<std::string, std::string>>{
                                 {"ghani:3307", "modern:1021"}, {"ghani:3307", "sama:yawomiy~_1"}}));
    for (const auto& c : m.all()) {
        EXPECT_EQ(c.status, Status::Auto);
        EXPECT_EQ(c.relation, Relation::R1);
        EXPECT_EQ(c.provenance, Provenance::HeuristicH2);
    }
}

TEST(Automap, DisjointLexicons) {
    LexiconStore s;
    ingest(s, "modern", "modern.tsv");
    ingest(s, "verbs_a", "verbs_a.tsv");
    MappingStore m;
    const auto batch = automap(s, m, "modern", "verbs_a");
    EXPECT_TRUE(batch.candidates.empty());
    EXPECT_EQ(batch.stats.blocks, 0u);
    EXPECT_EQ(batch.stats.pairs_compared, 0u);
}

TEST(Automap, VerbFixtureAndErrors) {
    LexiconStore s;
    ingest(s, "verbs_a", "verbs_a.tsv");
    ingest(s, "verbs_b", "verbs_b.tsv");
    MappingStore m;
    const auto batch = automap(s, m, "verbs_a", "verbs_b");
    ASSERT_EQ(batch.candidates.size(), 1u);
    EXPECT_EQ(batch.candidates[0].provenance, Provenance::HeuristicH1);
    EXPECT_EQ(batch.candidates[0].id, 1u);
    try {
        automap(s, m, "verbs_a", "nope");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownLexicon);
    }
    // already linked: nothing new
    EXPECT_TRUE(automap(s, m, "verbs_b", "verbs_a").candidates.empty());
}

TEST(Automap, RejectedPairNotEmittedAgain) {
    const auto s = three_lexicons();
    MappingStore m;
    const auto first = automap(s, m, "modern", "ghani");
    ASSERT_EQ(first.candidates.size(), 1u);
    m.review(first.candidates[0].id, Decision::reject(), "A1");
    EXPECT_TRUE(automap(s, m, "modern", "ghani").candidates.empty());
    EXPECT_TRUE(automap(s, m, "ghani", "modern").candidates.empty());
}

TEST(Automap, HeadFormFallbackFromSpellings) {
    LexiconStore s;
    std::istringstream a("1\tيَوْمِيّ\tNOUN\t\t\t\t\tي و م\n"), b("x\tيومي\tNOUN\t\t\t\t\t\t\t\tيَوْمِيٌّ\n");
    s.ingest_lexicon({"a", "", "", false, 0}, a);
    s.ingest_lexicon({"b", "", "", false, 0}, b);
    MappingStore m;
    EXPECT_EQ(automap(s, m, "a", "b").candidates.size(), 1u);
}

TEST(Automap, MatchesBruteForceOnRandomLexicons) {
    std::mt19937 rng(2024);
    for (int round = 0; round < 5; ++round) {
        std::vector<std::string> seeds;
        for (int i = 0; i < 40; ++i) seeds.push_back(testsupport::random_word(rng, 0.3, 2, 3));
        const auto src = testsupport::random_lexicon(rng, 200, 0.3, seeds, "s");
        const auto tgt = testsupport::random_lexicon(rng, 200, 0.3, seeds, "t");
        LexiconStore s;
        std::istringstream a(testsupport::lexicon_tsv(src)), b(testsupport::lexicon_tsv(tgt));
        ASSERT_EQ(s.ingest_lexicon({"src", "", "", false, 0}, a).accepted, 200u);
        ASSERT_EQ(s.ingest_lexicon({"tgt", "", "", false, 0}, b).accepted, 200u);
        MappingStore m;
        const auto batch = find_candidates(s, m, "src", "tgt");
        std::set<std::tuple<std::string, std::string, std::string>> got;
        for (const auto& c : batch.candidates)
            got.insert({c.l1.local_id, c.l2.local_id, c.provenance == Provenance::HeuristicH1 ? "h1" : "h2"});
        const auto expected = testsupport::brute_force_matches(src, tgt);
        EXPECT_EQ(got, expected) << "round " << round;
        EXPECT_FALSE(expected.empty());
        EXPECT_LT(batch.stats.pairs_compared, 200u * 200u);
        // (source, target) local id order
        for (std::size_t i = 1; i < batch.candidates.size(); ++i) {
            const auto& p = batch.candidates[i - 1];
            const auto& q = batch.candidates[i];
            LocalIdLess less;
            EXPECT_TRUE(less(p.l1.local_id, q.l1.local_id) ||
                        (p.l1.local_id == q.l1.local_id && less(p.l2.local_id, q.l2.local_id)));
        }
    }
}

TEST(Heuristics, SymmetricOnRandomLexicons) {
    std::mt19937 rng(77);
    std::vector<std::string> seeds;
    for (int i = 0; i < 20; ++i) seeds.push_back(testsupport::random_word(rng, 0.3, 2, 3));
    const auto lex = testsupport::random_lexicon(rng, 60, 0.3, seeds, "x");
    LexiconStore s;
    std::istringstream in(testsupport::lexicon_tsv(lex));
    s.ingest_lexicon({"x", "", "", false, 0}, in);
    const auto forms = s.lexicon_forms("x");
    for (const auto& a : forms)
        for (const auto& b : forms) {
            if (a.verbal() && b.verbal()) EXPECT_EQ(h1_verb_match(a, b), h1_verb_match(b, a));
            if (a.nominal() && b.nominal()) EXPECT_EQ(h2_noun_match(a, b), h2_noun_match(b, a));
        }
}

TEST(Review, ConfirmRejectAndForce) {
    const auto s = three_lexicons();
    MappingStore m;
    automap(s, m, "modern", "ghani");
    automap(s, m, "ghani", "sama");
    const auto& c = m.review(1, Decision::confirm(Relation::R2), "A1");
    EXPECT_EQ(c.status, Status::Confirmed);
    EXPECT_EQ(c.relation, Relation::R2);
    EXPECT_EQ(m.precision(c), 90);
    EXPECT_EQ(c.reviewer, "A1");
    try {
        m.review(1, Decision::reject(), "A2");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AlreadyDecided);
    }
    EXPECT_EQ(m.review(1, Decision::confirm(Relation::R1), "A2", true).relation, Relation::R1);
    EXPECT_EQ(m.audit().size(), 2u);
    EXPECT_EQ(m.audit()[1].before.relation, Relation::R2);

    try {
        m.review(99, Decision::confirm(Relation::R1), "A1");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownCorrespondence);
    }
    EXPECT_THROW(relation_or_throw("R7"), Error);
    EXPECT_THROW(m.review(2, Decision::reject(), ""), Error);
}

TEST(Manual, DialectToMsaAndDuplicates) {
    MappingStore m;
    const auto q1 = LemmaRef::canonical(1), q2 = LemmaRef::canonical(2);
    const auto exists = [](const LemmaRef& r) { return r.is_canonical(); };
    const auto& c = m.manual_map(q2, q1, Relation::R1, "A1", exists);
    EXPECT_EQ(c.status, Status::Confirmed);
    EXPECT_EQ(c.provenance, Provenance::Manual);
    try {
        m.manual_map(q1, q2, Relation::R2, "A1", exists);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicatePair);
    }
    try {
        m.manual_map(q1, q1, Relation::R1, "A1");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SelfMapping);
    }
    try {
        m.manual_map(q1, {"sama", "x"}, Relation::R1, "A1", exists);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownLemma);
    }
    EXPECT_EQ(m.size(), 1u);
}

TEST(Manual, AllowedAfterRejection) {
    MappingStore m;
    const auto id = m.add_auto({"a", "1"}, {"b", "1"}, Provenance::HeuristicH2);
    m.review(id, Decision::reject(), "A1");
    EXPECT_EQ(m.manual_map({"b", "1"}, {"a", "1"}, Relation::R3, "A1").id, 2u);
    // the rejected one cannot come back while the manual link is active
    try {
        m.review(id, Decision::confirm(Relation::R1), "A1", true);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicatePair);
    }
}

TEST(Precision, Weights) {
    const PrecisionTable p;
    EXPECT_EQ(p(Relation::R1), 100);
    EXPECT_EQ(p(Relation::R2), 90);
    EXPECT_EQ(p(Relation::R3), 80);
    EXPECT_EQ(p(Relation::R4), 70);
    EXPECT_EQ(p(Relation::R5), 60);
    EXPECT_EQ(p(Relation::R6), 40);
    EXPECT_EQ(p(Relation::X1), 50);
    EXPECT_EQ(p(Relation::X2), 30);
    EXPECT_EQ(p(Relation::X3), 30);
    EXPECT_EQ(p(Relation::X4), 20);
    EXPECT_EQ(p(Relation::X5), 10);
    EXPECT_EQ(PrecisionTable{45}(Relation::X2), 45);
}

TEST(Precision, Filter) {
    std::vector<Correspondence> three = {confirmed("a:1", "b:1", Relation::R1), confirmed("a:2", "b:2", Relation::R2),
                                         confirmed("a:3", "b:3", Relation::X3)};
    const auto top = filter_by_precision(three, 100);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0].relation, Relation::R1);
    EXPECT_EQ(filter_by_precision(three, 0), three);

    std::vector<Correspondence> core;
    int i = 0;
    for (auto r : kCoreRelations) core.push_back(confirmed("a:" + std::to_string(++i), "b:1", r));
    std::set<Relation> kept;
    for (const auto& c : filter_by_precision(core, 60)) kept.insert(c.relation);
    EXPECT_EQ(kept, (std::set<Relation>{Relation::R1, Relation::R2, Relation::R3, Relation::R4, Relation::R5}));

    std::vector<Correspondence> every;
    for (auto r : kAllRelations) every.push_back(confirmed("a:" + std::to_string(++i), "b:1", r));
    for (int t1 = 0; t1 <= 100; t1 += 5)
        for (int t2 = t1; t2 <= 100; t2 += 5) {
            const auto lo = filter_by_precision(every, t1), hi = filter_by_precision(every, t2);
            for (const auto& c : hi) EXPECT_NE(std::find(lo.begin(), lo.end(), c), lo.end());
        }
}

TEST(Counts, HandCountedAndEmpty) {
    MappingStore m;
    for (int i = 1; i <= 3; ++i) m.insert(confirmed("a:" + std::to_string(i), "qabas:1", Relation::R1));
    m.insert(confirmed("a:9", "qabas:2", Relation::R6));
    auto rejected = confirmed("a:8", "qabas:2", Relation::R2);
    rejected.status = Status::Rejected;
    m.insert(rejected);
    const auto counts = m.relation_counts();
    EXPECT_EQ(counts.at(Relation::R1), 3u);
    EXPECT_EQ(counts.at(Relation::R6), 1u);
    EXPECT_EQ(counts.at(Relation::R2), 0u);
    std::size_t total = 0;
    for (const auto& [_, n] : counts) total += n;
    EXPECT_EQ(total, 4u);
    EXPECT_EQ(m.relation_counts(std::pair<std::string, std::string>{"qabas", "a"}).at(Relation::R1), 3u);
    EXPECT_EQ(m.relation_counts(std::pair<std::string, std::string>{"qabas", "b"}).at(Relation::R1), 0u);
    for (const auto& [_, n] : MappingStore{}.relation_counts()) EXPECT_EQ(n, 0u);
}

TEST(Import, RoundTripIsNoOpAndFixpoint) {
    const auto s = three_lexicons();
    MappingStore m;
    automap(s, m, "modern", "ghani");
    automap(s, m, "ghani", "sama");
    m.review(1, Decision::reject(), "A1");
    m.manual_map({"modern", "1021"}, {"ghani", "3307"}, Relation::R4, "A2");
    m.review(2, Decision::confirm(Relation::R2), "A1");
    m.review(3, Decision::reject(), "A2", true);
    m.review(1, Decision::confirm(Relation::R1), "A1", true);  // active again, followed by a rejected row
    std::ostringstream out;
    m.export_tsv(out);

    std::istringstream same(out.str());
    EXPECT_EQ(m.import_tsv(same).changed, 0u);

    MappingStore fresh;
    std::istringstream in(out.str());
    const auto r = fresh.import_tsv(in);
    EXPECT_EQ(r.rows, 3u);
    EXPECT_EQ(r.changed, 3u);
    std::ostringstream again;
    fresh.export_tsv(again);
    EXPECT_EQ(again.str(), out.str());
}

TEST(Import, OfflineDecisionUpdatesActiveLink) {
    MappingStore m;
    m.add_auto({"a", "1"}, {"b", "1"}, Provenance::HeuristicH2);
    std::istringstream in("a:1\tb:1\tR3\t80\tCONFIRMED\tHEURISTIC_H2\tA1\t1\n");
    EXPECT_EQ(m.import_tsv(in).changed, 1u);
    EXPECT_EQ(m.size(), 1u);
    EXPECT_EQ(m.get(1).status, Status::Confirmed);
    EXPECT_EQ(m.get(1).relation, Relation::R3);
}

TEST(Import, AllOrNothing) {
    MappingStore m;
    m.add_auto({"a", "1"}, {"b", "1"}, Provenance::HeuristicH2);
    std::istringstream in("a:2\tb:2\tR1\t100\tCONFIRMED\tMANUAL\tA1\t5\n"
                          "a:3\tb:3\tR1\t90\tCONFIRMED\tMANUAL\tA1\t6\n"
                          "a:4\ta:4\tR1\t100\tCONFIRMED\tMANUAL\tA1\t7\n"
                          "a:5\tb:5\tR1\t100\tAUTO\tMANUAL\t\t8\n");
    try {
        m.import_tsv(in);
        FAIL();
    } catch (const ImportError& e) {
        ASSERT_EQ(e.rows().size(), 3u);
        EXPECT_EQ(e.rows()[0].row, 2u);
    }
    EXPECT_EQ(m.size(), 1u);
}

TEST(Json, ExportParsesBack) {
    MappingStore m;
    m.manual_map({"a", "1"}, {"b", "1"}, Relation::X2, "A1");
    std::ostringstream out;
    m.export_jsonl(out);
    const auto c = m.parse_json(nlohmann::json::parse(out.str()));
    EXPECT_TRUE(c.same_content(m.get(1)));
}
