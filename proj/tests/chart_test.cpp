#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "agx/chart.hpp"
#include "agx/extract.hpp"

using namespace agx;

namespace {

// "The old man the boats" grammar with dictionary confidences carried as
// unary rule probabilities.
const char* kGardenPathGrammar =
    "@start S\n"
    "@default_noise min=0 max=0\n"
    "S -> NP VP ; prob=0.9\n"
    "NP -> det n ; prob=0.7\n"
    "VP -> v det n ; prob=0.6\n"
    "det -> \"the\" ; prob=0.9\n"
    "adj -> \"old\" ; prob=0.6\n"
    "n -> \"old\" ; prob=0.3\n"
    "n -> \"man\" ; prob=0.7\n"
    "v -> \"man\" ; prob=0.25\n"
    "n -> \"boats\" ; prob=0.8\n";

const char* kSaharaText =
    "<name> Sachin Tendulkar </name> plays for <country> India </country> that is being "
    "sponsored by <name> Mr. Sahara </name>";

const char* kCalcuttaText =
    "<name> Sachin Tendulkar </name> made <runs> a duck </runs>. Hope he does well in "
    "<location> Calcutta </location>.";

Grammar calcutta_grammar(std::size_t max_noise) {
    return parse_grammar(
        "SN -> noise ; minlength=0, maxlength=" + std::to_string(max_noise) + "\n" +
        "IMP -> {name} SN {runs} SN {location} ; prob=1.0\n");
}

}  // namespace

TEST(MatchTerminal, LiteralMatchesCaseInsensitively) {
    auto doc = parse_annotated_document("<name>Kapil Dev</name> Bowled <balls>5</balls>", "d");
    auto m = match_terminal(TerminalSpec{LiteralTerm{"bowled"}}, doc, 2);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_DOUBLE_EQ(m[0].confidence, 1.0);
    EXPECT_EQ(m[0].tokens, (TokenSpan{2, 3}));
    EXPECT_TRUE(match_terminal(TerminalSpec{LiteralTerm{"bowled"}}, doc, 0).empty());
}

TEST(MatchTerminal, RootMatchesThroughLexicon) {
    auto plain = parse_annotated_document("Tendulkar made a century", "d2");
    RootTerm rt{"score", {"make", "hit", "score"}};
    RootLexicon lex{{"make", {"made", "makes", "making"}}};
    auto m = match_terminal(TerminalSpec{rt}, plain, 1, lex);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_DOUBLE_EQ(m[0].confidence, 1.0);
    EXPECT_TRUE(match_terminal(TerminalSpec{rt}, plain, 0, lex).empty());
}

TEST(MatchTerminal, ProbeMatchesOnlyAtAnnotation) {
    auto doc = parse_annotated_document("<name>Kapil Dev</name> bowled <runs>55</runs>", "d");
    auto m = match_terminal(TerminalSpec{ProbeTerm{"runs"}}, doc, 3);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].chars, doc.probes[1].chars);
    // no runs annotation starting at token 2
    EXPECT_TRUE(match_terminal(TerminalSpec{ProbeTerm{"runs"}}, doc, 2).empty());
    // wrong category
    EXPECT_TRUE(match_terminal(TerminalSpec{ProbeTerm{"balls"}}, doc, 3).empty());
}

TEST(MatchTerminal, ProbeSpansAreAtomic) {
    auto doc = parse_annotated_document("<country>India</country> won", "d");
    // a literal never matches a token inside a probe span
    EXPECT_TRUE(match_terminal(TerminalSpec{LiteralTerm{"india"}}, doc, 0).empty());
    EXPECT_FALSE(match_terminal(TerminalSpec{LiteralTerm{"won"}}, doc, 1).empty());
}

TEST(MatchTerminal, ProbeConfidenceCarries) {
    auto doc = parse_annotated_document("<name conf=\"0.7\">Lara</name>", "d");
    auto m = match_terminal(TerminalSpec{ProbeTerm{"name"}}, doc, 0);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_DOUBLE_EQ(m[0].confidence, 0.7);
}

TEST(ScoreNode, PaperArithmetic) {
    EXPECT_NEAR(score_node(0.7, {0.9, 0.3}), 0.42, 1e-12);
    EXPECT_NEAR(score_node(0.6, {0.25, 0.9, 0.8}), 0.39, 1e-12);
    EXPECT_DOUBLE_EQ(score_node(1.0, {1.0}), 1.0);
}

TEST(ScoreNode, EmptyChildListIsContractViolation) {
    EXPECT_THROW(score_node(0.5, {}), std::invalid_argument);
}

TEST(BuildChart, GardenPathSentenceHasSpanningS) {
    Grammar g = parse_grammar(kGardenPathGrammar);
    auto doc = parse_annotated_document("The old man the boats", "fig2");
    Chart chart = build_chart(doc, g);
    EXPECT_TRUE(chart.has_passive("S", CharSpan{0, doc.raw_text.size()}));
    EXPECT_TRUE(chart.has_passive("NP", CharSpan{0, 7}));
    EXPECT_TRUE(chart.has_passive("VP", CharSpan{8, 21}));
}

TEST(BuildChart, EmptyDocumentHasNoEdges) {
    Grammar g = parse_grammar(kGardenPathGrammar);
    auto doc = parse_annotated_document("", "empty");
    Chart chart = build_chart(doc, g);
    EXPECT_EQ(chart.edge_count(), 0u);
}

TEST(BuildChart, ProximityRejectionBlocksWideGap) {
    auto doc = parse_annotated_document(kCalcuttaText, "calcutta");
    Chart chart = build_chart(doc, calcutta_grammar(10));
    EXPECT_TRUE(chart.passive_for("IMP").empty());
    // the same chart still holds the partial parses (terminal edges)
    EXPECT_GT(chart.edge_count(), 0u);
    // bounds admitting the measured 22-char gap let the parse through
    Chart wide = build_chart(doc, calcutta_grammar(22));
    EXPECT_FALSE(wide.passive_for("IMP").empty());
    Chart narrow = build_chart(doc, calcutta_grammar(21));
    EXPECT_TRUE(narrow.passive_for("IMP").empty());
}

TEST(BuildChart, PacksIdenticalSymbolSpans) {
    Grammar g = parse_grammar(
        "IMP -> {a} \"x\" {b} ; prob=0.4\n"
        "IMP -> {a} {b} ; prob=0.6\n");
    auto doc = parse_annotated_document("<a>p</a> x <b>q</b>", "d");
    Chart chart = build_chart(doc, g);
    auto imps = chart.passive_for("IMP");
    ASSERT_EQ(imps.size(), 1u);  // one packed edge, two derivations
    EXPECT_EQ(chart.passive[imps[0]].derivations.size(), 2u);
}

TEST(BuildChart, EdgeCapIsEnforced) {
    Grammar g = parse_grammar("IMP -> {a} {b} ; prob=0.5\n");
    auto doc = parse_annotated_document("<a>p</a> <b>q</b>", "d");
    ChartOptions opts;
    opts.edge_cap = 1;
    EXPECT_THROW(build_chart(doc, g, opts), resource_error);
}

TEST(EnumerateParses, GardenPathScores) {
    Grammar g = parse_grammar(kGardenPathGrammar);
    auto doc = parse_annotated_document("The old man the boats", "fig2");
    Chart chart = build_chart(doc, g);
    auto parses = enumerate_parses(chart, "S");
    ASSERT_EQ(parses.size(), 1u);
    const auto& s = parses[0];
    EXPECT_NEAR(s->score, 0.3645, 1e-9);
    ASSERT_EQ(s->children.size(), 3u);  // NP, noise, VP
    const auto& np = std::get<ParseNodePtr>(s->children[0]);
    const auto& vp = std::get<ParseNodePtr>(s->children[2]);
    EXPECT_EQ(np->symbol, "NP");
    EXPECT_NEAR(np->score, 0.42, 1e-9);
    EXPECT_EQ(vp->symbol, "VP");
    EXPECT_NEAR(vp->score, 0.39, 1e-9);
}

TEST(EnumerateParses, AmbiguousReadingsRankByRuleProbability) {
    const char* text =
        "<degree>B.A</degree> <name>Ambedkar</name> is highly honored in "
        "<country>India</country>.";
    auto doc = parse_annotated_document(text, "ambedkar");
    Grammar g = parse_grammar(
        "IMP -> {name} \"honored\" {country} ; prob=0.3\n"
        "IMP -> {degree} \"honored\" {country} ; prob=0.2\n");
    Chart chart = build_chart(doc, g);
    auto parses = enumerate_parses(chart, "IMP");
    ASSERT_EQ(parses.size(), 2u);
    EXPECT_EQ(parses[0]->rule_id, "U#0");  // the {name} reading
    EXPECT_NEAR(parses[0]->score, 0.3, 1e-12);
    EXPECT_NEAR(parses[1]->score, 0.2, 1e-12);
}

TEST(EnumerateParses, NoMatchingRules) {
    Grammar g = parse_grammar("IMP -> {name} ; prob=1.0\n");
    auto doc = parse_annotated_document("no annotations here", "d");
    Chart chart = build_chart(doc, g);
    EXPECT_TRUE(enumerate_parses(chart, "IMP").empty());
}

TEST(Extract, SaharaDisambiguation) {
    auto doc = parse_annotated_document(kSaharaText, "sahara");
    Grammar g = parse_grammar(
        "IMP -> {country} {name} ; prob=0.1\n"
        "IMP -> {name} {country} ; prob=0.3\n");
    auto extractions = extract(doc, g);
    ASSERT_EQ(extractions.size(), 1u);
    EXPECT_EQ(extractions[0].text, "Sachin Tendulkar plays for India");
    EXPECT_NEAR(extractions[0].score, 0.3, 1e-12);
    EXPECT_EQ(extractions[0].rule_id, "U#1");
}

TEST(Extract, CalcuttaYieldsNothingUnderTightNoise) {
    auto doc = parse_annotated_document(kCalcuttaText, "calcutta");
    EXPECT_TRUE(extract(doc, calcutta_grammar(10)).empty());
    EXPECT_EQ(extract(doc, calcutta_grammar(22)).size(), 1u);
}

TEST(Extract, NoProbesNoExtractions) {
    Grammar g = parse_grammar("IMP -> {name} {runs} ; prob=0.5\n");
    auto doc = parse_annotated_document("plain text with no annotations at all", "d");
    EXPECT_TRUE(extract(doc, g).empty());
}

TEST(Extract, NoiseMaySpanUnmatchedProbes) {
    auto doc = parse_annotated_document("<a>x</a> w1 <b>y</b> w2 <c>z</c>", "d");
    Grammar g = parse_grammar("IMP -> {a} {c} ; prob=1.0\n");  // default noise 0..40
    auto extractions = extract(doc, g);
    ASSERT_EQ(extractions.size(), 1u);
    EXPECT_EQ(extractions[0].text, "x w1 y w2 z");
}

TEST(Extract, SelectionsAreNonOverlappingAndInDocumentOrder) {
    auto doc = parse_annotated_document(
        "<a>p1</a> v <b>q1</b>. Later on that same long day <a>p2</a> v <b>q2</b>", "d");
    Grammar g = parse_grammar(
        "SN -> noise ; minlength=0, maxlength=4\n"
        "IMP -> {a} SN {b} ; prob=0.5\n");
    auto extractions = extract(doc, g);
    ASSERT_EQ(extractions.size(), 2u);
    EXPECT_LT(extractions[0].chars.end, extractions[1].chars.begin);
    EXPECT_EQ(extractions[0].text, "p1 v q1");
    EXPECT_EQ(extractions[1].text, "p2 v q2");
}

TEST(Extract, TwoNonOverlappingStringsFromOneRule) {
    // the same rule may fire more than once per document
    auto doc = parse_annotated_document("<a>x</a> w <a>y</a>", "d");
    Grammar g = parse_grammar("IMP -> {a} ; prob=1.0\n");
    EXPECT_EQ(extract(doc, g).size(), 2u);
}

TEST(Explain, GardenPathReportShowsScoreArithmetic) {
    Grammar g = parse_grammar(kGardenPathGrammar);
    auto doc = parse_annotated_document("The old man the boats", "fig2");
    auto extractions = extract(doc, g);
    ASSERT_EQ(extractions.size(), 1u);
    std::string report = explain(doc, g, extractions[0]);
    EXPECT_NE(report.find("0.42"), std::string::npos) << report;
    EXPECT_NE(report.find("0.39"), std::string::npos) << report;
    EXPECT_NE(report.find("0.3645"), std::string::npos) << report;
}

TEST(Explain, SaharaReportNamesRuleProbability) {
    auto doc = parse_annotated_document(kSaharaText, "sahara");
    Grammar g = parse_grammar(
        "IMP -> {country} {name} ; prob=0.1\n"
        "IMP -> {name} {country} ; prob=0.3\n");
    auto extractions = extract(doc, g);
    ASSERT_EQ(extractions.size(), 1u);
    std::string report = explain(doc, g, extractions[0]);
    EXPECT_NE(report.find("0.3"), std::string::npos) << report;
    EXPECT_NE(report.find("noise"), std::string::npos) << report;
}

TEST(Explain, SingleTerminalRule) {
    auto doc = parse_annotated_document("<a>x</a>", "d");
    Grammar g = parse_grammar("IMP -> {a} ; prob=1.0\n");
    auto extractions = extract(doc, g);
    ASSERT_EQ(extractions.size(), 1u);
    EXPECT_FALSE(explain(doc, g, extractions[0]).empty());
}

TEST(Explain, StaleExtractionRejected) {
    auto doc = parse_annotated_document("<a>x</a>", "d");
    Grammar g = parse_grammar("IMP -> {a} ; prob=1.0\n");
    auto extractions = extract(doc, g);
    ASSERT_EQ(extractions.size(), 1u);
    Extraction stale = extractions[0];
    stale.rule_id = "U#99";
    EXPECT_THROW(explain(doc, g, stale), error);
    Extraction wrong_doc = extractions[0];
    wrong_doc.doc_id = "other";
    EXPECT_THROW(explain(doc, g, wrong_doc), error);
}

// every noise fill in a returned parse respects its bounds
TEST(Parses, NoiseSoundness) {
    auto doc = parse_annotated_document(kSaharaText, "sahara");
    Grammar g = parse_grammar(
        "IMP -> {country} {name} ; prob=0.1\n"
        "IMP -> {name} {country} ; prob=0.3\n");
    Chart chart = build_chart(doc, g);
    auto parses = enumerate_parses(chart, "IMP");
    ASSERT_FALSE(parses.empty());
    for (const auto& p : parses) {
        for (const auto& child : p->children) {
            if (const auto* nf = std::get_if<NoiseFill>(&child)) {
                EXPECT_GE(nf->gap_len, nf->spec.min_chars);
                EXPECT_LE(nf->gap_len, nf->spec.max_chars);
                EXPECT_EQ(nf->gap_len, gap_chars(doc, nf->chars.begin, nf->chars.end));
            }
        }
    }
}

TEST(Parses, MinimumNoiseBoundIsEnforced) {
    auto doc = parse_annotated_document("<a>x</a> <b>y</b>", "d");
    Grammar g = parse_grammar(
        "SN -> noise ; minlength=2, maxlength=10\n"
        "IMP -> {a} SN {b} ; prob=1.0\n");
    EXPECT_TRUE(extract(doc, g).empty());  // whitespace-only gap measures 0 < 2
    auto doc2 = parse_annotated_document("<a>x</a> and <b>y</b>", "d");
    EXPECT_EQ(extract(doc2, g).size(), 1u);
}
