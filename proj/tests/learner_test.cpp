#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "agx/extract.hpp"
#include "agx/learner.hpp"

using namespace agx;

namespace {

std::vector<AnnotatedDocument> fig3_corpus() {
    return {
        parse_annotated_document(
            "<IMP> <name>Dravid</name> hit <runs>67 runs</runs> in the match </IMP>.", "t1"),
        parse_annotated_document(
            "<IMP> <name>Sachin</name> made <runs>56</runs> before dawn </IMP>.", "t2"),
        parse_annotated_document(
            "<IMP> <name>Laxman</name> made <runs>34</runs> at the end of the innings </IMP>.",
            "t3"),
    };
}

std::map<std::string, std::size_t> slot_counts(const std::vector<TrigramStat>& stats,
                                               std::size_t slot) {
    std::map<std::string, std::size_t> out;
    for (const auto& s : stats)
        if (s.slot == slot) out[s.interior ? *s.interior : "<null>"] = s.count;
    return out;
}

std::vector<std::string> probe_sequence_of(const Rule& r) {
    std::vector<std::string> seq;
    for (const auto& sym : r.rhs)
        if (const auto* t = std::get_if<TerminalSpec>(&sym))
            if (const auto* p = std::get_if<ProbeTerm>(t)) seq.push_back(p->category);
    return seq;
}

std::vector<std::string> literals_of(const Rule& r) {
    std::vector<std::string> out;
    for (const auto& sym : r.rhs)
        if (const auto* t = std::get_if<TerminalSpec>(&sym))
            if (const auto* l = std::get_if<LiteralTerm>(t)) out.push_back(l->word);
    return out;
}

}  // namespace

TEST(CollectInstances, Fig3Shapes) {
    auto instances = collect_instances(fig3_corpus());
    ASSERT_EQ(instances.size(), 3u);
    for (const auto& inst : instances) {
        EXPECT_EQ(inst.probe_sequence, (std::vector<std::string>{"name", "runs"}));
        EXPECT_EQ(inst.slot_gaps.size(), 3u);
    }
    EXPECT_EQ(instances[0].slot_gaps[0].text, "");
    EXPECT_EQ(instances[0].slot_gaps[1].text, "hit");
    EXPECT_EQ(instances[0].slot_gaps[1].chars, 3u);
    EXPECT_EQ(instances[0].slot_gaps[2].text, "in the match");
    EXPECT_EQ(instances[0].slot_gaps[2].chars, 12u);
    EXPECT_EQ(instances[1].slot_gaps[2].chars, 11u);  // "before dawn"
    EXPECT_EQ(instances[2].slot_gaps[2].chars, 25u);  // "at the end of the innings"
}

TEST(CollectInstances, ProbeOnlySpanHasNullEligibleGaps) {
    auto doc = parse_annotated_document("<IMP><name>Dravid</name> <runs>67</runs></IMP>", "d");
    auto instances = collect_instances({doc});
    ASSERT_EQ(instances.size(), 1u);
    EXPECT_EQ(instances[0].slot_gaps[0].text, "");
    EXPECT_EQ(instances[0].slot_gaps[1].text, "");
    EXPECT_EQ(instances[0].slot_gaps[2].text, "");
}

TEST(CollectInstances, EmptyCorpusAndProbelessGold) {
    EXPECT_TRUE(collect_instances({}).empty());
    auto doc = parse_annotated_document("<IMP>nothing tagged here</IMP>", "d");
    std::vector<Diagnostic> warnings;
    auto instances = collect_instances({doc}, &warnings);
    EXPECT_TRUE(instances.empty());
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_EQ(warnings[0].severity, Severity::warning);
}

TEST(Clustering, Fig3FormsOneCluster) {
    auto clusters = cluster_by_tag_sequence(collect_instances(fig3_corpus()));
    ASSERT_EQ(clusters.size(), 1u);
    EXPECT_EQ(clusters[0].key, (std::vector<std::string>{"name", "runs"}));
    EXPECT_EQ(clusters[0].instances.size(), 3u);
}

TEST(Clustering, DistinctKeysSeparateAndOrderBySize) {
    auto docs = fig3_corpus();
    docs.push_back(
        parse_annotated_document("<IMP><team>India</team> won by <runs>4</runs></IMP>", "t4"));
    auto clusters = cluster_by_tag_sequence(collect_instances(docs));
    ASSERT_EQ(clusters.size(), 2u);
    EXPECT_EQ(clusters[0].key, (std::vector<std::string>{"name", "runs"}));  // larger first
    EXPECT_EQ(clusters[1].key, (std::vector<std::string>{"team", "runs"}));
}

TEST(Clustering, EmptyInput) {
    EXPECT_TRUE(cluster_by_tag_sequence({}).empty());
}

TEST(TrigramStats, Fig3Counts) {
    auto clusters = cluster_by_tag_sequence(collect_instances(fig3_corpus()));
    auto stats = compute_trigram_stats(clusters[0]);
    EXPECT_EQ(slot_counts(stats, 0),
              (std::map<std::string, std::size_t>{{"<null>", 3}}));
    EXPECT_EQ(slot_counts(stats, 1),
              (std::map<std::string, std::size_t>{{"hit", 1}, {"made", 2}}));
    EXPECT_EQ(slot_counts(stats, 2),
              (std::map<std::string, std::size_t>{{"match", 1}, {"dawn", 1}, {"innings", 1}}));
    for (const auto& s : stats) {
        if (s.slot == 0) EXPECT_EQ(s.left_symbol, kStartSymbol);
        if (s.slot == 2) EXPECT_EQ(s.right_symbol, kEndSymbol);
        if (s.slot == 1) {
            EXPECT_EQ(s.left_symbol, "name");
            EXPECT_EQ(s.right_symbol, "runs");
        }
    }
}

TEST(TrigramStats, PerSlotCountsSumToClusterSize) {
    auto clusters = cluster_by_tag_sequence(collect_instances(fig3_corpus()));
    auto stats = compute_trigram_stats(clusters[0]);
    for (std::size_t slot = 0; slot < 3; ++slot) {
        std::size_t total = 0;
        for (const auto& s : stats)
            if (s.slot == slot) total += s.count;
        EXPECT_EQ(total, 3u);
    }
}

TEST(FilterByRho, Fig3AtHalf) {
    auto clusters = cluster_by_tag_sequence(collect_instances(fig3_corpus()));
    auto stats = compute_trigram_stats(clusters[0]);
    auto kept = filter_by_rho(stats, 0.5);
    EXPECT_EQ(slot_counts(kept, 1), (std::map<std::string, std::size_t>{{"made", 2}}));
    EXPECT_TRUE(slot_counts(kept, 2).empty());  // every interior sits at 1/3 < 0.5
    EXPECT_EQ(slot_counts(kept, 0), (std::map<std::string, std::size_t>{{"<null>", 3}}));
}

TEST(FilterByRho, ZeroIsVacuousAndOneDemandsUnanimity) {
    auto clusters = cluster_by_tag_sequence(collect_instances(fig3_corpus()));
    auto stats = compute_trigram_stats(clusters[0]);
    EXPECT_EQ(filter_by_rho(stats, 0.0), stats);
    auto kept = filter_by_rho(stats, 1.0);
    EXPECT_TRUE(slot_counts(kept, 1).empty());
    EXPECT_TRUE(slot_counts(kept, 2).empty());
    EXPECT_EQ(slot_counts(kept, 0), (std::map<std::string, std::size_t>{{"<null>", 3}}));
}

TEST(NoiseBounds, Fig3MaximaAndSlack) {
    auto clusters = cluster_by_tag_sequence(collect_instances(fig3_corpus()));
    auto bounds = learn_noise_bounds(clusters[0], LearnerConfig{});
    ASSERT_EQ(bounds.size(), 3u);
    EXPECT_EQ(bounds[0], (NoiseSpec{0, 0}));
    EXPECT_EQ(bounds[1], (NoiseSpec{0, 4}));   // "made"
    EXPECT_EQ(bounds[2], (NoiseSpec{0, 25}));  // "at the end of the innings"
    LearnerConfig slack;
    slack.noise_slack_chars = 5;
    EXPECT_EQ(learn_noise_bounds(clusters[0], slack)[1], (NoiseSpec{0, 9}));
}

TEST(GenerateRules, Fig3AtRhoZeroProducesSevenRules) {
    auto clusters = cluster_by_tag_sequence(collect_instances(fig3_corpus()));
    LearnerConfig cfg;  // rho 0, generic mass 0.5
    auto rules = generate_rules(clusters[0], cfg, 0);
    ASSERT_EQ(rules.size(), 7u);

    std::vector<double> probs;
    for (const auto& r : rules) probs.push_back(r.probability);
    std::sort(probs.begin(), probs.end(), std::greater<>());
    EXPECT_NEAR(probs[0], 0.5, 1e-3);
    for (int i = 1; i <= 3; ++i) EXPECT_NEAR(probs[i], 0.1111, 1e-3);
    for (int i = 4; i <= 6; ++i) EXPECT_NEAR(probs[i], 0.0556, 1e-3);

    // generic rule first, probes separated by the learned noise
    EXPECT_EQ(rules[0].id, "L0#0");
    EXPECT_EQ(probe_sequence_of(rules[0]), (std::vector<std::string>{"name", "runs"}));
    EXPECT_TRUE(literals_of(rules[0]).empty());

    std::size_t made_rules = 0, hit_rules = 0;
    for (const auto& r : rules) {
        auto lits = literals_of(r);
        if (!lits.empty() && lits.front() == "made") ++made_rules;
        if (!lits.empty() && lits.front() == "hit") ++hit_rules;
    }
    EXPECT_EQ(made_rules, 3u);
    EXPECT_EQ(hit_rules, 3u);
}

TEST(GenerateRules, Fig3AtRhoHalfCollapsesToTwoRules) {
    auto clusters = cluster_by_tag_sequence(collect_instances(fig3_corpus()));
    LearnerConfig cfg;
    cfg.rho = 0.5;
    auto rules = generate_rules(clusters[0], cfg, 0);
    ASSERT_EQ(rules.size(), 2u);
    EXPECT_NEAR(rules[0].probability, 0.5, 1e-12);  // generic
    EXPECT_NEAR(rules[1].probability, 0.5, 1e-12);  // {name} "made" {runs}
    EXPECT_EQ(literals_of(rules[1]), (std::vector<std::string>{"made"}));
    EXPECT_EQ(probe_sequence_of(rules[1]), (std::vector<std::string>{"name", "runs"}));
}

TEST(GenerateRules, DegenerateClusterMergesAllNullIntoGeneric) {
    auto doc = parse_annotated_document("<IMP><name>Dravid</name> <runs>67</runs></IMP>", "d");
    auto clusters = cluster_by_tag_sequence(collect_instances({doc}));
    auto rules = generate_rules(clusters[0], LearnerConfig{}, 0);
    ASSERT_EQ(rules.size(), 1u);
    EXPECT_NEAR(rules[0].probability, 1.0, 1e-12);
    EXPECT_TRUE(literals_of(rules[0]).empty());
}

TEST(GenerateRules, EverySlotKeepsClusterKey) {
    auto clusters = cluster_by_tag_sequence(collect_instances(fig3_corpus()));
    for (double rho : {0.0, 0.3, 0.5, 0.8, 1.0}) {
        LearnerConfig cfg;
        cfg.rho = rho;
        for (const auto& r : generate_rules(clusters[0], cfg, 0))
            EXPECT_EQ(probe_sequence_of(r), clusters[0].key);
    }
}

TEST(LearnGrammar, Fig3ComposesSevenRuleGrammar) {
    auto result = learn_grammar(fig3_corpus(), LearnerConfig{});
    EXPECT_EQ(result.grammar.rules.size(), 7u);
    EXPECT_EQ(result.grammar.start_symbols, (std::set<std::string>{"IMP"}));
    EXPECT_TRUE(result.warnings.empty());
    // learner output validates cleanly (unit cluster mass)
    EXPECT_TRUE(validate_grammar(result.grammar).empty());
    ASSERT_EQ(result.stats.size(), 1u);
    EXPECT_EQ(result.stats[0].key, (std::vector<std::string>{"name", "runs"}));
    EXPECT_EQ(result.stats[0].instances, 3u);
    ASSERT_EQ(result.stats[0].slots.size(), 3u);
    EXPECT_EQ(result.stats[0].slots[1].interiors.at("made"), 2u);
    EXPECT_EQ(result.stats[0].slots[2].max_gap, 25u);
}

TEST(LearnGrammar, DisjointClustersCarryUnitMassEach) {
    auto docs = fig3_corpus();
    docs.push_back(parse_annotated_document(
        "<IMP><team>India</team> won by <wickets>4 wickets</wickets></IMP>", "t4"));
    docs.push_back(parse_annotated_document(
        "<IMP><team>Kenya</team> lost by <wickets>7 wickets</wickets></IMP>", "t5"));
    auto result = learn_grammar(docs, LearnerConfig{});
    std::map<char, double> mass_by_cluster;
    std::map<std::string, double> mass;
    for (const auto& r : result.grammar.rules)
        mass[r.id.substr(0, r.id.find('#'))] += r.probability;
    ASSERT_EQ(mass.size(), 2u);
    EXPECT_NEAR(mass["L0"], 1.0, 1e-9);
    EXPECT_NEAR(mass["L1"], 1.0, 1e-9);
}

TEST(LearnGrammar, NoGoldSpansIsAnError) {
    auto doc = parse_annotated_document("<name>Kapil Dev</name> bowled", "d");
    EXPECT_THROW(learn_grammar({doc}, LearnerConfig{}), validation_error);
    EXPECT_THROW(learn_grammar({}, LearnerConfig{}), validation_error);
}

TEST(LearnGrammar, RhoOutsideRangeRejected) {
    LearnerConfig cfg;
    cfg.rho = 1.5;
    EXPECT_THROW(learn_grammar(fig3_corpus(), cfg), validation_error);
}

// at rho=0 every training gold span is recovered by some parse with the
// exact trimmed gold span
TEST(LearnGrammar, TrainingSpansRecoverableAtRhoZero) {
    auto corpus = fig3_corpus();
    auto result = learn_grammar(corpus, LearnerConfig{});
    for (const auto& doc : corpus) {
        Chart chart = build_chart(doc, result.grammar);
        auto parses = enumerate_parses(chart, "IMP");
        for (const auto& gs : doc.gold) {
            CharSpan want = trim_span(doc.raw_text, gs.chars);
            bool found = false;
            for (const auto& p : parses)
                if (trim_span(doc.raw_text, p->chars) == want) found = true;
            EXPECT_TRUE(found) << doc.doc_id << " gold [" << want.begin << "," << want.end << ")";
        }
    }
}

// learned combination rules keep the interior word pinned to its right
// neighbour: "made 56" matches, "made ... 56" with words between does not
TEST(LearnGrammar, InteriorWordStaysAdjacentToRightSymbol) {
    auto result = learn_grammar(fig3_corpus(), LearnerConfig{});
    const Rule* made_rule = nullptr;
    for (const auto& r : result.grammar.rules) {
        auto lits = literals_of(r);
        if (lits == std::vector<std::string>{"made", "dawn"}) made_rule = &r;
    }
    ASSERT_NE(made_rule, nullptr);
    // symbols: {name} N "made" N {runs} N "dawn"
    ASSERT_EQ(made_rule->rhs.size(), 7u);
    const auto& between = std::get<NoiseSpec>(made_rule->rhs[3]);
    EXPECT_EQ(between, (NoiseSpec{0, 0}));
}
