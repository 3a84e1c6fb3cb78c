#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "agx/common.hpp"
#include "agx/extract.hpp"
#include "agx/learner.hpp"
#include "agx/text.hpp"

namespace agx {

enum class MatchMode { exact, overlap };

inline MatchMode parse_match_mode(const std::string& s) {
    if (s == "exact") return MatchMode::exact;
    if (s == "overlap") return MatchMode::overlap;
    throw validation_error("unknown match mode '" + s + "' (expected exact|overlap)");
}

struct EvalReport {
    double rho = std::numeric_limits<double>::quiet_NaN();
    std::size_t correct = 0;
    std::size_t extracted = 0;
    std::size_t gold_total = 0;
    double precision = 1.0;  // correct / extracted, 1.0 when nothing extracted
    double recall = 1.0;     // correct / gold_total, 1.0 when no gold
};

// Deterministic seeded shuffle then split at round(n * train_fraction);
// both parts stay non-empty.
inline std::pair<std::vector<AnnotatedDocument>, std::vector<AnnotatedDocument>> split_corpus(
    const std::vector<AnnotatedDocument>& docs, double train_fraction, std::uint32_t seed) {
    if (docs.size() < 2)
        throw validation_error("split_corpus: need at least 2 documents, got " +
                               std::to_string(docs.size()));
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw validation_error("split_corpus: train fraction must lie in (0,1)");
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // hand-rolled Fisher-Yates: identical across standard libraries
    std::mt19937 rng(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::size_t j = rng() % (i + 1);
        std::swap(order[i], order[j]);
    }
    auto n_train = static_cast<std::size_t>(
        std::llround(static_cast<double>(docs.size()) * train_fraction));
    n_train = std::clamp<std::size_t>(n_train, 1, docs.size() - 1);
    std::pair<std::vector<AnnotatedDocument>, std::vector<AnnotatedDocument>> out;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < n_train ? out.first : out.second).push_back(docs[order[i]]);
    return out;
}

namespace detail {

inline double jaccard(CharSpan a, CharSpan b) {
    std::size_t inter_begin = std::max(a.begin, b.begin);
    std::size_t inter_end = std::min(a.end, b.end);
    std::size_t inter = inter_end > inter_begin ? inter_end - inter_begin : 0;
    std::size_t uni = a.length() + b.length() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

// Matches predictions against gold spans of one document. Exact mode:
// identical whitespace-trimmed ranges. Overlap mode: character Jaccard
// >= 0.5. Matching is injective — a gold span is credited at most once.
inline std::size_t count_correct(const std::vector<CharSpan>& predicted,
                                 const std::vector<CharSpan>& gold, const std::string& raw_text,
                                 MatchMode mode) {
    std::vector<bool> used(gold.size(), false);
    std::size_t correct = 0;
    for (const auto& p : predicted) {
        CharSpan pt = trim_span(raw_text, p);
        std::size_t best = gold.size();
        double best_j = 0.0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (used[i]) continue;
            CharSpan gt = trim_span(raw_text, gold[i]);
            if (mode == MatchMode::exact) {
                if (pt == gt) {
                    best = i;
                    break;
                }
            } else {
                double j = detail::jaccard(pt, gt);
                if (j >= 0.5 && j > best_j) {
                    best = i;
                    best_j = j;
                }
            }
        }
        if (best < gold.size()) {
            used[best] = true;
            ++correct;
        }
    }
    return correct;
}

// Corpus-level precision/recall of extractions against the documents'
// gold spans.
inline EvalReport score_extractions(const std::vector<Extraction>& predicted,
                                    const std::vector<AnnotatedDocument>& docs, MatchMode mode) {
    EvalReport r;
    for (const auto& doc : docs) {
        std::vector<CharSpan> pred;
        for (const auto& e : predicted)
            if (e.doc_id == doc.doc_id) pred.push_back(e.chars);
        std::vector<CharSpan> gold;
        for (const auto& gs : doc.gold) gold.push_back(gs.chars);
        r.extracted += pred.size();
        r.gold_total += gold.size();
        r.correct += count_correct(pred, gold, doc.raw_text, mode);
    }
    r.precision = r.extracted == 0 ? 1.0
                                   : static_cast<double>(r.correct) /
                                         static_cast<double>(r.extracted);
    r.recall = r.gold_total == 0 ? 1.0
                                 : static_cast<double>(r.correct) /
                                       static_cast<double>(r.gold_total);
    return r;
}

struct SweepConfig {
    LearnerConfig learner;
    double train_fraction = 0.8;
    std::uint32_t seed = 0;
    MatchMode mode = MatchMode::exact;
    bool self_test = false;  // train and test on the full corpus
    ChartOptions chart;
};

// For each rho: split, learn on the training part, extract over the test
// part, score. Reports come back ordered by rho descending.
inline std::vector<EvalReport> rho_sweep(const std::vector<AnnotatedDocument>& corpus,
                                         std::vector<double> rhos, const SweepConfig& cfg) {
    std::sort(rhos.begin(), rhos.end(), std::greater<>());
    std::vector<EvalReport> out;
    if (rhos.empty()) return out;

    std::vector<AnnotatedDocument> train, test;
    if (cfg.self_test) {
        train = corpus;
        test = corpus;
    } else {
        auto parts = split_corpus(corpus, cfg.train_fraction, cfg.seed);
        train = std::move(parts.first);
        test = std::move(parts.second);
    }
    for (double rho : rhos) {
        LearnerConfig lc = cfg.learner;
        lc.rho = rho;
        auto learned = learn_grammar(train, lc);
        std::vector<Extraction> predicted;
        for (const auto& doc : test) {
            auto ex = extract(doc, learned.grammar, cfg.chart);
            predicted.insert(predicted.end(), ex.begin(), ex.end());
        }
        EvalReport r = score_extractions(predicted, test, cfg.mode);
        r.rho = rho;
        out.push_back(r);
    }
    return out;
}

// Plain-text table with the RHO / Precision / Recall columns.
inline std::string render_report_table(const std::vector<EvalReport>& reports) {
    std::ostringstream os;
    os << "RHO\tPrecision\tRecall\n";
    for (const auto& r : reports) {
        if (std::isnan(r.rho)) os << "-";
        else os << std::fixed << std::setprecision(2) << r.rho;
        os << "\t" << std::fixed << std::setprecision(4) << r.precision << "\t" << r.recall
           << "\n";
    }
    return os.str();
}

}  // namespace agx
