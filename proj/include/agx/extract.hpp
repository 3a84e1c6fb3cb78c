#pragma once

#include <algorithm>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "agx/chart.hpp"

namespace agx {

struct ParseNode;
using ParseNodePtr = std::shared_ptr<const ParseNode>;
using ParseChild = std::variant<ParseNodePtr, TerminalMatch, NoiseFill>;

// A scored derivation: rule probability times the mean score of the
// non-noise children (terminal children score their confidence).
struct ParseNode {
    std::string rule_id;
    std::string symbol;  // lhs
    CharSpan chars;
    TokenSpan tokens;
    std::vector<ParseChild> children;
    double score = 0.0;
};

namespace detail {

struct ParseEnumerator {
    const Chart& chart;
    std::size_t parse_cap;
    std::size_t produced = 0;
    std::vector<char> on_stack;
    std::vector<char> done;
    std::vector<std::vector<ParseNodePtr>> memo;

    explicit ParseEnumerator(const Chart& c, std::size_t cap)
        : chart(c), parse_cap(cap), on_stack(c.passive.size(), 0),
          done(c.passive.size(), 0), memo(c.passive.size()) {}

    // A cyclic derivation (an edge re-entered along the current ancestor
    // chain) admits no finite tree and is pruned. Results computed while
    // a foreign ancestor forced such a prune are context-dependent and
    // must not be memoized; the taint flag marks them.
    std::vector<ParseNodePtr> expand(std::size_t edge_id, bool& parent_taint) {
        if (done[edge_id]) return memo[edge_id];
        if (on_stack[edge_id]) {
            parent_taint = true;
            return {};
        }
        on_stack[edge_id] = 1;
        bool taint = false;

        const auto& edge = chart.passive[edge_id];
        std::vector<ParseNodePtr> result;
        for (const auto& deriv : edge.derivations) {
            const Rule& rule = chart.grammar->rules[deriv.rule_index];
            // alternatives per child: terminals are single leaves
            std::vector<std::vector<ParseNodePtr>> alts(deriv.children.size());
            bool viable = true;
            for (std::size_t i = 0; i < deriv.children.size() && viable; ++i) {
                if (!chart.passive[deriv.children[i]].terminal) {
                    alts[i] = expand(deriv.children[i], taint);
                    if (alts[i].empty()) viable = false;
                }
            }
            if (!viable) continue;
            std::vector<std::size_t> pick(deriv.children.size(), 0);
            for (;;) {
                auto node = std::make_shared<ParseNode>();
                node->rule_id = rule.id;
                node->symbol = rule.lhs;
                node->chars = edge.chars;
                node->tokens = edge.tokens;
                std::vector<double> child_scores;
                for (std::size_t i = 0; i < deriv.children.size(); ++i) {
                    if (i > 0) node->children.push_back(deriv.gaps[i - 1]);
                    const auto& child_edge = chart.passive[deriv.children[i]];
                    if (child_edge.terminal) {
                        node->children.push_back(child_edge.match);
                        child_scores.push_back(child_edge.match.confidence);
                    } else {
                        const ParseNodePtr& sub = alts[i][pick[i]];
                        node->children.push_back(sub);
                        child_scores.push_back(sub->score);
                    }
                }
                node->score = score_node(rule.probability, child_scores);
                result.push_back(std::move(node));
                if (++produced > parse_cap)
                    throw resource_error("parse cap exceeded (" + std::to_string(parse_cap) + ")");
                // odometer over non-terminal alternatives
                std::size_t i = pick.size();
                while (i > 0) {
                    --i;
                    if (alts[i].empty()) continue;  // terminal slot
                    if (++pick[i] < alts[i].size()) break;
                    pick[i] = 0;
                }
                bool wrapped = true;
                for (std::size_t k = 0; k < pick.size(); ++k)
                    if (pick[k] != 0) { wrapped = false; break; }
                if (wrapped) break;
            }
        }
        on_stack[edge_id] = 0;
        if (taint) {
            parent_taint = true;
            return result;
        }
        done[edge_id] = 1;
        memo[edge_id] = result;
        return result;
    }
};

inline bool parse_order(const ParseNodePtr& a, const ParseNodePtr& b) {
    if (a->score != b->score) return a->score > b->score;
    if (a->chars.begin != b->chars.begin) return a->chars.begin < b->chars.begin;
    if (a->chars.end != b->chars.end) return a->chars.end > b->chars.end;  // longer first
    return a->rule_id < b->rule_id;
}

}  // namespace detail

// All complete parses rooted at `symbol`, scored bottom-up, sorted by
// descending score (ties: earlier span, longer span, lower rule id).
inline std::vector<ParseNodePtr> enumerate_parses(const Chart& chart, const std::string& symbol,
                                                  std::size_t parse_cap = 1'000'000) {
    detail::ParseEnumerator en(chart, parse_cap);
    std::vector<ParseNodePtr> out;
    for (std::size_t id : chart.passive_for(symbol)) {
        bool taint = false;
        auto nodes = en.expand(id, taint);
        out.insert(out.end(), nodes.begin(), nodes.end());
    }
    std::stable_sort(out.begin(), out.end(), detail::parse_order);
    return out;
}

// A selected informational string.
struct Extraction {
    std::string doc_id;
    CharSpan chars;
    std::string text;
    std::string rule_id;
    double score = 0.0;
    ParseNodePtr parse;
};

// Parse, then greedily select non-overlapping top-scoring informational
// strings across all start symbols. Returned in document order.
inline std::vector<Extraction> extract(const AnnotatedDocument& doc, const Grammar& g,
                                       const ChartOptions& opts = {}) {
    Chart chart = build_chart(doc, g, opts);
    std::vector<ParseNodePtr> pool;
    for (const auto& start : g.start_symbols) {
        auto parses = enumerate_parses(chart, start, opts.parse_cap);
        pool.insert(pool.end(), parses.begin(), parses.end());
    }
    std::stable_sort(pool.begin(), pool.end(), detail::parse_order);

    std::vector<Extraction> selected;
    for (const auto& node : pool) {
        bool clashes = false;
        for (const auto& e : selected)
            if (e.chars.overlaps(node->chars)) { clashes = true; break; }
        if (clashes) continue;
        Extraction e;
        e.doc_id = doc.doc_id;
        e.chars = node->chars;
        e.text = doc.raw_text.substr(node->chars.begin, node->chars.length());
        e.rule_id = node->rule_id;
        e.score = node->score;
        e.parse = node;
        selected.push_back(std::move(e));
    }
    std::stable_sort(selected.begin(), selected.end(),
                     [](const Extraction& a, const Extraction& b) {
                         return a.chars.begin < b.chars.begin;
                     });
    return selected;
}

// The probe matches of a parse, left to right.
inline void collect_probe_matches(const ParseNodePtr& node, std::vector<TerminalMatch>& out) {
    for (const auto& child : node->children) {
        if (const auto* tm = std::get_if<TerminalMatch>(&child)) {
            if (std::holds_alternative<ProbeTerm>(tm->terminal)) out.push_back(*tm);
        } else if (const auto* sub = std::get_if<ParseNodePtr>(&child)) {
            collect_probe_matches(*sub, out);
        }
    }
}

namespace detail {

inline std::string short_double(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

inline void render_node(const ParseNode& node, const AnnotatedDocument& doc, const Grammar& g,
                        std::string indent, std::ostringstream& os) {
    const Rule* rule = g.find_rule(node.rule_id);
    os << indent << node.symbol << " [" << node.chars.begin << "," << node.chars.end << ") \""
       << doc.raw_text.substr(node.chars.begin, node.chars.length()) << "\"\n";
    std::vector<double> child_scores;
    for (const auto& child : node.children) {
        if (const auto* tm = std::get_if<TerminalMatch>(&child))
            child_scores.push_back(tm->confidence);
        else if (const auto* sub = std::get_if<ParseNodePtr>(&child))
            child_scores.push_back((*sub)->score);
    }
    os << indent << "  score " << short_double(node.score) << " = prob "
       << short_double(rule ? rule->probability : 0.0) << " x mean(";
    for (std::size_t i = 0; i < child_scores.size(); ++i)
        os << (i ? ", " : "") << short_double(child_scores[i]);
    os << ")   rule " << node.rule_id << "\n";
    for (const auto& child : node.children) {
        if (const auto* tm = std::get_if<TerminalMatch>(&child)) {
            os << indent << "  " << terminal_key(tm->terminal) << " [" << tm->chars.begin << ","
               << tm->chars.end << ") \""
               << doc.raw_text.substr(tm->chars.begin, tm->chars.length()) << "\" conf="
               << short_double(tm->confidence) << "\n";
        } else if (const auto* nf = std::get_if<NoiseFill>(&child)) {
            os << indent << "  noise [" << nf->chars.begin << "," << nf->chars.end << ") gap="
               << nf->gap_len << " (bounds " << nf->spec.min_chars << ".." << nf->spec.max_chars
               << ")\n";
        } else {
            render_node(*std::get<ParseNodePtr>(child), doc, g, indent + "  ", os);
        }
    }
}

}  // namespace detail

// Human-readable derivation report: per node the rule, span, gap lengths
// and the score arithmetic.
inline std::string explain(const AnnotatedDocument& doc, const Grammar& g,
                           const Extraction& extraction) {
    if (extraction.doc_id != doc.doc_id)
        throw error("explain: extraction belongs to document '" + extraction.doc_id +
                    "', not '" + doc.doc_id + "'");
    if (!g.find_rule(extraction.rule_id))
        throw error("explain: rule " + extraction.rule_id + " not found in grammar");
    if (!extraction.parse) throw error("explain: extraction has no parse tree");
    std::ostringstream os;
    os << "extraction doc=" << doc.doc_id << " [" << extraction.chars.begin << ","
       << extraction.chars.end << ") score=" << detail::short_double(extraction.score)
       << " rule=" << extraction.rule_id << "\n";
    detail::render_node(*extraction.parse, doc, g, "", os);
    return os.str();
}

}  // namespace agx
