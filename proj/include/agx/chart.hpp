#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agx/common.hpp"
#include "agx/grammar.hpp"
#include "agx/text.hpp"

namespace agx {

// ---------------------------------------------------------------------------
// Bottom-up chart parsing with bounded-noise gaps.
//
// Edges live over token positions; gaps between adjacent constituents are
// measured in characters (gap_chars) against the rule's Noise bounds.
// Passive edges with identical (symbol, span) are packed: each holds every
// derivation, so shared sub-parses are represented once.
// ---------------------------------------------------------------------------

struct TerminalMatch {
    TerminalSpec terminal;
    CharSpan chars;
    TokenSpan tokens;
    double confidence = 1.0;  // probe: span confidence; literal/root: 1.0

    bool operator==(const TerminalMatch&) const = default;
};

// A noise gap accepted between two matched constituents.
struct NoiseFill {
    NoiseSpec spec;
    CharSpan chars;
    std::size_t gap_len = 0;  // gap_chars over chars

    bool operator==(const NoiseFill&) const = default;
};

struct ChartOptions {
    std::size_t edge_cap = 1'000'000;   // passive + active edges
    std::size_t parse_cap = 1'000'000;  // parse trees materialized per document
};

// All matches of a terminal starting at a given token. Probe spans are
// atomic: literal and root terminals never match a token inside one, and
// a probe terminal only matches at the span's first token.
inline std::vector<TerminalMatch> match_terminal(const TerminalSpec& term,
                                                 const AnnotatedDocument& doc,
                                                 std::size_t from_token,
                                                 const RootLexicon& lexicon = {}) {
    std::vector<TerminalMatch> out;
    if (from_token >= doc.tokens.size()) return out;

    if (const auto* probe = std::get_if<ProbeTerm>(&term)) {
        std::size_t p = doc.probe_at_token[from_token];
        if (p != AnnotatedDocument::npos && doc.probes[p].category == probe->category) {
            const ProbeSpan& ps = doc.probes[p];
            out.push_back(TerminalMatch{term, ps.chars, ps.tokens, ps.confidence});
        }
        return out;
    }

    if (doc.token_probe[from_token] != AnnotatedDocument::npos) return out;
    const Token& tok = doc.tokens[from_token];
    bool hit = false;
    if (const auto* lit = std::get_if<LiteralTerm>(&term)) {
        hit = detail::ascii_lower(tok.surface) == detail::ascii_lower(lit->word);
    } else {
        const auto& root = std::get<RootTerm>(term);
        hit = matches_root(tok.surface, root.roots, lexicon);
    }
    if (hit)
        out.push_back(TerminalMatch{term, CharSpan{tok.char_start, tok.char_end},
                                    TokenSpan{from_token, from_token + 1}, 1.0});
    return out;
}

// rule_prob times the arithmetic mean of the child scores. Noise children
// carry no score and must already be excluded by the caller.
inline double score_node(double rule_prob, const std::vector<double>& child_scores) {
    if (child_scores.empty())
        throw std::invalid_argument(
            "score_node: no scorable children (rule without non-noise symbols)");
    double sum = std::accumulate(child_scores.begin(), child_scores.end(), 0.0);
    return rule_prob * (sum / static_cast<double>(child_scores.size()));
}

class Chart {
public:
    struct Derivation {
        std::size_t rule_index = 0;
        std::vector<std::size_t> children;  // passive edge ids, in RHS order
        std::vector<NoiseFill> gaps;        // gaps.size() == children.size() - 1
    };

    struct PassiveEdge {
        std::string key;  // symbol_key of the completed symbol
        bool terminal = false;
        TokenSpan tokens;
        CharSpan chars;
        TerminalMatch match;  // when terminal
        std::string lhs;      // when non-terminal
        std::vector<Derivation> derivations;
    };

    const AnnotatedDocument* doc = nullptr;
    const Grammar* grammar = nullptr;
    std::vector<PassiveEdge> passive;
    std::size_t active_edges_built = 0;

    std::size_t edge_count() const { return passive.size() + active_edges_built; }

    bool has_passive(const std::string& symbol, CharSpan chars) const {
        for (const auto& e : passive)
            if (!e.terminal && e.lhs == symbol && e.chars == chars) return true;
        return false;
    }

    std::vector<std::size_t> passive_for(const std::string& symbol) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < passive.size(); ++i)
            if (!passive[i].terminal && passive[i].lhs == symbol) out.push_back(i);
        return out;
    }
};

namespace detail {

// Non-noise RHS positions and the noise specs between them.
struct RuleShape {
    std::vector<const Symbol*> symbols;  // non-noise, in order
    std::vector<std::string> keys;       // symbol_key per symbol
    std::vector<const NoiseSpec*> gaps;  // between symbols[i] and symbols[i+1]; null = strict adjacency
};

inline RuleShape shape_of(const Rule& r) {
    RuleShape sh;
    const NoiseSpec* pending = nullptr;
    for (const auto& s : r.rhs) {
        if (const auto* ns = std::get_if<NoiseSpec>(&s)) {
            pending = ns;
            continue;
        }
        if (!sh.symbols.empty()) sh.gaps.push_back(pending);
        sh.symbols.push_back(&s);
        sh.keys.push_back(symbol_key(s));
        pending = nullptr;
    }
    return sh;
}

}  // namespace detail

// Agenda-driven bottom-up chart construction. Afterwards every passive
// edge derivable for any grammar symbol over the document is present.
//
// Bookkeeping rule: an (active, passive) pair combines exactly once —
// through the passive's agenda turn when the active is already
// registered, otherwise through the active's registration scan over
// already-processed passives.
inline Chart build_chart(const AnnotatedDocument& doc, const Grammar& g,
                         const ChartOptions& opts = {}) {
    Chart chart;
    chart.doc = &doc;
    chart.grammar = &g;

    std::vector<detail::RuleShape> shapes;
    shapes.reserve(g.rules.size());
    for (const auto& r : g.rules) shapes.push_back(detail::shape_of(r));

    std::map<std::string, std::vector<std::size_t>> rules_by_first;
    for (std::size_t i = 0; i < shapes.size(); ++i)
        if (!shapes[i].keys.empty()) rules_by_first[shapes[i].keys.front()].push_back(i);

    std::map<std::pair<std::string, TokenSpan>, std::size_t> passive_index;
    std::map<std::string, std::vector<std::size_t>> processed_by_key;

    struct ActiveEdge {
        std::size_t rule_index = 0;
        std::size_t next = 0;  // index into shape.symbols
        std::vector<std::size_t> children;
        std::vector<NoiseFill> gaps;
        TokenSpan tokens;
        CharSpan chars;
    };
    std::vector<ActiveEdge> actives;
    std::map<std::string, std::vector<std::size_t>> actives_by_wanted;

    std::deque<std::size_t> agenda;           // passive ids awaiting their turn
    std::vector<std::size_t> unregistered;    // active ids awaiting registration

    auto check_cap = [&] {
        if (chart.edge_count() > opts.edge_cap)
            throw resource_error("chart edge cap exceeded (" + std::to_string(opts.edge_cap) +
                                 ") on document '" + doc.doc_id + "'");
    };

    auto add_passive = [&](Chart::PassiveEdge&& e) {
        auto key = std::make_pair(e.key, e.tokens);
        auto it = passive_index.find(key);
        if (it != passive_index.end()) {
            // local-ambiguity packing: same symbol over the same span
            auto& existing = chart.passive[it->second];
            for (auto& d : e.derivations) existing.derivations.push_back(std::move(d));
            return;
        }
        std::size_t id = chart.passive.size();
        chart.passive.push_back(std::move(e));
        passive_index.emplace(key, id);
        agenda.push_back(id);
        check_cap();
    };

    auto gap_between = [&](const CharSpan& left, const CharSpan& right,
                           const NoiseSpec* spec) -> std::optional<NoiseFill> {
        if (right.begin < left.end) return std::nullopt;
        std::size_t len = gap_chars(doc, left.end, right.begin);
        NoiseSpec bounds = spec ? *spec : NoiseSpec{0, 0};
        if (len < bounds.min_chars || len > bounds.max_chars) return std::nullopt;
        return NoiseFill{bounds, CharSpan{left.end, right.begin}, len};
    };

    // takes the active by value: both edge vectors may reallocate below
    auto advance = [&](ActiveEdge n, std::size_t passive_id) {
        const auto& shape = shapes[n.rule_index];
        const TokenSpan p_tokens = chart.passive[passive_id].tokens;
        const CharSpan p_chars = chart.passive[passive_id].chars;
        if (n.next > 0) {
            auto fill = gap_between(n.chars, p_chars, shape.gaps[n.next - 1]);
            if (!fill) return;
            n.gaps.push_back(*fill);
            n.tokens.end = p_tokens.end;
            n.chars.end = p_chars.end;
        } else {
            n.tokens = p_tokens;
            n.chars = p_chars;
        }
        n.children.push_back(passive_id);
        n.next += 1;
        if (n.next == shape.symbols.size()) {
            const Rule& rule = g.rules[n.rule_index];
            Chart::PassiveEdge e;
            e.key = rule.lhs;
            e.lhs = rule.lhs;
            e.tokens = n.tokens;
            e.chars = n.chars;
            e.derivations.push_back(
                Chart::Derivation{n.rule_index, std::move(n.children), std::move(n.gaps)});
            add_passive(std::move(e));
        } else {
            actives.push_back(std::move(n));
            ++chart.active_edges_built;
            check_cap();
            unregistered.push_back(actives.size() - 1);
        }
    };

    // seed terminal matches at every token position
    std::map<std::string, const TerminalSpec*> terminals;
    for (const auto& r : g.rules)
        for (const auto& s : r.rhs)
            if (const auto* t = std::get_if<TerminalSpec>(&s))
                terminals.emplace(terminal_key(*t), t);
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
        for (const auto& [key, spec] : terminals) {
            for (auto& m : match_terminal(*spec, doc, t, g.root_lexicon)) {
                Chart::PassiveEdge e;
                e.key = key;
                e.terminal = true;
                e.tokens = m.tokens;
                e.chars = m.chars;
                e.match = std::move(m);
                add_passive(std::move(e));
            }
        }
    }

    while (!agenda.empty()) {
        std::size_t pid = agenda.front();
        agenda.pop_front();
        const std::string key = chart.passive[pid].key;
        processed_by_key[key].push_back(pid);

        // initiate rules whose first symbol this passive satisfies
        if (auto rit = rules_by_first.find(key); rit != rules_by_first.end()) {
            for (std::size_t ri : rit->second) {
                ActiveEdge seed;
                seed.rule_index = ri;
                advance(seed, pid);
            }
        }
        // extend registered actives waiting for this symbol
        if (auto ait = actives_by_wanted.find(key); ait != actives_by_wanted.end()) {
            for (std::size_t i = 0; i < ait->second.size(); ++i)
                advance(actives[ait->second[i]], pid);
        }
        // register fresh actives: scan passives processed so far, then
        // expose them to future agenda turns
        while (!unregistered.empty()) {
            std::size_t aid = unregistered.back();
            unregistered.pop_back();
            const std::string wanted = shapes[actives[aid].rule_index].keys[actives[aid].next];
            if (auto pit = processed_by_key.find(wanted); pit != processed_by_key.end()) {
                for (std::size_t i = 0; i < pit->second.size(); ++i)
                    advance(actives[aid], pit->second[i]);
            }
            actives_by_wanted[wanted].push_back(aid);
        }
    }
    return chart;
}

}  // namespace agx
