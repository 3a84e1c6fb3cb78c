#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agx/common.hpp"
#include "agx/grammar.hpp"
#include "agx/text.hpp"

namespace agx {

// ---------------------------------------------------------------------------
// Grammar induction from gold-annotated documents.
//
// Training instances are clustered by their exact probe-category sequence.
// Each cluster has K+1 slots (virtual START and END bound the sequence);
// per slot we count trigram interiors — the single word immediately before
// the slot's right symbol, or NULL when the gap is empty. Interiors whose
// relative frequency falls below RHO are discarded. Rules are then one
// generic probes-and-noise rule plus one combination rule per element of
// the cross product of surviving interiors; probabilities share the
// non-generic mass proportionally to the product of per-slot relative
// frequencies, so every cluster carries total mass 1.
// ---------------------------------------------------------------------------

inline const std::string kStartSymbol = "START";
inline const std::string kEndSymbol = "END";

struct SlotGap {
    std::string text;        // whitespace-trimmed gap text
    std::size_t chars = 0;   // gap_chars measure

    bool operator==(const SlotGap&) const = default;
};

struct TrainingInstance {
    std::string doc_id;
    CharSpan gold_chars;
    std::vector<std::string> probe_sequence;
    std::vector<SlotGap> slot_gaps;  // size == probe_sequence.size() + 1

    bool operator==(const TrainingInstance&) const = default;
};

struct Cluster {
    std::vector<std::string> key;  // shared probe-category sequence
    std::vector<TrainingInstance> instances;

    std::size_t slot_count() const { return key.size() + 1; }
};

struct TrigramStat {
    std::size_t slot = 0;
    std::string left_symbol;                // probe category or START
    std::optional<std::string> interior;    // nullopt = NULL (empty gap)
    std::string right_symbol;               // probe category or END
    std::size_t count = 0;

    bool operator==(const TrigramStat&) const = default;
};

struct LearnerConfig {
    double rho = 0.0;                    // relative-frequency threshold in [0,1]
    double generic_mass = 0.5;           // probability reserved for the generic rule
    std::size_t noise_slack_chars = 0;   // added to every learned noise maximum
    NoiseSpec default_noise{0, 40};      // default bounds of the emitted grammar
};

// One gold span -> one instance. Slot gap texts are the raw text between
// consecutive probes (and between the span boundary and the first/last
// probe), whitespace-trimmed. Gold spans without probes are skipped with
// a warning.
inline std::vector<TrainingInstance> collect_instances(
    const std::vector<AnnotatedDocument>& corpus, std::vector<Diagnostic>* warnings = nullptr) {
    std::vector<TrainingInstance> out;
    for (const auto& doc : corpus) {
        for (const auto& gs : doc.gold) {
            std::vector<const ProbeSpan*> inside;
            for (const auto& p : doc.probes)
                if (gs.chars.contains(p.chars)) inside.push_back(&p);
            if (inside.empty()) {
                if (warnings)
                    warnings->push_back({Severity::warning,
                                         "document '" + doc.doc_id + "': gold span [" +
                                             std::to_string(gs.chars.begin) + "," +
                                             std::to_string(gs.chars.end) +
                                             ") contains no probes; skipped"});
                continue;
            }
            TrainingInstance inst;
            inst.doc_id = doc.doc_id;
            inst.gold_chars = trim_span(doc.raw_text, gs.chars);
            for (const auto* p : inside) inst.probe_sequence.push_back(p->category);

            auto gap_of = [&](std::size_t a, std::size_t b) {
                CharSpan t = trim_span(doc.raw_text, CharSpan{a, b});
                return SlotGap{doc.raw_text.substr(t.begin, t.length()), gap_chars(doc, a, b)};
            };
            inst.slot_gaps.push_back(gap_of(inst.gold_chars.begin, inside.front()->chars.begin));
            for (std::size_t i = 0; i + 1 < inside.size(); ++i)
                inst.slot_gaps.push_back(gap_of(inside[i]->chars.end, inside[i + 1]->chars.begin));
            inst.slot_gaps.push_back(gap_of(inside.back()->chars.end, inst.gold_chars.end));
            out.push_back(std::move(inst));
        }
    }
    return out;
}

// Partition by exact probe-sequence equality; clusters ordered by
// descending size, ties by lexicographic key.
inline std::vector<Cluster> cluster_by_tag_sequence(const std::vector<TrainingInstance>& instances) {
    std::map<std::vector<std::string>, Cluster> by_key;
    for (const auto& inst : instances) {
        Cluster& c = by_key[inst.probe_sequence];
        c.key = inst.probe_sequence;
        c.instances.push_back(inst);
    }
    std::vector<Cluster> out;
    out.reserve(by_key.size());
    for (auto& [key, c] : by_key) out.push_back(std::move(c));
    std::stable_sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
        if (a.instances.size() != b.instances.size())
            return a.instances.size() > b.instances.size();
        return a.key < b.key;
    });
    return out;
}

namespace detail {

// The trigram interior of a gap: its last whitespace token, or NULL for
// an empty gap.
inline std::optional<std::string> interior_word(const SlotGap& gap) {
    auto toks = tokenize(gap.text);
    if (toks.empty()) return std::nullopt;
    return toks.back().surface;
}

inline std::string slot_left(const Cluster& c, std::size_t slot) {
    return slot == 0 ? kStartSymbol : c.key[slot - 1];
}

inline std::string slot_right(const Cluster& c, std::size_t slot) {
    return slot == c.key.size() ? kEndSymbol : c.key[slot];
}

}  // namespace detail

// TRI-data for a cluster: per slot, the count of each interior. Ordered
// by slot, NULL first, then words lexicographically.
inline std::vector<TrigramStat> compute_trigram_stats(const Cluster& c) {
    std::vector<TrigramStat> out;
    for (std::size_t slot = 0; slot < c.slot_count(); ++slot) {
        std::map<std::optional<std::string>, std::size_t> counts;
        for (const auto& inst : c.instances) ++counts[detail::interior_word(inst.slot_gaps[slot])];
        for (const auto& [interior, count] : counts)
            out.push_back(TrigramStat{slot, detail::slot_left(c, slot), interior,
                                      detail::slot_right(c, slot), count});
    }
    return out;
}

// Drop, within each slot, every interior whose relative frequency
// (count / slot total) is below rho. Survivors keep their raw counts.
inline std::vector<TrigramStat> filter_by_rho(const std::vector<TrigramStat>& stats, double rho) {
    if (rho < 0.0 || rho > 1.0)
        throw validation_error("rho " + format_double(rho) + " outside [0,1]");
    std::map<std::size_t, std::size_t> slot_totals;
    for (const auto& s : stats) slot_totals[s.slot] += s.count;
    std::vector<TrigramStat> out;
    for (const auto& s : stats) {
        double rel = static_cast<double>(s.count) / static_cast<double>(slot_totals[s.slot]);
        if (rel >= rho) out.push_back(s);
    }
    return out;
}

// Per slot: min 0, max = largest observed gap + slack.
inline std::vector<NoiseSpec> learn_noise_bounds(const Cluster& c, const LearnerConfig& cfg) {
    std::vector<NoiseSpec> out(c.slot_count(), NoiseSpec{0, 0});
    for (std::size_t slot = 0; slot < c.slot_count(); ++slot) {
        std::size_t max_gap = 0;
        for (const auto& inst : c.instances) max_gap = std::max(max_gap, inst.slot_gaps[slot].chars);
        out[slot] = NoiseSpec{0, max_gap + cfg.noise_slack_chars};
    }
    return out;
}

inline std::vector<Rule> generate_rules(const Cluster& c, const LearnerConfig& cfg,
                                        std::size_t cluster_index = 0) {
    if (c.instances.empty())
        throw validation_error("generate_rules: empty cluster");
    const auto bounds = learn_noise_bounds(c, cfg);
    const auto stats = filter_by_rho(compute_trigram_stats(c), cfg.rho);

    // surviving interiors per slot with renormalized shares
    struct Choice {
        std::optional<std::string> interior;
        std::size_t count = 0;
    };
    std::vector<std::vector<Choice>> slots(c.slot_count());
    std::vector<std::size_t> slot_totals(c.slot_count(), 0);
    for (const auto& s : stats) {
        slots[s.slot].push_back(Choice{s.interior, s.count});
        slot_totals[s.slot] += s.count;
    }
    // a slot with every interior filtered out becomes noise-only
    for (std::size_t slot = 0; slot < slots.size(); ++slot) {
        if (slots[slot].empty()) {
            slots[slot].push_back(Choice{std::nullopt, 1});
            slot_totals[slot] = 1;
        }
    }

    const std::string id_prefix = "L" + std::to_string(cluster_index) + "#";
    double generic_prob = cfg.generic_mass;
    std::vector<Rule> combos;

    // cross product over slots
    std::vector<std::size_t> pick(slots.size(), 0);
    for (;;) {
        double share = 1.0;
        bool all_null = true;
        for (std::size_t slot = 0; slot < slots.size(); ++slot) {
            const Choice& ch = slots[slot][pick[slot]];
            share *= static_cast<double>(ch.count) / static_cast<double>(slot_totals[slot]);
            if (ch.interior) all_null = false;
        }
        double prob = (1.0 - cfg.generic_mass) * share;
        if (all_null) {
            // same shape as the generic rule; fold the mass in
            generic_prob += prob;
        } else {
            Rule r;
            r.lhs = "IMP";
            r.probability = prob;
            for (std::size_t slot = 0; slot < slots.size(); ++slot) {
                const Choice& ch = slots[slot][pick[slot]];
                const bool boundary_left = slot == 0;
                const bool boundary_right = slot == c.key.size();
                if (ch.interior) {
                    // the interior word sits immediately before the slot's
                    // right symbol: full slot bounds to its left, zero gap
                    // (plus slack) to its right
                    if (!boundary_left) r.rhs.push_back(bounds[slot]);
                    r.rhs.push_back(TerminalSpec{LiteralTerm{*ch.interior}});
                    if (!boundary_right) r.rhs.push_back(NoiseSpec{0, cfg.noise_slack_chars});
                } else if (!boundary_left && !boundary_right) {
                    r.rhs.push_back(bounds[slot]);
                }
                if (!boundary_right) r.rhs.push_back(TerminalSpec{ProbeTerm{c.key[slot]}});
            }
            combos.push_back(std::move(r));
        }
        // odometer
        std::size_t i = pick.size();
        bool advanced = false;
        while (i > 0) {
            --i;
            if (++pick[i] < slots[i].size()) {
                advanced = true;
                break;
            }
            pick[i] = 0;
        }
        if (!advanced) break;
    }

    std::vector<Rule> out;
    Rule generic;
    generic.id = id_prefix + "0";
    generic.lhs = "IMP";
    generic.probability = generic_prob;
    for (std::size_t i = 0; i < c.key.size(); ++i) {
        if (i > 0) generic.rhs.push_back(bounds[i]);
        generic.rhs.push_back(TerminalSpec{ProbeTerm{c.key[i]}});
    }
    out.push_back(std::move(generic));
    std::size_t n = 1;
    for (auto& r : combos) {
        r.id = id_prefix + std::to_string(n++);
        out.push_back(std::move(r));
    }
    return out;
}

// Per-cluster statistics for the learner's JSON sidecar.
struct ClusterStats {
    std::vector<std::string> key;
    std::size_t instances = 0;
    struct Slot {
        std::map<std::string, std::size_t> interiors;  // "" keys the NULL interior
        std::size_t max_gap = 0;
    };
    std::vector<Slot> slots;
};

struct LearnResult {
    Grammar grammar;
    std::vector<ClusterStats> stats;
    std::vector<Diagnostic> warnings;
};

// collect -> cluster -> trigrams -> filter -> generate, with learned
// noise bounds. Rules from all clusters are concatenated; each cluster's
// probabilities sum to 1.
inline LearnResult learn_grammar(const std::vector<AnnotatedDocument>& corpus,
                                 const LearnerConfig& cfg) {
    if (cfg.rho < 0.0 || cfg.rho > 1.0)
        throw validation_error("rho " + format_double(cfg.rho) + " outside [0,1]");
    if (cfg.generic_mass < 0.0 || cfg.generic_mass > 1.0)
        throw validation_error("generic_mass " + format_double(cfg.generic_mass) +
                               " outside [0,1]");
    LearnResult result;
    auto instances = collect_instances(corpus, &result.warnings);
    if (instances.empty())
        throw validation_error("empty training signal: no gold spans with probes in corpus");

    auto clusters = cluster_by_tag_sequence(instances);
    result.grammar.start_symbols = {"IMP"};
    result.grammar.default_noise = cfg.default_noise;
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        const Cluster& c = clusters[ci];
        for (auto& r : generate_rules(c, cfg, ci)) result.grammar.rules.push_back(std::move(r));

        ClusterStats cs;
        cs.key = c.key;
        cs.instances = c.instances.size();
        auto bounds = learn_noise_bounds(c, LearnerConfig{});  // raw maxima, no slack
        auto stats = compute_trigram_stats(c);
        cs.slots.resize(c.slot_count());
        for (std::size_t slot = 0; slot < c.slot_count(); ++slot)
            cs.slots[slot].max_gap = bounds[slot].max_chars;
        for (const auto& s : stats)
            cs.slots[s.slot].interiors[s.interior ? *s.interior : ""] = s.count;
        result.stats.push_back(std::move(cs));
    }
    return result;
}

}  // namespace agx
