#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "agx/common.hpp"
#include "agx/text.hpp"

namespace agx {

// ---------------------------------------------------------------------------
// Grammar data model
//
// An approximate grammar is a probabilistic CFG whose right-hand sides mix
// three terminal kinds (probe categories, literal words, root words), plain
// non-terminals, and bounded-noise symbols. Noise admits a run of irrelevant
// characters between two adjacent constituents; its bounds are measured with
// gap_chars (whitespace-trimmed character count).
// ---------------------------------------------------------------------------

struct ProbeTerm {
    std::string category;
    auto operator<=>(const ProbeTerm&) const = default;
};

struct LiteralTerm {
    std::string word;  // non-empty, no whitespace; matched case-insensitively
    auto operator<=>(const LiteralTerm&) const = default;
};

struct RootTerm {
    std::string category;
    std::set<std::string> roots;  // non-empty
    auto operator<=>(const RootTerm&) const = default;
};

using TerminalSpec = std::variant<ProbeTerm, LiteralTerm, RootTerm>;

struct NonTerminal {
    std::string name;
    auto operator<=>(const NonTerminal&) const = default;
};

struct NoiseSpec {
    std::size_t min_chars = 0;
    std::size_t max_chars = 0;
    auto operator<=>(const NoiseSpec&) const = default;
};

using Symbol = std::variant<TerminalSpec, NonTerminal, NoiseSpec>;

inline bool is_noise(const Symbol& s) { return std::holds_alternative<NoiseSpec>(s); }
inline bool is_terminal(const Symbol& s) { return std::holds_alternative<TerminalSpec>(s); }
inline bool is_nonterminal(const Symbol& s) { return std::holds_alternative<NonTerminal>(s); }

// Canonical key for chart indexing and diagnostics.
inline std::string terminal_key(const TerminalSpec& t) {
    if (const auto* p = std::get_if<ProbeTerm>(&t)) return "{" + p->category + "}";
    if (const auto* l = std::get_if<LiteralTerm>(&t)) return "\"" + l->word + "\"";
    const auto& r = std::get<RootTerm>(t);
    std::string key = "root(" + r.category + ":";
    bool first = true;
    for (const auto& w : r.roots) {
        if (!first) key += "|";
        key += w;
        first = false;
    }
    return key + ")";
}

inline std::string symbol_key(const Symbol& s) {
    if (const auto* t = std::get_if<TerminalSpec>(&s)) return terminal_key(*t);
    if (const auto* n = std::get_if<NonTerminal>(&s)) return n->name;
    const auto& g = std::get<NoiseSpec>(s);
    return "noise(" + std::to_string(g.min_chars) + "," + std::to_string(g.max_chars) + ")";
}

struct Rule {
    std::string id;  // "U#<n>" for user rules, "L<cluster>#<n>" for learned ones
    std::string lhs;
    std::vector<Symbol> rhs;  // never two adjacent noise symbols
    double probability = 0.0;

    bool operator==(const Rule&) const = default;
};

using RootLexicon = std::map<std::string, std::set<std::string>>;

struct Grammar {
    std::vector<Rule> rules;
    std::set<std::string> start_symbols{"IMP"};
    NoiseSpec default_noise{0, 40};
    RootLexicon root_lexicon;

    bool operator==(const Grammar&) const = default;

    bool has_nonterminal(const std::string& name) const {
        for (const auto& r : rules)
            if (r.lhs == name) return true;
        return false;
    }
    const Rule* find_rule(const std::string& id) const {
        for (const auto& r : rules)
            if (r.id == id) return &r;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Root-word matching
// ---------------------------------------------------------------------------

namespace detail {

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace detail

// True when `surface` reduces to a word in `roots`, either through the
// lexicon (root word -> surface forms) or through the suffix-strip
// fallback (s, es, ed, d, ing — longest first).
inline bool matches_root(std::string_view surface, const std::set<std::string>& roots,
                         const RootLexicon& lexicon) {
    const std::string low = detail::ascii_lower(surface);
    if (roots.count(low)) return true;
    for (const auto& root : roots) {
        auto it = lexicon.find(root);
        if (it == lexicon.end()) continue;
        for (const auto& form : it->second)
            if (detail::ascii_lower(form) == low) return true;
    }
    static constexpr std::string_view suffixes[] = {"ing", "es", "ed", "s", "d"};
    for (auto suf : suffixes) {
        if (low.size() > suf.size() && low.ends_with(suf)) {
            std::string stem = low.substr(0, low.size() - suf.size());
            if (roots.count(stem)) return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// DSL
//
//   # comment
//   @default_noise min=0 max=40
//   @start IMP
//   SN  -> noise ; minlength=0, maxlength=20
//   IMP -> {name} SN "bowled" SN {balls} ; prob=1.0
//   IMP -> {name} {balls} ; prob=0.5, id="U#1"
//   VB  -> root(score: "make"|"hit"|"score") ; prob=1.0
//
// Named noise non-terminals are sugar: they inline into positional Noise
// symbols. Where two non-noise symbols sit adjacent with no explicit noise,
// an implicit Noise with the default bounds is inserted, so after parsing
// every adjacent pair of non-noise symbols is separated by exactly one
// Noise symbol. The optional quoted id attribute keeps rule identifiers
// stable across serialize/parse round trips.
//
// Root lexicon sidecar (one entry per line): `make: makes, made, making`
// ---------------------------------------------------------------------------

struct GrammarParseOptions {
    NoiseSpec fallback_default_noise{0, 40};  // used when no @default_noise header
    RootLexicon root_lexicon;
};

namespace dsl {

struct Line {
    std::string text;
    std::size_t number = 0;
};

[[noreturn]] inline void fail(const Line& ln, std::size_t col, const std::string& what) {
    throw parse_error("grammar syntax error at line " + std::to_string(ln.number) + ", column " +
                      std::to_string(col + 1) + ": " + what);
}

// Strip a '#' comment, ignoring '#' inside double quotes.
inline std::string strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

struct Cursor {
    const Line& line;
    std::size_t pos = 0;

    bool eof() const { return pos >= line.text.size(); }
    char peek() const { return line.text[pos]; }
    void skip_ws() {
        while (!eof() && detail::is_space(peek())) ++pos;
    }
    bool consume(char c) {
        if (!eof() && peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool consume_word(std::string_view w) {
        if (line.text.compare(pos, w.size(), w) == 0) {
            pos += w.size();
            return true;
        }
        return false;
    }
    std::string ident() {
        skip_ws();
        std::size_t a = pos;
        if (eof() || !detail::is_ident_start(peek())) fail(line, pos, "expected identifier");
        while (!eof() && detail::is_ident_char(peek())) ++pos;
        return line.text.substr(a, pos - a);
    }
    std::string quoted() {
        skip_ws();
        if (!consume('"')) fail(line, pos, "expected '\"'");
        std::size_t a = pos;
        while (!eof() && peek() != '"') ++pos;
        if (eof()) fail(line, pos, "unterminated string");
        std::string w = line.text.substr(a, pos - a);
        ++pos;
        return w;
    }
    double number() {
        skip_ws();
        std::size_t a = pos;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                          peek() == '-' || peek() == '+' || peek() == 'e' || peek() == 'E'))
            ++pos;
        double v = 0;
        auto [p, ec] = std::from_chars(line.text.data() + a, line.text.data() + pos, v);
        if (ec != std::errc() || p != line.text.data() + pos || a == pos)
            fail(line, a, "expected number");
        return v;
    }
    std::size_t integer() {
        skip_ws();
        std::size_t a = pos;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(line.text.data() + a, line.text.data() + pos, v);
        if (ec != std::errc() || a == pos) fail(line, a, "expected integer");
        return v;
    }
};

// Raw RHS element before noise-name resolution.
struct RawSymbol {
    enum Kind { probe, literal, root, name } kind = name;
    TerminalSpec term;
    std::string ident;
    std::size_t col = 0;
};

struct RawRule {
    Line line;
    std::string lhs;
    std::vector<RawSymbol> rhs;
    double probability = 0.0;
    std::optional<std::string> id;
};

}  // namespace dsl

inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

inline Grammar parse_grammar(std::string_view source, const GrammarParseOptions& opts = {}) {
    Grammar g;
    g.start_symbols.clear();
    g.default_noise = opts.fallback_default_noise;
    g.root_lexicon = opts.root_lexicon;

    std::vector<dsl::RawRule> raw_rules;
    std::map<std::string, NoiseSpec> noise_decls;
    bool saw_default_noise = false;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t nl = source.find('\n', start);
        std::string_view raw_line = source.substr(
            start, nl == std::string_view::npos ? source.size() - start : nl - start);
        start = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;

        dsl::Line ln{dsl::strip_comment(raw_line), line_no};
        dsl::Cursor c{ln};
        c.skip_ws();
        if (c.eof()) continue;

        if (c.peek() == '@') {
            ++c.pos;
            std::string directive = c.ident();
            if (directive == "default_noise") {
                c.skip_ws();
                if (!c.consume_word("min=")) dsl::fail(ln, c.pos, "expected min=<int>");
                std::size_t mn = c.integer();
                c.skip_ws();
                if (!c.consume_word("max=")) dsl::fail(ln, c.pos, "expected max=<int>");
                std::size_t mx = c.integer();
                if (mn > mx) dsl::fail(ln, c.pos, "default noise min exceeds max");
                g.default_noise = NoiseSpec{mn, mx};
                saw_default_noise = true;
            } else if (directive == "start") {
                do {
                    g.start_symbols.insert(c.ident());
                    c.skip_ws();
                } while (c.consume(','));
            } else {
                dsl::fail(ln, 0, "unknown directive @" + directive);
            }
            c.skip_ws();
            if (!c.eof()) dsl::fail(ln, c.pos, "trailing input after directive");
            continue;
        }

        std::string lhs = c.ident();
        c.skip_ws();
        if (!c.consume_word("->")) dsl::fail(ln, c.pos, "expected '->'");

        // noise declaration?
        {
            dsl::Cursor probe = c;
            probe.skip_ws();
            if (probe.consume_word("noise")) {
                probe.skip_ws();
                if (probe.eof() || probe.peek() == ';') {
                    if (!probe.consume(';')) dsl::fail(ln, probe.pos, "expected ';'");
                    probe.skip_ws();
                    if (!probe.consume_word("minlength=")) dsl::fail(ln, probe.pos, "expected minlength=<int>");
                    std::size_t mn = probe.integer();
                    probe.skip_ws();
                    if (!probe.consume(',')) dsl::fail(ln, probe.pos, "expected ','");
                    probe.skip_ws();
                    if (!probe.consume_word("maxlength=")) dsl::fail(ln, probe.pos, "expected maxlength=<int>");
                    std::size_t mx = probe.integer();
                    if (mn > mx) dsl::fail(ln, probe.pos, "minlength exceeds maxlength");
                    if (noise_decls.count(lhs)) dsl::fail(ln, 0, "duplicate noise declaration " + lhs);
                    noise_decls[lhs] = NoiseSpec{mn, mx};
                    continue;
                }
            }
        }

        dsl::RawRule rr;
        rr.line = ln;
        rr.lhs = lhs;
        for (;;) {
            c.skip_ws();
            if (c.eof()) dsl::fail(ln, c.pos, "missing ';' before rule attributes");
            if (c.peek() == ';') {
                ++c.pos;
                break;
            }
            dsl::RawSymbol sym;
            sym.col = c.pos;
            if (c.peek() == '{') {
                ++c.pos;
                std::string cat = c.ident();
                if (!c.consume('}')) dsl::fail(ln, c.pos, "expected '}'");
                sym.kind = dsl::RawSymbol::probe;
                sym.term = ProbeTerm{cat};
            } else if (c.peek() == '"') {
                std::string w = c.quoted();
                if (w.empty()) dsl::fail(ln, sym.col, "literal word may not be empty");
                for (char ch : w)
                    if (detail::is_space(ch)) dsl::fail(ln, sym.col, "literal word may not contain whitespace");
                sym.kind = dsl::RawSymbol::literal;
                sym.term = LiteralTerm{w};
            } else {
                std::string name = c.ident();
                if (name == "root" && c.consume('(')) {
                    std::string cat = c.ident();
                    c.skip_ws();
                    if (!c.consume(':')) dsl::fail(ln, c.pos, "expected ':'");
                    std::set<std::string> roots;
                    do {
                        roots.insert(detail::ascii_lower(c.quoted()));
                        c.skip_ws();
                    } while (c.consume('|'));
                    if (!c.consume(')')) dsl::fail(ln, c.pos, "expected ')'");
                    if (roots.empty()) dsl::fail(ln, sym.col, "root terminal needs at least one word");
                    sym.kind = dsl::RawSymbol::root;
                    sym.term = RootTerm{cat, std::move(roots)};
                } else {
                    sym.kind = dsl::RawSymbol::name;
                    sym.ident = name;
                }
            }
            rr.rhs.push_back(std::move(sym));
        }
        if (rr.rhs.empty()) dsl::fail(ln, c.pos, "empty rule right-hand side");

        bool saw_prob = false;
        for (;;) {
            c.skip_ws();
            if (c.eof()) break;
            std::string key = c.ident();
            c.skip_ws();
            if (!c.consume('=')) dsl::fail(ln, c.pos, "expected '=' after " + key);
            if (key == "prob") {
                rr.probability = c.number();
                saw_prob = true;
            } else if (key == "id") {
                rr.id = c.quoted();
            } else {
                dsl::fail(ln, c.pos, "unknown rule attribute " + key);
            }
            c.skip_ws();
            if (!c.consume(',')) break;
        }
        c.skip_ws();
        if (!c.eof()) dsl::fail(ln, c.pos, "trailing input after rule");
        if (!saw_prob) dsl::fail(ln, c.pos, "rule is missing prob=");
        if (rr.probability < 0.0 || rr.probability > 1.0)
            dsl::fail(ln, 0, "probability " + format_double(rr.probability) + " outside [0,1]");
        raw_rules.push_back(std::move(rr));
    }

    if (g.start_symbols.empty()) g.start_symbols.insert("IMP");
    if (!saw_default_noise) g.default_noise = opts.fallback_default_noise;

    std::set<std::string> lhs_names;
    for (const auto& rr : raw_rules) lhs_names.insert(rr.lhs);

    std::set<std::string> used_ids;
    std::size_t next_user = 0;
    for (const auto& rr : raw_rules) {
        Rule rule;
        rule.lhs = rr.lhs;
        rule.probability = rr.probability;
        if (rr.id) {
            rule.id = *rr.id;
        } else {
            while (used_ids.count("U#" + std::to_string(next_user))) ++next_user;
            rule.id = "U#" + std::to_string(next_user++);
        }
        if (!used_ids.insert(rule.id).second)
            dsl::fail(rr.line, 0, "duplicate rule id \"" + rule.id + "\"");

        // resolve names, inline noise, insert implicit noise between
        // adjacent non-noise symbols
        bool prev_noise = false;
        bool any = false;
        for (const auto& rs : rr.rhs) {
            Symbol sym;
            bool noise = false;
            switch (rs.kind) {
                case dsl::RawSymbol::probe:
                case dsl::RawSymbol::literal:
                case dsl::RawSymbol::root:
                    sym = rs.term;
                    break;
                case dsl::RawSymbol::name: {
                    auto it = noise_decls.find(rs.ident);
                    if (it != noise_decls.end()) {
                        sym = it->second;
                        noise = true;
                    } else if (lhs_names.count(rs.ident)) {
                        sym = NonTerminal{rs.ident};
                    } else {
                        dsl::fail(rr.line, rs.col, "undefined non-terminal " + rs.ident);
                    }
                    break;
                }
            }
            if (noise) {
                if (!any)
                    dsl::fail(rr.line, rs.col, "rule may not begin with noise");
                if (prev_noise)
                    dsl::fail(rr.line, rs.col, "adjacent noise symbols");
            } else if (any && !prev_noise) {
                rule.rhs.push_back(g.default_noise);
            }
            rule.rhs.push_back(std::move(sym));
            prev_noise = noise;
            any = true;
        }
        if (prev_noise)
            dsl::fail(rr.line, rr.line.text.size(), "rule may not end with noise");
        g.rules.push_back(std::move(rule));
    }

    for (const auto& s : g.start_symbols) {
        if (!lhs_names.count(s))
            throw parse_error("start symbol " + s + " has no rules");
    }
    return g;
}

inline std::string serialize_root_lexicon(const RootLexicon& lex) {
    std::string out;
    for (const auto& [root, forms] : lex) {
        out += root + ":";
        bool first = true;
        for (const auto& f : forms) {
            out += first ? " " : ", ";
            out += f;
            first = false;
        }
        out += "\n";
    }
    return out;
}

inline RootLexicon parse_root_lexicon(std::string_view source) {
    RootLexicon lex;
    std::size_t line_no = 0, start = 0;
    while (start <= source.size()) {
        std::size_t nl = source.find('\n', start);
        std::string_view raw = source.substr(
            start, nl == std::string_view::npos ? source.size() - start : nl - start);
        start = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;
        std::string text = dsl::strip_comment(raw);
        std::size_t colon = text.find(':');
        std::string_view tv = text;
        auto trim = [](std::string_view v) {
            while (!v.empty() && detail::is_space(v.front())) v.remove_prefix(1);
            while (!v.empty() && detail::is_space(v.back())) v.remove_suffix(1);
            return v;
        };
        if (trim(tv).empty()) continue;
        if (colon == std::string::npos)
            throw parse_error("root lexicon line " + std::to_string(line_no) + ": expected 'root: forms'");
        std::string root(trim(tv.substr(0, colon)));
        std::set<std::string>& forms = lex[root];
        std::string_view rest = tv.substr(colon + 1);
        while (!rest.empty()) {
            std::size_t comma = rest.find(',');
            std::string_view f = trim(rest.substr(0, comma));
            if (!f.empty()) forms.insert(std::string(f));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    return lex;
}

// Emits DSL text that parses back to a structurally identical grammar.
// Implicit noise is printed explicitly (as named noise declarations) so
// the round trip is exact.
inline std::string serialize_grammar(const Grammar& g) {
    std::string out;
    out += "@default_noise min=" + std::to_string(g.default_noise.min_chars) +
           " max=" + std::to_string(g.default_noise.max_chars) + "\n";
    if (!g.start_symbols.empty()) {
        out += "@start ";
        bool first = true;
        for (const auto& s : g.start_symbols) {
            if (!first) out += ",";
            out += s;
            first = false;
        }
        out += "\n";
    }

    std::set<std::string> taken;
    for (const auto& r : g.rules) taken.insert(r.lhs);
    std::map<NoiseSpec, std::string> noise_names;
    for (const auto& r : g.rules)
        for (const auto& s : r.rhs)
            if (const auto* ns = std::get_if<NoiseSpec>(&s))
                if (!noise_names.count(*ns)) {
                    std::string name = "N" + std::to_string(ns->min_chars) + "_" +
                                       std::to_string(ns->max_chars);
                    while (taken.count(name)) name += "_";
                    taken.insert(name);
                    noise_names[*ns] = name;
                }
    for (const auto& [spec, name] : noise_names)
        out += name + " -> noise ; minlength=" + std::to_string(spec.min_chars) +
               ", maxlength=" + std::to_string(spec.max_chars) + "\n";

    for (const auto& r : g.rules) {
        out += r.lhs + " ->";
        for (const auto& s : r.rhs) {
            out += " ";
            if (const auto* ns = std::get_if<NoiseSpec>(&s)) {
                out += noise_names.at(*ns);
            } else if (const auto* nt = std::get_if<NonTerminal>(&s)) {
                out += nt->name;
            } else {
                const auto& t = std::get<TerminalSpec>(s);
                if (const auto* p = std::get_if<ProbeTerm>(&t)) {
                    out += "{" + p->category + "}";
                } else if (const auto* l = std::get_if<LiteralTerm>(&t)) {
                    out += "\"" + l->word + "\"";
                } else {
                    const auto& rt = std::get<RootTerm>(t);
                    out += "root(" + rt.category + ":";
                    bool first = true;
                    for (const auto& w : rt.roots) {
                        if (!first) out += "|";
                        out += " \"" + w + "\"";
                        first = false;
                    }
                    out += ")";
                }
            }
        }
        out += " ; prob=" + format_double(r.probability) + ", id=\"" + r.id + "\"\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline std::vector<Diagnostic> validate_grammar(const Grammar& g) {
    std::vector<Diagnostic> out;

    std::set<std::string> lhs_names;
    std::set<std::string> ids;
    for (const auto& r : g.rules) {
        lhs_names.insert(r.lhs);
        if (!ids.insert(r.id).second)
            out.push_back({Severity::failure, "duplicate rule id \"" + r.id + "\""});
    }

    for (const auto& r : g.rules) {
        bool has_non_noise = false;
        bool prev_noise = false;
        for (std::size_t i = 0; i < r.rhs.size(); ++i) {
            const Symbol& s = r.rhs[i];
            if (is_noise(s)) {
                const auto& ns = std::get<NoiseSpec>(s);
                if (ns.min_chars > ns.max_chars)
                    out.push_back({Severity::failure,
                                   "rule " + r.id + ": noise min exceeds max"});
                if (i == 0 || i + 1 == r.rhs.size())
                    out.push_back({Severity::failure,
                                   "rule " + r.id + ": noise at rule boundary"});
                if (prev_noise)
                    out.push_back({Severity::failure,
                                   "rule " + r.id + ": adjacent noise symbols"});
                prev_noise = true;
                continue;
            }
            prev_noise = false;
            has_non_noise = true;
            if (const auto* nt = std::get_if<NonTerminal>(&s)) {
                if (!lhs_names.count(nt->name))
                    out.push_back({Severity::failure,
                                   "rule " + r.id + ": undefined non-terminal " + nt->name});
            } else if (const auto* t = std::get_if<TerminalSpec>(&s)) {
                if (const auto* rt = std::get_if<RootTerm>(t)) {
                    for (const auto& w : rt->roots)
                        if (!g.root_lexicon.count(w))
                            out.push_back({Severity::warning,
                                           "rule " + r.id + ": root word \"" + w +
                                               "\" not in root lexicon (suffix fallback only)"});
                }
            }
        }
        if (r.rhs.empty() || !has_non_noise)
            out.push_back({Severity::failure, "rule " + r.id + ": no non-noise symbol"});
        if (r.probability < 0.0 || r.probability > 1.0)
            out.push_back({Severity::failure,
                           "rule " + r.id + ": probability outside [0,1]"});
    }

    for (const auto& s : g.start_symbols)
        if (!lhs_names.count(s))
            out.push_back({Severity::failure, "start symbol " + s + " has no rules"});

    // reachability from start symbols
    std::set<std::string> reachable = g.start_symbols;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& r : g.rules) {
            if (!reachable.count(r.lhs)) continue;
            for (const auto& s : r.rhs)
                if (const auto* nt = std::get_if<NonTerminal>(&s))
                    if (reachable.insert(nt->name).second) grew = true;
        }
    }
    for (const auto& name : lhs_names)
        if (!reachable.count(name))
            out.push_back({Severity::warning, "non-terminal " + name + " unreachable from start symbols"});

    // learned clusters must carry unit probability mass: rule ids
    // "L<cluster>#<n>" group by cluster index
    std::map<std::string, double> cluster_mass;
    std::map<std::string, std::string> cluster_lhs;
    for (const auto& r : g.rules) {
        if (r.id.size() > 1 && r.id[0] == 'L') {
            auto hash = r.id.find('#');
            if (hash == std::string::npos) continue;
            std::string cluster = r.id.substr(0, hash);
            cluster_mass[cluster] += r.probability;
            cluster_lhs[cluster] = r.lhs;
        }
    }
    for (const auto& [cluster, mass] : cluster_mass) {
        if (std::abs(mass - 1.0) > 1e-9)
            out.push_back({Severity::warning,
                           "probabilities for " + cluster_lhs[cluster] + " (cluster " + cluster +
                               ") sum to " + format_double(mass) + ", expected 1"});
    }
    return out;
}

}  // namespace agx
