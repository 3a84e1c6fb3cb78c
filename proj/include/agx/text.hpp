#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agx/common.hpp"

namespace agx {

struct Token {
    std::string surface;
    std::size_t char_start = 0;  // inclusive
    std::size_t char_end = 0;    // exclusive

    bool operator==(const Token&) const = default;
};

// One annotated atomic-information span (a "probe"), e.g. a player name
// or a runs figure, as produced by an upstream tagger.
struct ProbeSpan {
    std::string category;
    double confidence = 1.0;
    TokenSpan tokens;
    CharSpan chars;

    bool operator==(const ProbeSpan&) const = default;
};

// A gold informational string from training markup, with the ordered
// categories of the probes it contains.
struct GoldSpan {
    CharSpan chars;
    std::vector<std::string> probe_sequence;

    bool operator==(const GoldSpan&) const = default;
};

struct AnnotatedDocument {
    std::string doc_id;
    std::string raw_text;  // markup stripped, whitespace normalized
    std::vector<Token> tokens;
    std::vector<ProbeSpan> probes;
    std::vector<GoldSpan> gold;

    // probe index covering each token, or npos. Filled by finalize().
    std::vector<std::size_t> token_probe;
    // probe index starting at each token, or npos.
    std::vector<std::size_t> probe_at_token;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    void finalize() {
        token_probe.assign(tokens.size(), npos);
        probe_at_token.assign(tokens.size(), npos);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const auto& pr = probes[p];
            for (std::size_t t = pr.tokens.begin; t < pr.tokens.end; ++t)
                token_probe[t] = p;
            if (!pr.tokens.empty()) probe_at_token[pr.tokens.begin] = p;
        }
    }
};

namespace detail {

inline bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

inline bool is_split_punct(char c) {
    switch (c) {
        case '.': case ',': case ';': case ':': case '!': case '?':
        case '"': case '\'': case '(': case ')':
            return true;
        default:
            return false;
    }
}

inline bool is_ident_start(char c) {
    return c == '_' || std::isalpha(static_cast<unsigned char>(c)) != 0;
}

inline bool is_ident_char(char c) {
    return c == '_' || std::isalnum(static_cast<unsigned char>(c)) != 0;
}

}  // namespace detail

// Whitespace-splitting tokenizer. Leading/trailing punctuation characters
// of a chunk become their own single-character tokens, so literal
// terminals like "bowled" never absorb an adjacent comma or period.
inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    auto emit = [&](std::size_t a, std::size_t b) {
        out.push_back(Token{std::string(text.substr(a, b - a)), a, b});
    };
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (detail::is_space(text[i])) {
            ++i;
            continue;
        }
        std::size_t b = i;
        while (b < n && !detail::is_space(text[b])) ++b;
        std::size_t lo = i, hi = b;
        while (lo < hi && detail::is_split_punct(text[lo])) {
            emit(lo, lo + 1);
            ++lo;
        }
        std::size_t tail = hi;
        while (tail > lo && detail::is_split_punct(text[tail - 1])) --tail;
        if (lo < tail) emit(lo, tail);
        for (std::size_t p = tail; p < hi; ++p) emit(p, p + 1);
        i = b;
    }
    return out;
}

// Character length of raw_text[left_end, right_start) after stripping
// leading and trailing whitespace. This is the noise measure: the gap
// ". Hope he does well in " measures 22.
inline std::size_t gap_chars(const AnnotatedDocument& doc, std::size_t left_end,
                             std::size_t right_start) {
    if (left_end > right_start || right_start > doc.raw_text.size())
        throw std::out_of_range("gap_chars: interval [" + std::to_string(left_end) +
                                ", " + std::to_string(right_start) +
                                ") out of range for document '" + doc.doc_id + "'");
    std::size_t a = left_end, b = right_start;
    while (a < b && detail::is_space(doc.raw_text[a])) ++a;
    while (b > a && detail::is_space(doc.raw_text[b - 1])) --b;
    return b - a;
}

namespace detail {

struct MarkupScanner {
    std::string_view src;
    std::size_t pos = 0;

    bool eof() const { return pos >= src.size(); }
    char peek() const { return src[pos]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw parse_error(what + " at offset " + std::to_string(pos));
    }

    std::string read_ident() {
        std::size_t a = pos;
        if (eof() || !is_ident_start(src[pos])) fail("expected tag name");
        while (!eof() && is_ident_char(src[pos])) ++pos;
        return std::string(src.substr(a, pos - a));
    }

    void skip_ws() {
        while (!eof() && is_space(src[pos])) ++pos;
    }
};

}  // namespace detail

// Parses inline markup `<cat ...>content</cat>` into a canonical document.
// `<IMP>` spans become gold informational strings; every other tag is a
// probe category. Whitespace is normalized (runs collapse to one space,
// document and span boundaries trimmed) so character offsets are stable
// regardless of how the markup was spaced. `&amp; &lt; &gt;` escape the
// markup characters.
inline AnnotatedDocument parse_annotated_document(std::string_view source,
                                                  std::string doc_id) {
    AnnotatedDocument doc;
    doc.doc_id = std::move(doc_id);

    struct Open {
        std::string tag;
        std::size_t src_offset = 0;
        std::size_t first_emit = AnnotatedDocument::npos;
        double confidence = 1.0;
        std::vector<std::string> sequence;  // probe categories seen inside (IMP)
    };
    std::optional<Open> imp;
    std::optional<Open> probe;

    std::string& raw = doc.raw_text;
    bool pending_space = false;

    auto emit = [&](char c) {
        if (pending_space && !raw.empty()) raw.push_back(' ');
        pending_space = false;
        std::size_t at = raw.size();
        raw.push_back(c);
        if (imp && imp->first_emit == AnnotatedDocument::npos) imp->first_emit = at;
        if (probe && probe->first_emit == AnnotatedDocument::npos) probe->first_emit = at;
    };

    detail::MarkupScanner s{source};
    while (!s.eof()) {
        char c = s.peek();
        if (c == '&') {
            if (source.compare(s.pos, 5, "&amp;") == 0) { emit('&'); s.pos += 5; }
            else if (source.compare(s.pos, 4, "&lt;") == 0) { emit('<'); s.pos += 4; }
            else if (source.compare(s.pos, 4, "&gt;") == 0) { emit('>'); s.pos += 4; }
            else { emit('&'); ++s.pos; }
            continue;
        }
        if (c != '<') {
            if (detail::is_space(c)) pending_space = true;
            else emit(c);
            ++s.pos;
            continue;
        }

        std::size_t tag_offset = s.pos;
        ++s.pos;  // '<'
        if (!s.eof() && s.peek() == '/') {
            ++s.pos;
            std::string name = s.read_ident();
            s.skip_ws();
            if (s.eof() || s.peek() != '>') s.fail("unterminated closing tag </" + name + ">");
            ++s.pos;
            if (probe) {
                if (probe->tag != name)
                    throw parse_error("mismatched closing tag </" + name + "> for open <" +
                                      probe->tag + "> at offset " + std::to_string(tag_offset));
                ProbeSpan ps;
                ps.category = probe->tag;
                ps.confidence = probe->confidence;
                std::size_t b = probe->first_emit == AnnotatedDocument::npos ? raw.size()
                                                                             : probe->first_emit;
                ps.chars = CharSpan{b, raw.size()};
                doc.probes.push_back(std::move(ps));
                if (imp) imp->sequence.push_back(probe->tag);
                probe.reset();
            } else if (imp) {
                if (name != imp->tag)
                    throw parse_error("mismatched closing tag </" + name + "> for open <" +
                                      imp->tag + "> at offset " + std::to_string(tag_offset));
                GoldSpan gs;
                std::size_t b = imp->first_emit == AnnotatedDocument::npos ? raw.size()
                                                                           : imp->first_emit;
                gs.chars = CharSpan{b, raw.size()};
                gs.probe_sequence = std::move(imp->sequence);
                doc.gold.push_back(std::move(gs));
                imp.reset();
            } else {
                throw parse_error("closing tag </" + name + "> without matching open tag at offset " +
                                  std::to_string(tag_offset));
            }
            continue;
        }

        std::string name = s.read_ident();
        Open open;
        open.tag = name;
        open.src_offset = tag_offset;
        // attributes: only conf="x" is meaningful, the rest are skipped
        for (;;) {
            s.skip_ws();
            if (s.eof()) throw parse_error("unterminated tag <" + name + "> at offset " +
                                           std::to_string(tag_offset));
            if (s.peek() == '>') { ++s.pos; break; }
            std::string attr = s.read_ident();
            s.skip_ws();
            std::string value;
            if (!s.eof() && s.peek() == '=') {
                ++s.pos;
                s.skip_ws();
                if (s.eof() || s.peek() != '"') s.fail("expected quoted attribute value");
                ++s.pos;
                std::size_t a = s.pos;
                while (!s.eof() && s.peek() != '"') ++s.pos;
                if (s.eof()) s.fail("unterminated attribute value");
                value = std::string(source.substr(a, s.pos - a));
                ++s.pos;
            }
            if (attr == "conf") {
                try {
                    open.confidence = std::stod(value);
                } catch (const std::exception&) {
                    throw validation_error("bad conf value \"" + value + "\" on <" + name +
                                           "> at offset " + std::to_string(tag_offset));
                }
                if (open.confidence < 0.0 || open.confidence > 1.0)
                    throw validation_error("conf " + value + " outside [0,1] on <" + name +
                                           "> at offset " + std::to_string(tag_offset));
            }
        }

        if (name == "IMP") {
            if (imp || probe)
                throw parse_error("<IMP> may not nest inside <" +
                                  (probe ? probe->tag : imp->tag) + "> at offset " +
                                  std::to_string(tag_offset));
            imp = std::move(open);
        } else {
            if (probe)
                throw parse_error("probe <" + name + "> may not nest inside open <" + probe->tag +
                                  "> at offset " + std::to_string(tag_offset));
            probe = std::move(open);
        }
    }
    if (probe)
        throw parse_error("unclosed tag <" + probe->tag + "> opened at offset " +
                          std::to_string(probe->src_offset));
    if (imp)
        throw parse_error("unclosed tag <" + imp->tag + "> opened at offset " +
                          std::to_string(imp->src_offset));

    doc.tokens = tokenize(doc.raw_text);
    for (auto& pr : doc.probes) {
        std::size_t first = AnnotatedDocument::npos, last = 0;
        for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
            const auto& tk = doc.tokens[t];
            if (tk.char_start < pr.chars.end && tk.char_end > pr.chars.begin) {
                if (first == AnnotatedDocument::npos) first = t;
                last = t + 1;
            }
        }
        pr.tokens = first == AnnotatedDocument::npos ? TokenSpan{0, 0} : TokenSpan{first, last};
    }
    doc.finalize();
    return doc;
}

// Trim a span against the document text; exact-match evaluation and
// training-instance collection both compare trimmed spans.
inline CharSpan trim_span(const std::string& text, CharSpan s) {
    std::size_t a = s.begin, b = std::min(s.end, text.size());
    while (a < b && detail::is_space(text[a])) ++a;
    while (b > a && detail::is_space(text[b - 1])) --b;
    return CharSpan{a, b};
}

}  // namespace agx
