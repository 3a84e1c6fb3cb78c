#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "agx/eval.hpp"
#include "agx/extract.hpp"
#include "agx/learner.hpp"
#include "agx/text.hpp"

namespace agx {

// ---------------------------------------------------------------------------
// File formats
//
//   corpus:       JSON-lines records {"doc_id": ..., "text": ...} where text
//                 holds the inline markup, or a plain UTF-8 file holding one
//                 document (doc_id = file stem)
//   extractions:  JSON-lines, one record per informational string
//   stats:        JSON array with per-cluster slot statistics
// ---------------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write file: " + path.string());
    out << content;
}

inline std::vector<AnnotatedDocument> parse_corpus_jsonl(const std::string& content,
                                                         const std::string& origin) {
    std::vector<AnnotatedDocument> docs;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(origin + ":" + std::to_string(line_no) + ": bad JSON record: " +
                              e.what());
        }
        std::string doc_id = rec.value("doc_id", origin + "#" + std::to_string(line_no));
        if (!rec.contains("text"))
            throw parse_error(origin + ":" + std::to_string(line_no) + ": missing \"text\" field");
        docs.push_back(parse_annotated_document(rec["text"].get<std::string>(), doc_id));
    }
    return docs;
}

inline std::vector<AnnotatedDocument> read_corpus_file(const std::filesystem::path& path) {
    std::string content = read_file(path);
    std::size_t first = content.find_first_not_of(" \t\r\n");
    bool jsonl = path.extension() == ".jsonl" ||
                 (first != std::string::npos && content[first] == '{');
    if (jsonl) return parse_corpus_jsonl(content, path.filename().string());
    return {parse_annotated_document(content, path.stem().string())};
}

inline std::vector<AnnotatedDocument> read_corpus(const std::vector<std::string>& paths) {
    std::vector<AnnotatedDocument> docs;
    for (const auto& p : paths) {
        auto part = read_corpus_file(p);
        docs.insert(docs.end(), std::make_move_iterator(part.begin()),
                    std::make_move_iterator(part.end()));
    }
    return docs;
}

inline nlohmann::json parse_node_to_json(const ParseNodePtr& node) {
    nlohmann::json j;
    j["rule_id"] = node->rule_id;
    j["symbol"] = node->symbol;
    j["char_start"] = node->chars.begin;
    j["char_end"] = node->chars.end;
    j["score"] = node->score;
    auto& children = j["children"] = nlohmann::json::array();
    for (const auto& child : node->children) {
        if (const auto* tm = std::get_if<TerminalMatch>(&child)) {
            nlohmann::json t{{"kind", "terminal"},
                             {"terminal", terminal_key(tm->terminal)},
                             {"char_start", tm->chars.begin},
                             {"char_end", tm->chars.end},
                             {"confidence", tm->confidence}};
            children.push_back(std::move(t));
        } else if (const auto* nf = std::get_if<NoiseFill>(&child)) {
            children.push_back(nlohmann::json{{"kind", "noise"},
                                              {"char_start", nf->chars.begin},
                                              {"char_end", nf->chars.end},
                                              {"gap", nf->gap_len},
                                              {"min", nf->spec.min_chars},
                                              {"max", nf->spec.max_chars}});
        } else {
            auto sub = parse_node_to_json(std::get<ParseNodePtr>(child));
            sub["kind"] = "node";
            children.push_back(std::move(sub));
        }
    }
    return j;
}

inline nlohmann::json extraction_to_json(const Extraction& e) {
    nlohmann::json j;
    j["doc_id"] = e.doc_id;
    j["char_start"] = e.chars.begin;
    j["char_end"] = e.chars.end;
    j["text"] = e.text;
    j["rule_id"] = e.rule_id;
    j["score"] = e.score;
    auto& probes = j["probes"] = nlohmann::json::array();
    std::vector<TerminalMatch> matches;
    if (e.parse) collect_probe_matches(e.parse, matches);
    for (const auto& m : matches) {
        const auto& probe = std::get<ProbeTerm>(m.terminal);
        probes.push_back(nlohmann::json{{"category", probe.category},
                                        {"text", e.text.substr(m.chars.begin - e.chars.begin,
                                                               m.chars.length())},
                                        {"confidence", m.confidence}});
    }
    return j;
}

inline std::string extractions_to_jsonl(const std::vector<Extraction>& extractions) {
    std::string out;
    for (const auto& e : extractions) {
        out += extraction_to_json(e).dump();
        out += "\n";
    }
    return out;
}

inline nlohmann::json cluster_stats_to_json(const std::vector<ClusterStats>& stats) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& cs : stats) {
        nlohmann::json j;
        j["key"] = cs.key;
        j["instances"] = cs.instances;
        auto& slots = j["slots"] = nlohmann::json::array();
        for (const auto& slot : cs.slots) {
            nlohmann::json sj;
            sj["interiors"] = slot.interiors;
            sj["max_gap"] = slot.max_gap;
            slots.push_back(std::move(sj));
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    if (!std::isnan(r.rho)) j["rho"] = r.rho;
    j["correct"] = r.correct;
    j["extracted"] = r.extracted;
    j["gold_total"] = r.gold_total;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    return j;
}

}  // namespace agx
