// agx — approximate-grammar information extraction.
//
// Subcommands: learn, extract, eval, sweep, explain, gen.
// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agx/agx.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::vector<std::string> corpus;
    std::string grammar_path;
    std::string out_path;
    std::vector<double> rhos;
    double generic_mass = 0.5;
    std::size_t default_noise_max = 40;
    std::size_t noise_slack = 0;
    double train_fraction = 0.8;
    std::uint32_t seed = 0;
    std::string mode = "exact";
    bool json = false;
    bool self_test = false;
    std::size_t explain_index = 0;
    std::string explain_doc;
    std::size_t gen_docs = 220;
};

void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    agx::write_file(path, content);
}

agx::Grammar load_grammar(const Options& opt) {
    agx::GrammarParseOptions popts;
    popts.fallback_default_noise = agx::NoiseSpec{0, opt.default_noise_max};
    fs::path sidecar = opt.grammar_path + ".roots";
    if (fs::exists(sidecar))
        popts.root_lexicon = agx::parse_root_lexicon(agx::read_file(sidecar));
    agx::Grammar g = agx::parse_grammar(agx::read_file(opt.grammar_path), popts);
    auto diags = agx::validate_grammar(g);
    for (const auto& d : diags)
        if (d.severity == agx::Severity::warning)
            std::cerr << "warning: " << d.message << "\n";
    if (agx::has_failure(diags)) {
        for (const auto& d : diags)
            if (d.severity == agx::Severity::failure)
                std::cerr << "error: " << d.message << "\n";
        throw agx::validation_error("grammar failed validation: " + opt.grammar_path);
    }
    return g;
}

agx::LearnerConfig learner_config(const Options& opt, double rho) {
    agx::LearnerConfig cfg;
    cfg.rho = rho;
    cfg.generic_mass = opt.generic_mass;
    cfg.noise_slack_chars = opt.noise_slack;
    cfg.default_noise = agx::NoiseSpec{0, opt.default_noise_max};
    return cfg;
}

int cmd_learn(const Options& opt) {
    auto corpus = agx::read_corpus(opt.corpus);
    double rho = opt.rhos.empty() ? 0.0 : opt.rhos.front();
    auto result = agx::learn_grammar(corpus, learner_config(opt, rho));
    for (const auto& w : result.warnings) std::cerr << "warning: " << w.message << "\n";
    agx::write_file(opt.out_path, agx::serialize_grammar(result.grammar));
    agx::write_file(opt.out_path + ".stats.json",
                    agx::cluster_stats_to_json(result.stats).dump(2) + "\n");
    std::cerr << "learned " << result.grammar.rules.size() << " rules from " << corpus.size()
              << " documents -> " << opt.out_path << "\n";
    return 0;
}

int cmd_extract(const Options& opt) {
    agx::Grammar g = load_grammar(opt);
    auto corpus = agx::read_corpus(opt.corpus);
    std::vector<agx::Extraction> all;
    for (const auto& doc : corpus) {
        auto ex = agx::extract(doc, g);
        all.insert(all.end(), ex.begin(), ex.end());
    }
    write_or_print(opt.out_path, agx::extractions_to_jsonl(all));
    return 0;
}

int cmd_eval(const Options& opt) {
    agx::Grammar g = load_grammar(opt);
    auto corpus = agx::read_corpus(opt.corpus);
    std::vector<agx::Extraction> all;
    for (const auto& doc : corpus) {
        auto ex = agx::extract(doc, g);
        all.insert(all.end(), ex.begin(), ex.end());
    }
    agx::EvalReport r = agx::score_extractions(all, corpus, agx::parse_match_mode(opt.mode));
    std::string out = opt.json ? agx::report_to_json(r).dump() + "\n"
                               : agx::render_report_table({r});
    write_or_print(opt.out_path, out);
    return 0;
}

int cmd_sweep(const Options& opt) {
    auto corpus = agx::read_corpus(opt.corpus);
    agx::SweepConfig cfg;
    cfg.learner = learner_config(opt, 0.0);
    cfg.train_fraction = opt.train_fraction;
    cfg.seed = opt.seed;
    cfg.mode = agx::parse_match_mode(opt.mode);
    cfg.self_test = opt.self_test;
    auto reports = agx::rho_sweep(corpus, opt.rhos, cfg);
    std::string out;
    if (opt.json) {
        for (const auto& r : reports) out += agx::report_to_json(r).dump() + "\n";
    } else {
        out = agx::render_report_table(reports);
    }
    write_or_print(opt.out_path, out);
    return 0;
}

int cmd_explain(const Options& opt) {
    agx::Grammar g = load_grammar(opt);
    auto corpus = agx::read_corpus(opt.corpus);
    std::vector<std::pair<const agx::AnnotatedDocument*, agx::Extraction>> all;
    for (const auto& doc : corpus) {
        if (!opt.explain_doc.empty() && doc.doc_id != opt.explain_doc) continue;
        for (auto& e : agx::extract(doc, g)) all.emplace_back(&doc, std::move(e));
    }
    if (opt.explain_index >= all.size())
        throw agx::validation_error("extraction index " + std::to_string(opt.explain_index) +
                                    " out of range (have " + std::to_string(all.size()) + ")");
    const auto& [doc, extraction] = all[opt.explain_index];
    if (opt.json) {
        auto j = agx::extraction_to_json(extraction);
        j["parse"] = agx::parse_node_to_json(extraction.parse);
        write_or_print(opt.out_path, j.dump(2) + "\n");
    } else {
        write_or_print(opt.out_path, agx::explain(*doc, g, extraction));
    }
    return 0;
}

int cmd_gen(const Options& opt) {
    agx::SyntheticConfig cfg;
    cfg.docs = opt.gen_docs;
    cfg.seed = opt.seed;
    auto markup = agx::synthetic_corpus_markup(cfg);
    std::string out;
    for (std::size_t i = 0; i < markup.size(); ++i) {
        nlohmann::json j{{"doc_id", "syn-" + std::to_string(i)}, {"text", markup[i]}};
        out += j.dump() + "\n";
    }
    write_or_print(opt.out_path, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"approximate-grammar information extraction"};
    app.require_subcommand(1);
    Options opt;

    auto add_corpus = [&](CLI::App* c, bool required = true) {
        auto* o = c->add_option("--corpus", opt.corpus, "corpus file(s): JSON-lines or plain text");
        if (required) o->required();
    };
    auto add_grammar = [&](CLI::App* c) {
        c->add_option("--grammar", opt.grammar_path, "grammar DSL file")->required();
    };
    auto add_learner_flags = [&](CLI::App* c) {
        c->add_option("--generic-mass", opt.generic_mass, "probability mass of the generic rule")
            ->check(CLI::Range(0.0, 1.0));
        c->add_option("--default-noise-max", opt.default_noise_max,
                      "default noise maximum (chars)");
        c->add_option("--noise-slack", opt.noise_slack, "slack added to learned noise maxima");
    };
    auto add_rho = [&](CLI::App* c, bool required) {
        auto* o = c->add_option("--rho", opt.rhos, "RHO threshold(s) in [0,1]")
                      ->delimiter(',')
                      ->check(CLI::Range(0.0, 1.0));
        if (required) o->required();
    };

    CLI::App* learn = app.add_subcommand("learn", "induce a grammar from gold-annotated corpus");
    add_corpus(learn);
    learn->add_option("--out", opt.out_path, "output grammar path")->required();
    add_rho(learn, false);
    add_learner_flags(learn);

    CLI::App* extract = app.add_subcommand("extract", "extract informational strings");
    add_grammar(extract);
    add_corpus(extract);
    extract->add_option("--out", opt.out_path, "output JSON-lines path (default stdout)");
    extract->add_option("--default-noise-max", opt.default_noise_max,
                        "default noise maximum (chars)");

    CLI::App* eval = app.add_subcommand("eval", "score extractions against gold spans");
    add_grammar(eval);
    add_corpus(eval);
    eval->add_option("--out", opt.out_path, "output path (default stdout)");
    eval->add_option("--mode", opt.mode, "matching mode: exact|overlap")
        ->check(CLI::IsMember({"exact", "overlap"}));
    eval->add_flag("--json", opt.json, "JSON-lines output");
    eval->add_option("--default-noise-max", opt.default_noise_max,
                     "default noise maximum (chars)");

    CLI::App* sweep = app.add_subcommand("sweep", "RHO sweep: split, learn, extract, score");
    add_corpus(sweep);
    add_rho(sweep, true);
    add_learner_flags(sweep);
    sweep->add_option("--train-fraction", opt.train_fraction, "train split fraction")
        ->check(CLI::Range(0.0, 1.0));
    sweep->add_option("--seed", opt.seed, "split shuffle seed");
    sweep->add_option("--mode", opt.mode, "matching mode: exact|overlap")
        ->check(CLI::IsMember({"exact", "overlap"}));
    sweep->add_flag("--self-test", opt.self_test, "train and test on the full corpus");
    sweep->add_flag("--json", opt.json, "JSON-lines output");
    sweep->add_option("--out", opt.out_path, "output path (default stdout)");

    CLI::App* explain = app.add_subcommand("explain", "print the derivation of one extraction");
    add_grammar(explain);
    add_corpus(explain);
    explain->add_option("--index", opt.explain_index, "extraction index (document order)");
    explain->add_option("--doc", opt.explain_doc, "restrict to one doc_id");
    explain->add_flag("--json", opt.json, "machine-readable derivation");
    explain->add_option("--out", opt.out_path, "output path (default stdout)");
    explain->add_option("--default-noise-max", opt.default_noise_max,
                        "default noise maximum (chars)");

    CLI::App* gen = app.add_subcommand("gen", "write a synthetic annotated corpus");
    gen->add_option("--out", opt.out_path, "output JSON-lines path (default stdout)");
    gen->add_option("--docs", opt.gen_docs, "number of documents");
    gen->add_option("--seed", opt.seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (learn->parsed()) return cmd_learn(opt);
        if (extract->parsed()) return cmd_extract(opt);
        if (eval->parsed()) return cmd_eval(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (explain->parsed()) return cmd_explain(opt);
        if (gen->parsed()) return cmd_gen(opt);
    } catch (const agx::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const agx::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
