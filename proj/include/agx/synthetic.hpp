#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "agx/text.hpp"

namespace agx {

// ---------------------------------------------------------------------------
// Synthetic cricket-style corpus: templated annotated sentences over probe
// vocabularies, for desk-scale learning and sweep experiments.
//
// Gold spans start and end on probes, adjacent probes always carry at
// least one word between them, and inter-sentence filler is longer than
// any in-span gap, so learned noise bounds never bridge two informational
// strings. Rare templates and gap variants leave room for the usual
// train/test recall and precision losses.
// ---------------------------------------------------------------------------

struct SyntheticConfig {
    std::size_t docs = 220;
    std::uint32_t seed = 0;
};

namespace detail {

struct SynRng {
    std::mt19937 rng;
    explicit SynRng(std::uint32_t seed) : rng(seed) {}
    std::size_t below(std::size_t n) { return rng() % n; }
    const char* pick(const std::vector<const char*>& v) { return v[below(v.size())]; }
    bool chance(std::size_t percent) { return below(100) < percent; }
    std::string number(std::size_t lo, std::size_t hi) {
        return std::to_string(lo + below(hi - lo + 1));
    }
};

}  // namespace detail

inline std::vector<std::string> synthetic_corpus_markup(const SyntheticConfig& cfg = {}) {
    using detail::SynRng;
    SynRng r(cfg.seed);

    const std::vector<const char*> players = {
        "Tendulkar", "Dravid", "Laxman", "Ganguly", "Kumble", "Sehwag", "Kapil Dev",
        "Srinath", "Zaheer", "Yuvraj", "Kaif", "Harbhajan", "Agarkar", "Nehra",
        "Ponting", "Gilchrist", "Warne", "McGrath", "Hayden", "Lara", "Walsh", "Ambrose"};
    const std::vector<const char*> teams = {"India", "Australia", "Pakistan", "England",
                                            "Sri Lanka", "South Africa", "West Indies",
                                            "New Zealand", "Kenya", "Zimbabwe"};
    const std::vector<const char*> venues = {"Eden Gardens", "Lords", "Old Trafford",
                                             "Wankhede", "Chepauk", "Gabba", "Kotla",
                                             "Premadasa"};
    const std::vector<const char*> tournaments = {"Ranji Trophy", "Asia Cup", "NatWest Series",
                                                  "World Cup"};
    // skewed synonym frequencies so RHO filtering has something to cut
    const std::vector<const char*> scored = {"scored", "scored", "scored", "scored", "scored",
                                             "made", "made", "made", "made",
                                             "hit", "hit", "hammered"};
    const std::vector<const char*> took = {"took", "took", "took", "took", "took",
                                           "claimed", "claimed", "grabbed"};
    const std::vector<const char*> beat = {"beat", "beat", "beat", "beat", "thrashed"};
    const std::vector<const char*> rapid = {"rapid ", "rapid ", "rapid ", "quick ", "quick ",
                                            "truly rapid "};
    const std::vector<const char*> fillers = {
        "The crowd cheered loudly through the entire afternoon session of play.",
        "Rain interrupted the proceedings twice before the umpires called an early tea.",
        "The selectors are expected to announce the squad for the coming tour shortly.",
        "Both captains praised the pitch after a long day under a hot clear sky.",
        "The third umpire was called upon twice within the space of a single over.",
        "Commentators spent the morning discussing the state of the outfield at length.",
        "A minor floodlight failure held up the evening session for several minutes."};

    auto imp_sentence = [&](SynRng& rg) -> std::string {
        std::size_t roll = rg.below(100);
        std::string s = "<IMP>";
        if (roll < 30) {
            s += "<player>" + std::string(rg.pick(players)) + "</player> " + rg.pick(scored) +
                 " <runs>" + rg.number(1, 199) + " runs</runs>";
        } else if (roll < 50) {
            s += "<player>" + std::string(rg.pick(players)) + "</player> " + rg.pick(took) +
                 " <wickets>" + rg.number(1, 9) + " wickets</wickets>";
        } else if (roll < 65) {
            s += "<team>" + std::string(rg.pick(teams)) + "</team> " + rg.pick(beat) + " <team>" +
                 rg.pick(teams) + "</team> by <runs>" + rg.number(5, 180) + " runs</runs>";
        } else if (roll < 77) {
            s += "<player>" + std::string(rg.pick(players)) + "</player> faced <balls>" +
                 rg.number(10, 140) + " balls</balls> for <runs>" + rg.number(1, 160) +
                 "</runs>";
        } else if (roll < 89) {
            s += "<team>" + std::string(rg.pick(teams)) + "</team> posted <runs>" +
                 rg.number(120, 400) + "</runs> at <venue>" + rg.pick(venues) + "</venue>";
        } else if (roll < 96) {
            s += "<player>" + std::string(rg.pick(players)) + "</player> " + rg.pick(scored) +
                 " a " + rg.pick(rapid) + "<runs>" + rg.number(30, 110) + "</runs> off <balls>" +
                 rg.number(20, 60) + " balls</balls>";
        } else if (roll < 99) {
            s += "<team>" + std::string(rg.pick(teams)) + "</team> lifted the <tment>" +
                 rg.pick(tournaments) + "</tment> at <venue>" + rg.pick(venues) + "</venue>";
        } else {
            // the occasional upstream mislabel: the beaten team tagged as a player
            s += "<team>" + std::string(rg.pick(teams)) + "</team> beat <player>" +
                 rg.pick(teams) + "</player> by <runs>" + rg.number(5, 180) + " runs</runs>";
        }
        s += "</IMP>.";
        return s;
    };

    std::vector<std::string> docs;
    docs.reserve(cfg.docs);
    for (std::size_t d = 0; d < cfg.docs; ++d) {
        std::string text;
        if (r.chance(10)) {
            // the odd report with nothing worth extracting
            text = std::string(r.pick(fillers)) + " " + r.pick(fillers);
        } else {
            std::size_t spans = 1 + r.below(3);
            if (r.chance(25)) text += std::string(r.pick(fillers)) + " ";
            for (std::size_t i = 0; i < spans; ++i) {
                if (i > 0) text += " " + std::string(r.pick(fillers)) + " ";
                text += imp_sentence(r);
            }
            if (r.chance(15))
                text += " Officials met with the organizers near <venue>" +
                        std::string(r.pick(venues)) + "</venue> before the final session.";
        }
        docs.push_back(std::move(text));
    }
    return docs;
}

inline std::vector<AnnotatedDocument> synthetic_corpus(const SyntheticConfig& cfg = {}) {
    std::vector<AnnotatedDocument> out;
    auto markup = synthetic_corpus_markup(cfg);
    out.reserve(markup.size());
    for (std::size_t i = 0; i < markup.size(); ++i)
        out.push_back(parse_annotated_document(markup[i], "syn-" + std::to_string(i)));
    return out;
}

}  // namespace agx
