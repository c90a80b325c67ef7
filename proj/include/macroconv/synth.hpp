#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "macroconv/changeover.hpp"
#include "macroconv/corpus.hpp"
#include "macroconv/fights.hpp"
#include "macroconv/rng.hpp"
#include "macroconv/timeline.hpp"

namespace macroconv {

enum class SynthPreset { Changeover, NameFights, TitleFights, Full };

std::string_view to_string(SynthPreset preset);
std::optional<SynthPreset> parse_synth_preset(std::string_view name);

struct SynthConfig {
    std::uint64_t seed = 1;

    // Changeover bodies: names switch abruptly at a planted point in (0.35, 0.65).
    std::size_t changeover_bodies = 0;
    std::size_t control_bodies = 0;
    std::size_t min_occurrences = 120;
    std::size_t max_occurrences = 240;
    std::size_t author_pool = 400;

    // Name and body fights: a fresh author pair per fight.
    std::size_t name_fights = 0;
    std::size_t body_fights = 0;
    double younger_win_probability = 0.7;
    double body_younger_win_probability = 0.6;
    std::size_t max_fight_experience = 12;

    // Title fights, generated as swap-matched pairs on the colon style.
    std::size_t title_pairs = 0;
    double high_dominance_probability = 0.57;

    std::size_t papers_per_day = 20;

    /// Throws std::invalid_argument for probabilities outside [0, 1] or schedules the
    /// detectors could not see (e.g. too few fights per contested key).
    void validate() const;

    static SynthConfig preset(SynthPreset preset, std::uint64_t seed);
};

struct PlantedBody {
    std::string body_key;
    bool changeover = false;
    std::string early_name;
    std::string late_name;
    std::size_t m = 0;
    double switch_point = 0.0;  // fraction of the lifespan where the late name takes over
};

struct PlantedFight {
    FightKind kind = FightKind::Name;
    std::string paper_id;
    std::string key;
    AuthorId first;
    AuthorId second;
    int winner = 0;
    bool younger_won = false;
    std::size_t first_experience = 0;
    std::size_t second_experience = 0;
};

struct PlantedTitlePair {
    std::string first_paper_id;
    std::string second_paper_id;
    bool high_dominant = false;
    double first_younger_profile = 0.0;
    double first_older_profile = 0.0;
};

struct GroundTruth {
    std::uint64_t seed = 0;
    SynthConfig config;
    std::vector<PlantedBody> bodies;
    std::vector<PlantedFight> fights;
    std::vector<PlantedTitlePair> title_pairs;
};

struct SynthCorpus {
    std::vector<Paper> papers;
    GroundTruth truth;
};

/// Deterministic for a given config.
SynthCorpus generate(const SynthConfig& config);

std::string ground_truth_json(const GroundTruth& truth);

/// Writes manifest.jsonl and ground_truth.json into `dir` (created if missing).
void write_synth(const SynthCorpus& synth, const std::string& dir);

/// Random timeline for oracle comparisons: 1-4 names, regime shifts, repeated authors and
/// shared tie groups.
Timeline random_timeline(Rng& rng, std::size_t m, std::size_t names);

/// One fresh author per occurrence. Before `t_star` each occurrence uses "\old" with
/// probability `p_major` (otherwise "\new"); afterwards the probabilities swap.
Timeline crossover_timeline(Rng& rng, std::size_t m, double t_star, double p_major = 0.85);

}  // namespace macroconv
