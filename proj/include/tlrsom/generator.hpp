#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tlrsom/error.hpp"
#include "tlrsom/receptors.hpp"
#include "tlrsom/rng.hpp"
#include "tlrsom/session.hpp"
#include "tlrsom/text.hpp"

namespace tlrsom {

// Synthetic stand-in for a monitored-process corpus: normal sessions sample
// feature clusters and a fixed syscall vocabulary; attack sessions reuse the
// same clusters but scale a subset of features and inject extra syscalls.
struct GeneratorConfig {
    std::size_t normal_sessions = 12;
    std::size_t attack_sessions = 5;
    std::size_t windows_per_session = 100;
    std::size_t dimensions = kDefaultDimensions;
    std::size_t cluster_count = 3;
    double feature_mean_low = 10.0;
    double feature_mean_high = 100.0;
    // Relative half-width of the uniform noise around a cluster mean.
    double feature_spread = 0.08;
    std::set<std::string> normal_pamps = {"open",  "link",    "unlink", "chmod",
                                          "rename", "mount",  "symlink", "fchmod"};
    double normal_pamp_rate = 0.35;
    std::set<std::string> attack_pamps = {"execve", "setuid", "chown"};
    double attack_pamp_rate = 0.8;
    // Multiplicative shift applied to attack_shift_dims in attack windows.
    double attack_shift = 0.5;
    std::vector<std::size_t> attack_shift_dims = {0, 1, 2, 3};
    bool require_disjoint = true;
};

namespace detail {

inline std::set<std::string> parse_name_list(std::string_view value) {
    std::set<std::string> out;
    for (auto item : text::split(value, ',')) {
        auto name = text::trim(item);
        if (!name.empty()) out.insert(std::string(name));
    }
    return out;
}

inline std::string session_number(std::size_t n) {
    std::string digits = std::to_string(n);
    while (digits.size() < 3) digits.insert(digits.begin(), '0');
    return digits;
}

} // namespace detail

// Flat key-value file, one `key value` pair per line; '#' starts a comment.
inline GeneratorConfig parse_generator_config(std::istream& in, const std::string& source) {
    GeneratorConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        std::string_view trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        auto space = trimmed.find_first_of(" \t");
        if (space == std::string_view::npos)
            throw ValidationError(where + ": expected 'key value'");
        std::string_view key = trimmed.substr(0, space);
        std::string_view value = text::trim(trimmed.substr(space + 1));
        if (key == "normal_sessions") cfg.normal_sessions = text::parse_uint(value, where);
        else if (key == "attack_sessions") cfg.attack_sessions = text::parse_uint(value, where);
        else if (key == "windows_per_session") cfg.windows_per_session = text::parse_uint(value, where);
        else if (key == "dimensions") cfg.dimensions = text::parse_uint(value, where);
        else if (key == "cluster_count") cfg.cluster_count = text::parse_uint(value, where);
        else if (key == "feature_mean_low") cfg.feature_mean_low = text::parse_double(value, where);
        else if (key == "feature_mean_high") cfg.feature_mean_high = text::parse_double(value, where);
        else if (key == "feature_spread") cfg.feature_spread = text::parse_double(value, where);
        else if (key == "normal_pamps") cfg.normal_pamps = detail::parse_name_list(value);
        else if (key == "normal_pamp_rate") cfg.normal_pamp_rate = text::parse_double(value, where);
        else if (key == "attack_pamps") cfg.attack_pamps = detail::parse_name_list(value);
        else if (key == "attack_pamp_rate") cfg.attack_pamp_rate = text::parse_double(value, where);
        else if (key == "attack_shift") cfg.attack_shift = text::parse_double(value, where);
        else if (key == "attack_shift_dims") {
            cfg.attack_shift_dims.clear();
            for (auto item : text::split(value, ',')) {
                auto tok = text::trim(item);
                if (!tok.empty())
                    cfg.attack_shift_dims.push_back(text::parse_uint(tok, where));
            }
        } else if (key == "require_disjoint") cfg.require_disjoint = text::parse_uint(value, where) != 0;
        else throw ValidationError(where + ": unknown key '" + std::string(key) + "'");
    }
    return cfg;
}

inline GeneratorConfig load_generator_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open generator config: " + path.string());
    return parse_generator_config(in, path.string());
}

inline void validate_generator_config(const GeneratorConfig& cfg, const ReceptorRegistry& registry) {
    if (cfg.windows_per_session == 0) throw ValidationError("windows_per_session must be positive");
    if (cfg.dimensions == 0) throw ValidationError("dimensions must be positive");
    if (cfg.cluster_count == 0) throw ValidationError("cluster_count must be positive");
    if (!(cfg.feature_mean_low >= 0.0) || !(cfg.feature_mean_high >= cfg.feature_mean_low))
        throw ValidationError("feature mean range must satisfy 0 <= low <= high");
    if (!(cfg.feature_spread >= 0.0) || cfg.feature_spread >= 1.0)
        throw ValidationError("feature_spread must lie in [0, 1)");
    if (cfg.normal_pamp_rate < 0.0 || cfg.normal_pamp_rate > 1.0)
        throw ValidationError("normal_pamp_rate must lie in [0, 1]");
    if (cfg.attack_pamp_rate < 0.0 || cfg.attack_pamp_rate > 1.0)
        throw ValidationError("attack_pamp_rate must lie in [0, 1]");
    if (cfg.attack_shift < 0.0)
        throw ValidationError("attack_shift must be non-negative");
    for (const auto& p : cfg.normal_pamps)
        if (!registry.knows(p))
            throw ValidationError("normal PAMP '" + p + "' is outside the registry universe");
    for (const auto& p : cfg.attack_pamps)
        if (!registry.knows(p))
            throw ValidationError("attack PAMP '" + p + "' is outside the registry universe");
    for (std::size_t dim : cfg.attack_shift_dims)
        if (dim >= cfg.dimensions)
            throw ValidationError("attack_shift_dims entry " + std::to_string(dim) +
                                  " exceeds dimensions " + std::to_string(cfg.dimensions));
    if (cfg.require_disjoint) {
        for (const auto& p : cfg.attack_pamps)
            if (cfg.normal_pamps.count(p) > 0)
                throw ValidationError("attack PAMP '" + p +
                                      "' also appears in the normal vocabulary (disjointness requested)");
    }
}

// Deterministic for a fixed (config, seed): cluster means come from stream 0,
// session i from stream i+1, so each session's content is independent of the
// others. Draw order within a window: cluster pick, features by dimension,
// vocabulary PAMPs in name order, then (attack only) injected PAMPs.
inline std::vector<Session> generate_synthetic_sessions(const GeneratorConfig& cfg, std::uint64_t seed,
                                                        const ReceptorRegistry& registry) {
    validate_generator_config(cfg, registry);

    std::mt19937_64 cluster_eng(rng::derive_seed(seed, 0));
    std::vector<std::vector<double>> cluster_means(cfg.cluster_count,
                                                   std::vector<double>(cfg.dimensions));
    for (auto& mean : cluster_means)
        for (auto& value : mean)
            value = rng::uniform(cluster_eng, cfg.feature_mean_low, cfg.feature_mean_high);

    std::vector<Session> sessions;
    const std::size_t total = cfg.normal_sessions + cfg.attack_sessions;
    sessions.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        const bool attack = i >= cfg.normal_sessions;
        Session session;
        session.label = attack ? SessionLabel::attack : SessionLabel::normal;
        session.id = (attack ? "a" : "n") +
                     detail::session_number(attack ? i - cfg.normal_sessions + 1 : i + 1);
        std::mt19937_64 eng(rng::derive_seed(seed, i + 1));
        session.windows.reserve(cfg.windows_per_session);
        for (std::size_t w = 0; w < cfg.windows_per_session; ++w) {
            InputFeatureVector window;
            window.window_index = w;
            const auto& mean = cluster_means[rng::uniform_index(eng, cfg.cluster_count)];
            window.features.resize(cfg.dimensions);
            for (std::size_t d = 0; d < cfg.dimensions; ++d) {
                double value = mean[d] * (1.0 + cfg.feature_spread * rng::uniform_pm1(eng));
                window.features[d] = std::max(value, 0.0);
            }
            for (const auto& pamp : cfg.normal_pamps)
                if (rng::bernoulli(eng, cfg.normal_pamp_rate)) window.pamps.insert(pamp);
            if (attack) {
                for (std::size_t d : cfg.attack_shift_dims)
                    window.features[d] *= 1.0 + cfg.attack_shift;
                for (const auto& pamp : cfg.attack_pamps)
                    if (rng::bernoulli(eng, cfg.attack_pamp_rate)) window.pamps.insert(pamp);
            }
            session.windows.push_back(std::move(window));
        }
        sessions.push_back(std::move(session));
    }
    return sessions;
}

} // namespace tlrsom
