#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tlrsom/error.hpp"
#include "tlrsom/receptors.hpp"
#include "tlrsom/rng.hpp"
#include "tlrsom/session.hpp"
#include "tlrsom/text.hpp"

namespace tlrsom {

enum class NeighbourhoodFunction { squared };

inline std::string_view to_string(NeighbourhoodFunction fn) {
    switch (fn) {
        case NeighbourhoodFunction::squared: return "squared";
    }
    return "squared";
}

inline NeighbourhoodFunction parse_neighbourhood(std::string_view token, const std::string& context) {
    if (token == "squared") return NeighbourhoodFunction::squared;
    throw ValidationError(context + ": unknown neighbourhood function: '" + std::string(token) + "'");
}

// Defaults: 15x15 grid, 4 epochs, learning rate 0.9, squared neighbourhood
// with initial radius of half the side, 14 input dimensions.
struct SomConfig {
    std::size_t map_side = 15;
    std::size_t iterations = 4;
    double initial_learning_rate = 0.9;
    NeighbourhoodFunction neighbourhood = NeighbourhoodFunction::squared;
    double initial_radius = 7.5;
    std::size_t dimensions = kDefaultDimensions;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (map_side == 0) throw ValidationError("map_side must be positive");
        if (iterations == 0) throw ValidationError("iterations must be positive");
        if (!(initial_learning_rate > 0.0) || initial_learning_rate > 1.0)
            throw ValidationError("initial_learning_rate must lie in (0, 1]");
        if (!(initial_radius > 0.0))
            throw ValidationError("initial_radius must be positive");
        if (initial_radius > static_cast<double>(map_side))
            throw ValidationError("initial_radius must not exceed map_side");
        if (dimensions == 0) throw ValidationError("dimensions must be positive");
    }

    bool operator==(const SomConfig&) const = default;
};

// Flat key-value file mirroring the SomConfig fields.
inline SomConfig parse_som_config(std::istream& in, const std::string& source) {
    SomConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        std::string_view trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        auto tokens = text::split_ws(trimmed);
        if (tokens.size() != 2)
            throw ValidationError(where + ": expected 'key value'");
        std::string_view key = tokens[0];
        std::string_view value = tokens[1];
        if (key == "map_side") cfg.map_side = text::parse_uint(value, where);
        else if (key == "iterations") cfg.iterations = text::parse_uint(value, where);
        else if (key == "initial_learning_rate") cfg.initial_learning_rate = text::parse_double(value, where);
        else if (key == "neighbourhood") cfg.neighbourhood = parse_neighbourhood(value, where);
        else if (key == "initial_radius") cfg.initial_radius = text::parse_double(value, where);
        else if (key == "dimensions") cfg.dimensions = text::parse_uint(value, where);
        else if (key == "rng_seed") cfg.rng_seed = text::parse_uint(value, where);
        else throw ValidationError(where + ": unknown key '" + std::string(key) + "'");
    }
    cfg.validate();
    return cfg;
}

inline SomConfig load_som_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open SOM config: " + path.string());
    return parse_som_config(in, path.string());
}

namespace detail {

inline void validate_similarity_input(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ValidationError("vector length mismatch: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    if (a.empty()) throw ValidationError("similarity of empty vectors is undefined");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
            throw ValidationError("non-finite value in similarity input");
        if (a[i] < 0.0 || b[i] < 0.0)
            throw ValidationError("negative value in similarity input");
    }
}

// Mean over dimensions of min/max as a percentage. Equal components score
// 100 (including 0/0); the result is exactly 100 only for identical vectors.
inline double percent_similarity_unchecked(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) {
            sum += 100.0;
        } else {
            identical = false;
            double lo = std::min(a[i], b[i]);
            double hi = std::max(a[i], b[i]);
            sum += (lo / hi) * 100.0;
        }
    }
    double mean = sum / static_cast<double>(a.size());
    if (!identical && mean >= 100.0) mean = std::nextafter(100.0, 0.0);
    return mean;
}

} // namespace detail

// BMU % similarity between a node weight vector and an input feature vector.
inline double percent_similarity(std::span<const double> a, std::span<const double> b) {
    detail::validate_similarity_input(a, b);
    return detail::percent_similarity_unchecked(a, b);
}

inline double percent_distance(std::span<const double> a, std::span<const double> b) {
    return 100.0 - percent_similarity(a, b);
}

struct SomNode {
    std::size_t row = 0;
    std::size_t col = 0;
    std::vector<double> weights;
    TlrTable tlr;

    bool operator==(const SomNode&) const = default;
};

struct BmuMatch {
    std::size_t row = 0;
    std::size_t col = 0;
    double similarity = 0.0;
};

// Value applied at step `step` of `total` under linear decay from `initial`.
inline double linear_decay(double initial, std::size_t step, std::size_t total) {
    return initial * (1.0 - static_cast<double>(step) / static_cast<double>(total));
}

// Square grid of nodes, each carrying a weight vector and a TLR table.
// Training mutates the map once; a trained map is frozen and safe to share
// across concurrent readers.
class SomMap {
public:
    SomMap() = default;

    // Weights start uniformly random inside the per-dimension range of the
    // training windows; dimensions with a constant value collapse to it.
    static SomMap init(SomConfig config, const ReceptorRegistry& registry,
                       std::span<const InputFeatureVector> training_windows) {
        config.validate();
        if (training_windows.empty())
            throw ValidationError("map initialization requires at least one training window");
        validate_windows(training_windows, config.dimensions, registry);

        std::vector<double> lo(config.dimensions, std::numeric_limits<double>::infinity());
        std::vector<double> hi(config.dimensions, -std::numeric_limits<double>::infinity());
        for (const auto& window : training_windows) {
            for (std::size_t d = 0; d < config.dimensions; ++d) {
                lo[d] = std::min(lo[d], window.features[d]);
                hi[d] = std::max(hi[d], window.features[d]);
            }
        }

        SomMap map;
        map.config_ = config;
        map.registry_ = registry;
        map.nodes_.reserve(config.map_side * config.map_side);
        std::mt19937_64 eng(config.rng_seed);
        TlrTable fresh(registry);
        for (std::size_t row = 0; row < config.map_side; ++row) {
            for (std::size_t col = 0; col < config.map_side; ++col) {
                SomNode node;
                node.row = row;
                node.col = col;
                node.weights.resize(config.dimensions);
                for (std::size_t d = 0; d < config.dimensions; ++d)
                    node.weights[d] = rng::uniform(eng, lo[d], hi[d]);
                node.tlr = fresh;
                map.nodes_.push_back(std::move(node));
            }
        }
        return map;
    }

    // Reassembles a map from persisted parts, re-checking the invariants.
    static SomMap restore(SomConfig config, ReceptorRegistry registry, std::vector<SomNode> nodes,
                          bool trained) {
        config.validate();
        if (nodes.size() != config.map_side * config.map_side)
            throw ValidationError("node count does not match map_side");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& node = nodes[i];
            if (node.row != i / config.map_side || node.col != i % config.map_side)
                throw ValidationError("node grid coordinates out of row-major order");
            if (node.weights.size() != config.dimensions)
                throw ValidationError("node weight count does not match dimensions");
            for (double w : node.weights)
                if (!std::isfinite(w) || w < 0.0)
                    throw ValidationError("node weight must be finite and non-negative");
            if (node.tlr.universe_size() != registry.universe().size())
                throw ValidationError("node TLR table does not cover the registry universe");
        }
        SomMap map;
        map.config_ = std::move(config);
        map.registry_ = std::move(registry);
        map.nodes_ = std::move(nodes);
        map.trained_ = trained;
        return map;
    }

    const SomConfig& config() const { return config_; }
    const ReceptorRegistry& registry() const { return registry_; }
    const std::vector<SomNode>& nodes() const { return nodes_; }
    bool trained() const { return trained_; }

    const SomNode& node_at(std::size_t row, std::size_t col) const {
        if (row >= config_.map_side || col >= config_.map_side)
            throw ValidationError("node coordinates out of range");
        return nodes_[row * config_.map_side + col];
    }

    // Node with the highest % similarity; ties go to the earliest node in
    // row-major order.
    BmuMatch find_bmu(std::span<const double> features) const {
        if (nodes_.empty()) throw ValidationError("map is not initialized");
        if (features.size() != config_.dimensions)
            throw ValidationError("feature count does not match map dimensions: expected " +
                                  std::to_string(config_.dimensions) + ", got " +
                                  std::to_string(features.size()));
        detail::validate_similarity_input(nodes_.front().weights, features);
        return find_bmu_unchecked(features);
    }

    BmuMatch find_bmu(const InputFeatureVector& window) const { return find_bmu(window.features); }

    // Standard SOM fit over `iterations` epochs with the winning node's TLR
    // table triggered per presented window. Learning rate and radius decay
    // linearly over the total step count. Once the weights are frozen, a
    // final pass re-triggers the settled BMU of every training window, so
    // the training set itself exhibits zero novelty afterwards.
    void train(std::span<const InputFeatureVector> windows) {
        if (trained_) throw ValidationError("map is already trained");
        if (windows.empty()) throw ValidationError("training requires at least one window");
        validate_windows(windows, config_.dimensions, registry_);

        const std::size_t total_steps = config_.iterations * windows.size();
        std::size_t step = 0;
        const auto side = static_cast<std::ptrdiff_t>(config_.map_side);
        for (std::size_t epoch = 0; epoch < config_.iterations; ++epoch) {
            for (const auto& window : windows) {
                const double alpha = linear_decay(config_.initial_learning_rate, step, total_steps);
                const double radius = linear_decay(config_.initial_radius, step, total_steps);
                const double radius_sq = radius * radius;
                const BmuMatch bmu = find_bmu_unchecked(window.features);
                for (std::ptrdiff_t row = 0; row < side; ++row) {
                    const std::ptrdiff_t dr = row - static_cast<std::ptrdiff_t>(bmu.row);
                    for (std::ptrdiff_t col = 0; col < side; ++col) {
                        const std::ptrdiff_t dc = col - static_cast<std::ptrdiff_t>(bmu.col);
                        if (static_cast<double>(dr * dr + dc * dc) > radius_sq) continue;
                        auto& weights = nodes_[static_cast<std::size_t>(row * side + col)].weights;
                        for (std::size_t d = 0; d < config_.dimensions; ++d) {
                            weights[d] += alpha * (window.features[d] - weights[d]);
                            if (weights[d] < 0.0) weights[d] = 0.0;
                        }
                    }
                }
                node_mutable(bmu).tlr.trigger(window.pamps);
                ++step;
            }
        }
        for (const auto& window : windows)
            node_mutable(find_bmu_unchecked(window.features)).tlr.trigger(window.pamps);
        trained_ = true;
    }

    bool operator==(const SomMap&) const = default;

private:
    static void validate_windows(std::span<const InputFeatureVector> windows, std::size_t dimensions,
                                 const ReceptorRegistry& registry) {
        for (const auto& window : windows) {
            validate_features(window.features, dimensions,
                              "window " + std::to_string(window.window_index));
            for (const auto& pamp : window.pamps)
                if (!registry.knows(pamp))
                    throw ValidationError("window " + std::to_string(window.window_index) +
                                          ": unknown PAMP: '" + pamp + "'");
        }
    }

    BmuMatch find_bmu_unchecked(std::span<const double> features) const {
        BmuMatch best{0, 0, -1.0};
        for (const auto& node : nodes_) {
            double similarity = detail::percent_similarity_unchecked(node.weights, features);
            if (similarity > best.similarity) best = {node.row, node.col, similarity};
        }
        return best;
    }

    SomNode& node_mutable(const BmuMatch& bmu) {
        return nodes_[bmu.row * config_.map_side + bmu.col];
    }

    SomConfig config_;
    ReceptorRegistry registry_;
    std::vector<SomNode> nodes_;
    bool trained_ = false;
};

} // namespace tlrsom
