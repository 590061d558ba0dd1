#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tlrsom/error.hpp"
#include "tlrsom/receptors.hpp"
#include "tlrsom/som.hpp"
#include "tlrsom/text.hpp"

namespace tlrsom {

inline constexpr std::string_view kModelMagic = "tlrsom-model v1";

// Self-describing text model: config, receptor classes, then node weights in
// row-major order together with each node's triggered PAMPs and their
// training trigger counts. Doubles use shortest round-trip form, so a
// save/load cycle reproduces the map exactly.
inline std::string save_model(const SomMap& map) {
    std::string out;
    out += kModelMagic;
    out += '\n';
    const auto& cfg = map.config();
    out += "map_side " + std::to_string(cfg.map_side) + '\n';
    out += "iterations " + std::to_string(cfg.iterations) + '\n';
    out += "initial_learning_rate " + text::format_double(cfg.initial_learning_rate) + '\n';
    out += "neighbourhood " + std::string(to_string(cfg.neighbourhood)) + '\n';
    out += "initial_radius " + text::format_double(cfg.initial_radius) + '\n';
    out += "dimensions " + std::to_string(cfg.dimensions) + '\n';
    out += "rng_seed " + std::to_string(cfg.rng_seed) + '\n';
    out += std::string("trained ") + (map.trained() ? "1" : "0") + '\n';
    out += "receptors " + std::to_string(map.registry().classes().size()) + '\n';
    for (const auto& cls : map.registry().classes()) {
        out += "receptor " + cls.id + ' ' + text::format_double(cls.threat_weight);
        if (!cls.description.empty()) out += ' ' + cls.description;
        out += '\n';
        for (const auto& pamp : cls.pamps) out += ' ' + pamp + '\n';
    }
    out += "nodes " + std::to_string(map.nodes().size()) + '\n';
    for (const auto& node : map.nodes()) {
        out += "node " + std::to_string(node.row) + ' ' + std::to_string(node.col) + '\n';
        out += " weights";
        for (double w : node.weights) out += ' ' + text::format_double(w);
        out += '\n';
        out += " triggered";
        for (const auto& [name, count] : node.tlr.trigger_counts())
            if (count > 0) out += ' ' + name + ' ' + std::to_string(count);
        out += '\n';
    }
    return out;
}

inline void write_model_file(const std::filesystem::path& path, const SomMap& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path.string());
    out << save_model(map);
    if (!out) throw IoError("write failed: " + path.string());
}

namespace detail {

class ModelReader {
public:
    ModelReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    std::string next_line() {
        std::string line;
        if (!std::getline(in_, line)) throw ValidationError(where() + ": unexpected end of model file");
        ++lineno_;
        return line;
    }

    std::string where() const { return source_ + ":" + std::to_string(lineno_); }

    // `key <value>` line; returns the value part.
    std::string_view expect_key(std::string_view key, const std::string& line) {
        if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != ' ')
            throw ValidationError(where() + ": expected '" + std::string(key) + " ...'");
        return text::trim(std::string_view(line).substr(key.size() + 1));
    }

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    std::istream& in_;
    std::string source_;
    std::size_t lineno_ = 0;
};

} // namespace detail

inline SomMap load_model(std::istream& in, const std::string& source) {
    detail::ModelReader reader(in, source);
    if (reader.next_line() != kModelMagic)
        throw ValidationError(source + ": not a model file (bad magic line)");

    SomConfig cfg;
    std::string line = reader.next_line();
    cfg.map_side = text::parse_uint(reader.expect_key("map_side", line), reader.where());
    line = reader.next_line();
    cfg.iterations = text::parse_uint(reader.expect_key("iterations", line), reader.where());
    line = reader.next_line();
    cfg.initial_learning_rate =
        text::parse_double(reader.expect_key("initial_learning_rate", line), reader.where());
    line = reader.next_line();
    cfg.neighbourhood = parse_neighbourhood(reader.expect_key("neighbourhood", line), reader.where());
    line = reader.next_line();
    cfg.initial_radius = text::parse_double(reader.expect_key("initial_radius", line), reader.where());
    line = reader.next_line();
    cfg.dimensions = text::parse_uint(reader.expect_key("dimensions", line), reader.where());
    line = reader.next_line();
    cfg.rng_seed = text::parse_uint(reader.expect_key("rng_seed", line), reader.where());
    line = reader.next_line();
    bool trained = text::parse_uint(reader.expect_key("trained", line), reader.where()) != 0;

    line = reader.next_line();
    std::size_t n_classes = text::parse_uint(reader.expect_key("receptors", line), reader.where());
    std::vector<ReceptorClass> classes;
    for (std::size_t c = 0; c < n_classes; ++c) {
        line = reader.next_line();
        auto tokens = text::split_ws(reader.expect_key("receptor", line));
        if (tokens.size() < 2)
            throw ValidationError(reader.where() + ": expected 'receptor <id> <threat_weight>'");
        ReceptorClass cls;
        cls.id = std::string(tokens[0]);
        cls.threat_weight = text::parse_double(tokens[1], reader.where());
        for (std::size_t i = 2; i < tokens.size(); ++i) {
            if (!cls.description.empty()) cls.description += ' ';
            cls.description += std::string(tokens[i]);
        }
        while (in_has_indented(reader, line)) {
            auto names = text::split_ws(text::trim(line));
            if (names.size() != 1)
                throw ValidationError(reader.where() + ": expected a single syscall name");
            cls.pamps.insert(std::string(names[0]));
        }
        pushback_ = line;  // first non-indented line after the block
        classes.push_back(std::move(cls));
    }
    ReceptorRegistry registry(std::move(classes));

    std::size_t n_nodes = text::parse_uint(reader.expect_key("nodes", take_line(reader)), reader.where());
    std::vector<SomNode> nodes;
    nodes.reserve(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        line = take_line(reader);
        auto coords = text::split_ws(reader.expect_key("node", line));
        if (coords.size() != 2) throw ValidationError(reader.where() + ": expected 'node <row> <col>'");
        SomNode node;
        node.row = text::parse_uint(coords[0], reader.where());
        node.col = text::parse_uint(coords[1], reader.where());
        line = take_line(reader);
        for (auto tok : text::split_ws(reader.expect_key("weights", std::string(text::trim(line)))))
            node.weights.push_back(text::parse_double(tok, reader.where()));
        line = take_line(reader);
        auto trimmed = text::trim(line);
        if (!trimmed.starts_with("triggered"))
            throw ValidationError(reader.where() + ": expected 'triggered ...'");
        auto pairs = text::split_ws(trimmed.substr(std::string_view("triggered").size()));
        if (pairs.size() % 2 != 0)
            throw ValidationError(reader.where() + ": triggered entries must be name/count pairs");
        std::map<std::string, std::uint64_t> counts;
        for (std::size_t p = 0; p + 1 < pairs.size(); p += 2)
            counts[std::string(pairs[p])] = text::parse_uint(pairs[p + 1], reader.where());
        node.tlr = TlrTable(registry, counts);
        nodes.push_back(std::move(node));
    }
    return SomMap::restore(cfg, std::move(registry), std::move(nodes), trained);
}

inline SomMap read_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path.string());
    return load_model(in, path.string());
}

} // namespace tlrsom
