#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tlrsom/error.hpp"
#include "tlrsom/receptors.hpp"
#include "tlrsom/text.hpp"

namespace tlrsom {

inline constexpr std::size_t kDefaultDimensions = 14;

enum class SessionLabel { normal, attack, unlabeled };

inline std::string_view to_string(SessionLabel label) {
    switch (label) {
        case SessionLabel::normal: return "normal";
        case SessionLabel::attack: return "attack";
        case SessionLabel::unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

inline SessionLabel parse_label(std::string_view token, const std::string& context) {
    if (token == "normal") return SessionLabel::normal;
    if (token == "attack") return SessionLabel::attack;
    if (token == "unlabeled") return SessionLabel::unlabeled;
    throw ValidationError(context + ": unknown session label: '" + std::string(token) + "'");
}

// One monitored time window: fixed-length non-negative process measures plus
// the set of system calls observed while the window was open.
struct InputFeatureVector {
    std::vector<double> features;
    std::set<std::string> pamps;
    std::size_t window_index = 0;

    bool operator==(const InputFeatureVector&) const = default;
};

// An ordered recording of one monitored process run. The label is evaluation
// metadata; training and detection never read it.
struct Session {
    std::string id;
    SessionLabel label = SessionLabel::unlabeled;
    std::vector<InputFeatureVector> windows;

    bool operator==(const Session&) const = default;
};

struct IngestStats {
    std::size_t windows_read = 0;
    std::size_t syscalls_seen = 0;
    std::size_t syscalls_unrecognized = 0;
    std::size_t parse_errors = 0;

    bool operator==(const IngestStats&) const = default;
};

inline void validate_features(const std::vector<double>& features, std::size_t dimensions,
                              const std::string& context) {
    if (features.size() != dimensions)
        throw ValidationError(context + ": expected " + std::to_string(dimensions) +
                              " features, got " + std::to_string(features.size()));
    for (double f : features) {
        if (!std::isfinite(f))
            throw ValidationError(context + ": non-finite feature value");
        if (f < 0.0)
            throw ValidationError(context + ": negative feature value " + text::format_double(f));
    }
}

// Session file format, one session per file:
//   session <id> <label>
//   <f1> ... <fN> | <syscall> <syscall> ...
// Syscall names outside the registry universe are dropped and counted.
inline std::pair<Session, IngestStats> parse_session(std::istream& in, const ReceptorRegistry& registry,
                                                     std::size_t dimensions, const std::string& source) {
    Session session;
    IngestStats stats;
    bool header_seen = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        std::string_view trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        if (!header_seen) {
            auto tokens = text::split_ws(trimmed);
            if (tokens.size() != 3 || tokens[0] != "session")
                throw ValidationError(where + ": expected header 'session <id> <label>'");
            session.id = std::string(tokens[1]);
            session.label = parse_label(tokens[2], where);
            header_seen = true;
            continue;
        }
        auto bar = trimmed.find('|');
        if (bar == std::string_view::npos)
            throw ValidationError(where + ": missing '|' separator between features and syscalls");
        InputFeatureVector window;
        for (auto tok : text::split_ws(trimmed.substr(0, bar)))
            window.features.push_back(text::parse_double(tok, where));
        validate_features(window.features, dimensions, where);
        for (auto tok : text::split_ws(trimmed.substr(bar + 1))) {
            ++stats.syscalls_seen;
            if (registry.knows(tok))
                window.pamps.insert(std::string(tok));
            else
                ++stats.syscalls_unrecognized;
        }
        window.window_index = session.windows.size();
        session.windows.push_back(std::move(window));
        ++stats.windows_read;
    }
    if (!header_seen) throw ValidationError(source + ": missing session header");
    if (session.windows.empty())
        throw ValidationError(source + ": session '" + session.id + "' has no windows");
    return {std::move(session), stats};
}

inline std::pair<Session, IngestStats> parse_session_file(const std::filesystem::path& path,
                                                          const ReceptorRegistry& registry,
                                                          std::size_t dimensions = kDefaultDimensions) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open session file: " + path.string());
    return parse_session(in, registry, dimensions, path.string());
}

inline std::string serialize_session(const Session& session) {
    std::string out;
    out += "session ";
    out += session.id;
    out += ' ';
    out += to_string(session.label);
    out += '\n';
    for (const auto& window : session.windows) {
        bool first = true;
        for (double f : window.features) {
            if (!first) out += ' ';
            out += text::format_double(f);
            first = false;
        }
        out += " |";
        for (const auto& pamp : window.pamps) {
            out += ' ';
            out += pamp;
        }
        out += '\n';
    }
    return out;
}

inline void write_session_file(const std::filesystem::path& path, const Session& session) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write session file: " + path.string());
    out << serialize_session(session);
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace tlrsom
