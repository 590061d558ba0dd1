#pragma once

#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tlrsom/receptors.hpp"
#include "tlrsom/session.hpp"
#include "tlrsom/text.hpp"

namespace tlrsom {

namespace detail {

enum class StraceLineKind { syscall, skip, garbage };

inline bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

inline bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

inline StraceLineKind classify_strace_line(std::string_view line, std::string& name_out) {
    std::string_view s = line;
    while (!s.empty() && text::is_space(s.front())) s.remove_prefix(1);
    if (s.empty()) return StraceLineKind::skip;
    // strace -f prefixes: "[pid 1234] " or a bare pid column.
    if (s.starts_with("[pid")) {
        auto close = s.find(']');
        if (close == std::string_view::npos) return StraceLineKind::garbage;
        s.remove_prefix(close + 1);
        while (!s.empty() && text::is_space(s.front())) s.remove_prefix(1);
    } else if (s.front() >= '0' && s.front() <= '9') {
        std::size_t i = 0;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
        if (i >= s.size() || !text::is_space(s[i])) return StraceLineKind::garbage;
        s.remove_prefix(i);
        while (!s.empty() && text::is_space(s.front())) s.remove_prefix(1);
    }
    if (s.empty()) return StraceLineKind::garbage;
    if (s.starts_with("<...")) return StraceLineKind::skip;   // resumed call
    if (s.starts_with("---")) return StraceLineKind::skip;    // signal delivery
    if (s.starts_with("+++")) return StraceLineKind::skip;    // process exit/kill
    if (!is_ident_start(s.front())) return StraceLineKind::garbage;
    std::size_t i = 0;
    while (i < s.size() && is_ident_char(s[i])) ++i;
    if (i >= s.size() || s[i] != '(') return StraceLineKind::garbage;
    name_out.assign(s.substr(0, i));
    return StraceLineKind::syscall;
}

} // namespace detail

// Extracts the syscall name from one strace output line: the identifier
// before the first '('. Resumption, signal and exit markers as well as
// anything that does not look like a call yield nothing.
inline std::optional<std::string> parse_strace_line(std::string_view line) {
    std::string name;
    if (detail::classify_strace_line(line, name) == detail::StraceLineKind::syscall)
        return name;
    return std::nullopt;
}

struct StraceWindows {
    std::vector<std::set<std::string>> windows;
    IngestStats stats;
};

// Groups a raw strace stream into consecutive time frames of
// `calls_per_window` system calls each. Window boundaries count every
// observed call; the resulting PAMP sets keep only registry names.
inline StraceWindows window_strace(std::istream& in, std::size_t calls_per_window,
                                   const ReceptorRegistry& registry) {
    if (calls_per_window == 0)
        throw ValidationError("calls_per_window must be positive");
    StraceWindows out;
    std::string line;
    std::string name;
    std::size_t call_index = 0;
    while (std::getline(in, line)) {
        switch (detail::classify_strace_line(line, name)) {
            case detail::StraceLineKind::skip:
                break;
            case detail::StraceLineKind::garbage:
                ++out.stats.parse_errors;
                break;
            case detail::StraceLineKind::syscall: {
                ++out.stats.syscalls_seen;
                std::size_t window = call_index / calls_per_window;
                if (window >= out.windows.size()) out.windows.resize(window + 1);
                if (registry.knows(name))
                    out.windows[window].insert(name);
                else
                    ++out.stats.syscalls_unrecognized;
                ++call_index;
                break;
            }
        }
    }
    out.stats.windows_read = out.windows.size();
    return out;
}

// Deals strace-derived PAMP frames onto an existing session's windows in
// rotation: frame i lands on window i mod window-count.
inline IngestStats attach_strace(Session& session, std::istream& in, std::size_t calls_per_window,
                                 const ReceptorRegistry& registry) {
    if (session.windows.empty())
        throw ValidationError("cannot attach strace frames to an empty session");
    StraceWindows frames = window_strace(in, calls_per_window, registry);
    for (std::size_t i = 0; i < frames.windows.size(); ++i) {
        auto& target = session.windows[i % session.windows.size()];
        target.pamps.insert(frames.windows[i].begin(), frames.windows[i].end());
    }
    frames.stats.windows_read = session.windows.size();
    return frames.stats;
}

} // namespace tlrsom
