#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tlrsom/error.hpp"
#include "tlrsom/text.hpp"

namespace tlrsom {

// A named group of system-call PAMPs with a consequence factor used when
// computing per-session risk.
struct ReceptorClass {
    std::string id;
    std::set<std::string> pamps;
    double threat_weight = 1.0;
    std::string description;

    bool operator==(const ReceptorClass&) const = default;
};

// Immutable set of receptor classes. The universe is the union of all class
// PAMP sets; every syscall name outside it is invisible to the model.
class ReceptorRegistry {
public:
    ReceptorRegistry() = default;

    explicit ReceptorRegistry(std::vector<ReceptorClass> classes) : classes_(std::move(classes)) {
        std::set<std::string> ids;
        for (const auto& cls : classes_) {
            if (cls.id.empty()) throw ValidationError("receptor class with empty id");
            if (!ids.insert(cls.id).second)
                throw ValidationError("duplicate receptor id: '" + cls.id + "'");
            if (cls.pamps.empty())
                throw ValidationError("receptor '" + cls.id + "' has an empty PAMP set");
            if (!(cls.threat_weight >= 0.0) || !std::isfinite(cls.threat_weight))
                throw ValidationError("receptor '" + cls.id + "' has an invalid threat weight");
            universe_.insert(cls.pamps.begin(), cls.pamps.end());
        }
    }

    const std::vector<ReceptorClass>& classes() const { return classes_; }
    const std::set<std::string>& universe() const { return universe_; }

    bool knows(std::string_view pamp) const {
        return universe_.find(std::string(pamp)) != universe_.end();
    }

    bool operator==(const ReceptorRegistry&) const = default;

private:
    std::vector<ReceptorClass> classes_;
    std::set<std::string> universe_;
};

// Single-class registry over the 23 threat-level-1 system calls (those
// usable to gain full control of a system), bound as one receptor.
inline ReceptorRegistry default_registry() {
    ReceptorClass level1;
    level1.id = "TLR-L1";
    level1.threat_weight = 1.0;
    level1.description = "threat level 1 system calls";
    level1.pamps = {
        "open",      "link",      "unlink",    "chmod",     "lchown",
        "rename",    "fchown",    "chown",     "mknod",     "mount",
        "symlink",   "fchmod",    "execve",    "setgid",    "setreuid",
        "setregid",  "setgroups", "setfsuid",  "setfsgid",  "setresuid",
        "setresgid", "setuid",    "init_module",
    };
    return ReceptorRegistry({std::move(level1)});
}

// Registry file format: one `receptor <id> <threat_weight> [description]`
// line per class, followed by its syscall names on indented lines.
// Blank lines and lines starting with '#' are skipped.
inline ReceptorRegistry parse_registry(std::istream& in, const std::string& source) {
    std::vector<ReceptorClass> classes;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        std::string_view trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        bool indented = text::is_space(line.front());
        if (!indented) {
            auto tokens = text::split_ws(trimmed);
            if (tokens.size() < 3 || tokens[0] != "receptor")
                throw ValidationError(where + ": expected 'receptor <id> <threat_weight>'");
            ReceptorClass cls;
            cls.id = std::string(tokens[1]);
            cls.threat_weight = text::parse_double(tokens[2], where);
            for (std::size_t i = 3; i < tokens.size(); ++i) {
                if (!cls.description.empty()) cls.description += ' ';
                cls.description += std::string(tokens[i]);
            }
            classes.push_back(std::move(cls));
        } else {
            if (classes.empty())
                throw ValidationError(where + ": syscall name before any receptor line");
            auto tokens = text::split_ws(trimmed);
            if (tokens.size() != 1)
                throw ValidationError(where + ": expected a single syscall name");
            classes.back().pamps.insert(std::string(tokens[0]));
        }
    }
    if (classes.empty()) throw ValidationError(source + ": no receptor classes defined");
    return ReceptorRegistry(std::move(classes));
}

inline ReceptorRegistry load_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open registry file: " + path.string());
    return parse_registry(in, path.string());
}

// Per-node receptor state. A PAMP counts as triggered once it has been
// presented to this node during training; the spec of the count beyond
// zero/non-zero is retained only for persistence. Flags never reset.
class TlrTable {
public:
    TlrTable() = default;

    explicit TlrTable(const ReceptorRegistry& registry) {
        for (const auto& name : registry.universe()) counts_.emplace(name, 0);
    }

    TlrTable(const ReceptorRegistry& registry, const std::map<std::string, std::uint64_t>& counts)
        : TlrTable(registry) {
        for (const auto& [name, count] : counts) {
            auto it = counts_.find(name);
            if (it == counts_.end()) throw ValidationError("unknown PAMP in trigger counts: '" + name + "'");
            it->second = count;
        }
    }

    // Marks every presented PAMP as triggered. A set containing any name
    // outside the universe leaves the table untouched and throws.
    void trigger(const std::set<std::string>& pamps) {
        for (const auto& p : pamps) require_known(p);
        for (const auto& p : pamps) ++counts_.at(p);
    }

    // The presented PAMPs that were never triggered here.
    std::set<std::string> novel(const std::set<std::string>& pamps) const {
        std::set<std::string> out;
        for (const auto& p : pamps) {
            auto it = counts_.find(p);
            if (it == counts_.end()) throw ValidationError("unknown PAMP: '" + p + "'");
            if (it->second == 0) out.insert(p);
        }
        return out;
    }

    bool is_triggered(const std::string& pamp) const {
        auto it = counts_.find(pamp);
        if (it == counts_.end()) throw ValidationError("unknown PAMP: '" + pamp + "'");
        return it->second > 0;
    }

    std::set<std::string> triggered_set() const {
        std::set<std::string> out;
        for (const auto& [name, count] : counts_)
            if (count > 0) out.insert(name);
        return out;
    }

    std::size_t universe_size() const { return counts_.size(); }

    const std::map<std::string, std::uint64_t>& trigger_counts() const { return counts_; }

    bool operator==(const TlrTable&) const = default;

private:
    void require_known(const std::string& pamp) const {
        if (counts_.find(pamp) == counts_.end())
            throw ValidationError("unknown PAMP: '" + pamp + "'");
    }

    std::map<std::string, std::uint64_t> counts_;
};

} // namespace tlrsom
