#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ymh/common.hpp"

namespace ymh {

/// Key-value experiment configuration, parsed from a TOML-compatible
/// text grammar: [section] headers, key = value lines, # comments,
/// quoted strings, numbers, booleans and flat arrays. Keys flatten to
/// "section.key". Flag overrides use the same "section.key=value" form.
class ConfigMap {
public:
    static ConfigMap parse(const std::string& text) {
        ConfigMap cfg;
        cfg.source_ = text;
        std::istringstream is(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const std::string t = strip_comment(line);
            if (t.empty()) continue;
            if (t.front() == '[') {
                const auto close = t.find(']');
                require(close != std::string::npos,
                        "config: unterminated section header at line " +
                            std::to_string(lineno));
                section = trim(t.substr(1, close - 1));
                require(!section.empty(), "config: empty section name at line " +
                                              std::to_string(lineno));
                continue;
            }
            const auto eq = t.find('=');
            require(eq != std::string::npos,
                    "config: expected key = value at line " + std::to_string(lineno));
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            require(!key.empty() && !value.empty(),
                    "config: malformed assignment at line " + std::to_string(lineno));
            cfg.values_[section.empty() ? key : section + "." + key] = value;
        }
        return cfg;
    }

    /// Apply a "section.key=value" override.
    void apply_override(const std::string& spec) {
        const auto eq = spec.find('=');
        require(eq != std::string::npos && eq > 0,
                "override: expected key=value, got '" + spec + "'");
        values_[trim(spec.substr(0, eq))] = trim(spec.substr(eq + 1));
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback = "") const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return unquote(it->second);
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return to_double(it->second, key);
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return to_int(it->second, key);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true") return true;
        if (it->second == "false") return false;
        throw InvalidArgument("config: expected true/false for " + key);
    }

    std::vector<double> get_double_array(const std::string& key,
                                         std::vector<double> fallback = {}) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        for (const auto& item : split_array(it->second, key)) out.push_back(to_double(item, key));
        return out;
    }

    std::vector<std::int64_t> get_int_array(const std::string& key,
                                            std::vector<std::int64_t> fallback = {}) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<std::int64_t> out;
        for (const auto& item : split_array(it->second, key)) out.push_back(to_int(item, key));
        return out;
    }

    std::vector<std::string> get_string_array(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return {};
        std::vector<std::string> out;
        for (const auto& item : split_array(it->second, key)) out.push_back(unquote(item));
        return out;
    }

    /// Canonical flattening, used for provenance echo and hashing.
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
        return out;
    }

    /// FNV-1a hash of the canonical form.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : canonical()) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        return h;
    }

    const std::map<std::string, std::string>& raw() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        std::size_t b = s.find_last_not_of(" \t\r");
        if (a == std::string::npos) return "";
        return s.substr(a, b - a + 1);
    }

    static std::string strip_comment(const std::string& line) {
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) return trim(line.substr(0, i));
        }
        return trim(line);
    }

    static std::string unquote(const std::string& s) {
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
            return s.substr(1, s.size() - 2);
        return s;
    }

    static double to_double(const std::string& s, const std::string& key) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            require(pos == s.size(), "config: trailing characters in number for " + key);
            return v;
        } catch (const InvalidArgument&) {
            throw;
        } catch (...) {
            throw InvalidArgument("config: expected number for " + key + ", got '" + s + "'");
        }
    }

    static std::int64_t to_int(const std::string& s, const std::string& key) {
        try {
            std::size_t pos = 0;
            const std::int64_t v = std::stoll(s, &pos);
            require(pos == s.size(), "config: trailing characters in integer for " + key);
            return v;
        } catch (const InvalidArgument&) {
            throw;
        } catch (...) {
            throw InvalidArgument("config: expected integer for " + key + ", got '" + s + "'");
        }
    }

    static std::vector<std::string> split_array(const std::string& s, const std::string& key) {
        require(s.size() >= 2 && s.front() == '[' && s.back() == ']',
                "config: expected [array] for " + key);
        std::vector<std::string> items;
        std::string current;
        bool quoted = false;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            const char c = s[i];
            if (c == '"') quoted = !quoted;
            if (c == ',' && !quoted) {
                items.push_back(trim(current));
                current.clear();
            } else {
                current += c;
            }
        }
        const std::string last = trim(current);
        if (!last.empty()) items.push_back(last);
        return items;
    }

    std::map<std::string, std::string> values_;
    std::string source_;
};

}  // namespace ymh
