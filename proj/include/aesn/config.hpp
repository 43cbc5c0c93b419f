#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "aesn/errors.hpp"

namespace aesn {

/**
 * Minimal TOML-style key-value configuration: `[section]` headers,
 * `key = value` lines, `#` comments, optional double quotes around values.
 * Everything is stored as strings; typed getters convert on access.
 */
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file: " + path);
        }
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str(), path);
    }

    static ConfigFile parse_string(const std::string& text, const std::string& source = "<string>") {
        ConfigFile cfg;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string ctx = source + ":" + std::to_string(line_no);
            std::string s = strip_comment(line);
            s = trim(s);
            if (s.empty()) {
                continue;
            }
            if (s.front() == '[') {
                if (s.back() != ']' || s.size() < 3) {
                    throw ConfigError(ctx + ": malformed section header");
                }
                section = trim(s.substr(1, s.size() - 2));
                cfg.sections_[section];
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(ctx + ": expected 'key = value'");
            }
            const std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(ctx + ": empty key");
            }
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
                value = value.substr(1, value.size() - 2);
            }
            cfg.sections_[section][key] = value;
        }
        return cfg;
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto it = sections_.find(section);
        return it != sections_.end() && it->second.count(key) > 0;
    }

    bool has_section(const std::string& section) const {
        return sections_.count(section) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback = "") const {
        const auto it = sections_.find(section);
        if (it == sections_.end()) {
            return fallback;
        }
        const auto kit = it->second.find(key);
        return kit == it->second.end() ? fallback : kit->second;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) {
            return fallback;
        }
        const std::string v = get_string(section, key);
        char* end = nullptr;
        const double d = std::strtod(v.c_str(), &end);
        if (end != v.c_str() + v.size() || v.empty()) {
            throw ConfigError("config [" + section + "] " + key + ": not a number: '" + v + "'");
        }
        return d;
    }

    long get_int(const std::string& section, const std::string& key, long fallback) const {
        if (!has(section, key)) {
            return fallback;
        }
        const std::string v = get_string(section, key);
        char* end = nullptr;
        const long i = std::strtol(v.c_str(), &end, 10);
        if (end != v.c_str() + v.size() || v.empty()) {
            throw ConfigError("config [" + section + "] " + key + ": not an integer: '" + v + "'");
        }
        return i;
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) {
            return fallback;
        }
        const std::string v = get_string(section, key);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw ConfigError("config [" + section + "] " + key + ": not a boolean: '" + v + "'");
    }

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    static std::string strip_comment(const std::string& s) {
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') {
                quoted = !quoted;
            } else if (s[i] == '#' && !quoted) {
                return s.substr(0, i);
            }
        }
        return s;
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            return "";
        }
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace aesn
