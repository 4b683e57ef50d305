#ifndef FFB_CONFIG_HPP
#define FFB_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ffb/common.hpp"

namespace ffb {

// Flat line-oriented `key = value` configuration with `#` comments and
// dotted keys. Parse errors carry line numbers.
class Config {
  public:
    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("config: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        Config c = parse_string(ss.str());
        c.source_path_ = path;
        return c;
    }

    static Config parse_string(const std::string& text) {
        Config c;
        c.raw_text_ = text;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = line;
            auto hash = s.find('#');
            if (hash != std::string::npos) s = s.substr(0, hash);
            s = trim(s);
            if (s.empty()) continue;
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) +
                                   ": expected `key = value`, got: " + line);
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty())
                throw config_error("config line " + std::to_string(lineno) + ": empty key");
            if (c.values_.count(key))
                throw config_error("config line " + std::to_string(lineno) + ": duplicate key `" +
                                   key + "`");
            c.values_[key] = val;
            c.lines_[key] = lineno;
        }
        return c;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& dflt = "") const {
        auto it = values_.find(key);
        return it == values_.end() ? dflt : it->second;
    }

    double get_double(const std::string& key, double dflt) const {
        auto it = values_.find(key);
        if (it == values_.end()) return dflt;
        return to_double(key, it->second);
    }

    int get_int(const std::string& key, int dflt) const {
        auto it = values_.find(key);
        if (it == values_.end()) return dflt;
        try {
            std::size_t pos = 0;
            int v = std::stoi(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            throw config_error("config line " + std::to_string(line_of(key)) + ": key `" + key +
                               "` expects an integer, got `" + it->second + "`");
        }
    }

    std::uint64_t get_seed(const std::string& key, std::uint64_t dflt) const {
        auto it = values_.find(key);
        if (it == values_.end()) return dflt;
        try {
            return std::stoull(it->second);
        } catch (...) {
            throw config_error("config line " + std::to_string(line_of(key)) + ": key `" + key +
                               "` expects an unsigned integer");
        }
    }

    std::vector<double> get_list(const std::string& key, std::vector<double> dflt) const {
        auto it = values_.find(key);
        if (it == values_.end()) return dflt;
        std::vector<double> out;
        std::istringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
        if (out.empty())
            throw config_error("config line " + std::to_string(line_of(key)) + ": empty list");
        return out;
    }

    int line_of(const std::string& key) const {
        auto it = lines_.find(key);
        return it == lines_.end() ? 0 : it->second;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }
    const std::string& raw_text() const { return raw_text_; }
    const std::string& source_path() const { return source_path_; }

    // FNV-1a over the raw text; stable across runs for the manifest.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : raw_text_) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

  private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }
    double to_double(const std::string& key, const std::string& v) const {
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            return d;
        } catch (...) {
            throw config_error("config line " + std::to_string(line_of(key)) + ": key `" + key +
                               "` expects a number, got `" + v + "`");
        }
    }

    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    std::string raw_text_;
    std::string source_path_;
};

// Levenshtein distance for `did you mean` suggestions.
inline std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace ffb

#endif
