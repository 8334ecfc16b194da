#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kds {

/// Flat key = value configuration. A `[section]` header prefixes the keys that
/// follow with "section.". Lines starting with '#' or ';' are comments.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config load(const std::string& path);

    /// Later values win.
    void set(const std::string& key, const std::string& value);
    void merge(const Config& other);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    /// Comma-separated list of numbers.
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    /// Throws ConfigError naming the first key outside `allowed`.
    void require_known(const std::set<std::string>& allowed) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    /// "key=value" lines in key order.
    std::vector<std::string> echo() const;

private:
    std::map<std::string, std::string> values_;
};

/// Shortest decimal form that parses back to the same double.
std::string fmt(double v);

}  // namespace kds
