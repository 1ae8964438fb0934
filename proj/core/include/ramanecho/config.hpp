#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ramanecho/params.hpp"

namespace ramanecho {

// Flat `key = value` configuration. Later assignments win; `#` starts a comment.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    // "key=value"
    void set_assignment(const std::string& assignment);
    void merge(const Config& over);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> raw(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    std::vector<std::string> unknown_keys(const std::set<std::string>& allowed) const;

private:
    std::map<std::string, std::string> values_;
};

std::set<std::string> physical_param_keys();
std::set<std::string> broadening_keys();

// `beta` alone (without `optical_depth`) back-fills the depth; otherwise depth is authoritative.
PhysicalParams load_params(const Config& c, const BroadeningSpec& b);
BroadeningSpec load_broadening(const Config& c);

// Writes every resolved field as `key = value` lines (17 significant digits).
std::vector<std::pair<std::string, std::string>> describe(const PhysicalParams& p);
std::vector<std::pair<std::string, std::string>> describe(const BroadeningSpec& b);

std::string format_double(double v);

}  // namespace ramanecho
