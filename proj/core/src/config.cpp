#include "ramanecho/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ramanecho/errors.hpp"

namespace ramanecho {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// field name -> member pointer; keeps the key list and the loader in one place
const std::vector<std::pair<const char*, double PhysicalParams::*>>& param_fields() {
    static const std::vector<std::pair<const char*, double PhysicalParams::*>> f = {
        {"omega1_rabi", &PhysicalParams::omega1_rabi},
        {"omega2_rabi", &PhysicalParams::omega2_rabi},
        {"delta01", &PhysicalParams::delta01},
        {"delta02", &PhysicalParams::delta02},
        {"gamma21", &PhysicalParams::gamma21},
        {"gamma31", &PhysicalParams::gamma31},
        {"beta", &PhysicalParams::beta},
        {"eta", &PhysicalParams::eta},
        {"eta_prime", &PhysicalParams::eta_prime},
        {"k_off", &PhysicalParams::k_off},
        {"k_on", &PhysicalParams::k_on},
        {"tau0", &PhysicalParams::tau0},
        {"tau_echo", &PhysicalParams::tau_echo},
        {"tau_st", &PhysicalParams::tau_st},
        {"medium_length", &PhysicalParams::medium_length},
        {"optical_depth", &PhysicalParams::optical_depth},
    };
    return f;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        c.values_[key] = val;
    }
    return c;
}

Config Config::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) { values_[trim(key)] = trim(value); }

void Config::set_assignment(const std::string& a) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got `" + a + "`");
    set(a.substr(0, eq), a.substr(eq + 1));
}

void Config::merge(const Config& over) {
    for (const auto& [k, v] : over.values_) values_[k] = v;
}

std::optional<std::string> Config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto r = raw(key);
    if (!r) return fallback;
    const char* s = r->c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || errno == ERANGE)
        throw ConfigError("key `" + key + "`: not a number: `" + *r + "`");
    return v;
}

int Config::get_int(const std::string& key, int fallback) const {
    auto r = raw(key);
    if (!r) return fallback;
    const char* s = r->c_str();
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0') throw ConfigError("key `" + key + "`: not an integer: `" + *r + "`");
    return static_cast<int>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto r = raw(key);
    if (!r) return fallback;
    if (*r == "true" || *r == "1" || *r == "yes" || *r == "on") return true;
    if (*r == "false" || *r == "0" || *r == "no" || *r == "off") return false;
    throw ConfigError("key `" + key + "`: not a boolean: `" + *r + "`");
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto r = raw(key);
    return r ? *r : fallback;
}

std::vector<std::string> Config::unknown_keys(const std::set<std::string>& allowed) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!allowed.count(k)) out.push_back(k);
    return out;
}

std::set<std::string> physical_param_keys() {
    std::set<std::string> s;
    for (const auto& [name, ptr] : param_fields()) s.insert(name);
    return s;
}

std::set<std::string> broadening_keys() {
    return {"optical_line", "optical_width", "optical_nodes", "optical_truncation",
            "raman_line",   "raman_width",   "raman_nodes",   "raman_truncation",
            "chi1",         "gradient_center"};
}

BroadeningSpec load_broadening(const Config& c) {
    BroadeningSpec b;
    const std::string ol = c.get_string("optical_line", "none");
    const double ow = c.get_double("optical_width", 0.1);
    if (ol == "none") b.optical = NoLine{};
    else if (ol == "gaussian") b.optical = GaussianLine{ow};
    else if (ol == "lorentzian") b.optical = LorentzianLine{ow};
    else throw ConfigError("key `optical_line`: expected none|gaussian|lorentzian, got `" + ol + "`");

    const std::string rl = c.get_string("raman_line", "gaussian");
    const double rw = c.get_double("raman_width", 1.0);
    if (rl == "gaussian") b.raman = GaussianLine{rw};
    else if (rl == "lorentzian") b.raman = LorentzianLine{rw};
    else if (rl == "gradient")
        b.raman = LongitudinalGradient{c.get_double("chi1", 1.0), c.get_double("gradient_center", 0.5)};
    else throw ConfigError("key `raman_line`: expected gaussian|lorentzian|gradient, got `" + rl + "`");

    b.optical_quadrature.nodes = c.get_int("optical_nodes", std::holds_alternative<NoLine>(b.optical) ? 1 : 16);
    b.optical_quadrature.truncation = c.get_double("optical_truncation", 0.0);
    b.raman_quadrature.nodes = c.get_int("raman_nodes", 64);
    b.raman_quadrature.truncation = c.get_double("raman_truncation", 0.0);
    if (b.optical_quadrature.nodes < 1) throw ConfigError("key `optical_nodes`: must be >= 1");
    if (b.raman_quadrature.nodes < 1) throw ConfigError("key `raman_nodes`: must be >= 1");
    if (!(line_width(b.optical) >= 0.0)) throw ConfigError("key `optical_width`: must be >= 0");
    if (!b.is_gradient() && !(line_width(b.raman) > 0.0)) throw ConfigError("key `raman_width`: must be > 0");
    return b;
}

PhysicalParams load_params(const Config& c, const BroadeningSpec& b) {
    PhysicalParams p;
    for (const auto& [name, ptr] : param_fields()) p.*ptr = c.get_double(name, p.*ptr);
    if (!c.has("delta02")) p.delta02 = p.delta01;
    // retrieval coupling follows the scaling condition unless pinned
    if (!c.has("eta_prime")) p.eta_prime = p.eta;
    if (!c.has("omega2_rabi") && p.delta01 != 0.0)
        p.omega2_rabi = std::sqrt(p.eta_prime) * p.omega1_rabi * std::abs(p.delta02 / p.delta01);
    if (c.has("beta") && !c.has("optical_depth")) {
        p.optical_depth = depth_from_beta(p, b);
    } else {
        p.beta = derived_beta(p, b);
    }
    p.validate();
    return p;
}

std::vector<std::pair<std::string, std::string>> describe(const PhysicalParams& p) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, ptr] : param_fields()) out.emplace_back(name, format_double(p.*ptr));
    return out;
}

std::vector<std::pair<std::string, std::string>> describe(const BroadeningSpec& b) {
    std::vector<std::pair<std::string, std::string>> out;
    const char* on = std::holds_alternative<NoLine>(b.optical)         ? "none"
                     : std::holds_alternative<GaussianLine>(b.optical) ? "gaussian"
                                                                       : "lorentzian";
    out.emplace_back("optical_line", on);
    out.emplace_back("optical_width", format_double(line_width(b.optical)));
    out.emplace_back("optical_nodes", std::to_string(b.optical_quadrature.nodes));
    if (const auto* g = std::get_if<LongitudinalGradient>(&b.raman)) {
        out.emplace_back("raman_line", "gradient");
        out.emplace_back("chi1", format_double(g->chi));
        out.emplace_back("gradient_center", format_double(g->z_center));
    } else {
        out.emplace_back("raman_line", std::holds_alternative<GaussianLine>(b.raman) ? "gaussian" : "lorentzian");
        out.emplace_back("raman_width", format_double(line_width(b.raman)));
        out.emplace_back("raman_nodes", std::to_string(b.raman_quadrature.nodes));
        out.emplace_back("raman_truncation", format_double(b.raman_quadrature.truncation > 0
                                                               ? b.raman_quadrature.truncation
                                                               : default_truncation(b.raman)));
    }
    return out;
}

}  // namespace ramanecho
