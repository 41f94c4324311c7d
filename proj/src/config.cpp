#include "schro/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace schro::config {

namespace {

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"", {"seed", "threads"}},
        {"potential", {"kind", "sign", "alpha", "K", "K1", "K2", "dim", "profile_path"}},
        {"mc", {"n_paths", "n_steps", "quadrature", "antithetic", "step_halving_check",
                "compensated_sum", "t_cap"}},
        {"pde", {"x_range", "n_space", "n_time", "delta_init_width"}},
        {"grid", {"ts", "t_min", "t_max", "n_t", "radii", "estimator"}},
        {"verify", {"band_ceiling", "grid_points", "grid_min", "grid_max", "exclusion_sigma",
                    "containment_sigma", "max_reject_fraction"}},
    };
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += v[i];
    }
    return out;
}

std::string section_label(const std::string& section) {
    return section.empty() ? "the top level" : "[" + section + "]";
}

void check_section(const std::string& section, const std::string& where) {
    if (schema().count(section)) return;
    std::vector<std::string> names;
    for (const auto& [name, keys] : schema())
        if (!name.empty()) names.push_back(name);
    throw ConfigError(where + ": unknown section [" + section +
                      "]; valid sections: " + join(names));
}

void check_key(const std::string& section, const std::string& key, const std::string& where) {
    check_section(section, where);
    const auto& keys = schema().at(section);
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ConfigError(where + ": unknown key '" + key + "' in " + section_label(section) +
                          "; valid keys: " + join(keys));
}

double parse_double(const std::string& section, const std::string& key, const std::string& raw) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(raw, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != raw.size())
        throw ConfigError("config: key '" + key + "' in " + section_label(section) +
                          " is not a number: '" + raw + "'");
    return v;
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = origin + ":" + std::to_string(lineno);
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            check_section(section, where);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        check_key(section, key, where);
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool Config::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(key))
        throw ConfigError("config: missing key '" + key + "' in " + section_label(section));
    return it->second.at(key);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    return parse_double(section, key, get_string(section, key));
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key) const {
    std::string raw = get_string(section, key);
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(raw, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != raw.size())
        throw ConfigError("config: key '" + key + "' in " + section_label(section) +
                          " is not an integer: '" + raw + "'");
    return v;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
    std::string raw = get_string(section, key);
    std::string low;
    for (char c : raw) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "true" || low == "yes" || low == "on" || low == "1") return true;
    if (low == "false" || low == "no" || low == "off" || low == "0") return false;
    throw ConfigError("config: key '" + key + "' in " + section_label(section) +
                      " is not a boolean: '" + raw + "'");
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    return has(section, key) ? get_bool(section, key) : fallback;
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key) const {
    std::string raw = get_string(section, key);
    std::vector<double> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("config: empty element in list '" + key + "' in " +
                              section_label(section));
        out.push_back(parse_double(section, key, item));
    }
    if (out.empty())
        throw ConfigError("config: empty list for key '" + key + "' in " + section_label(section));
    return out;
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     std::vector<double> fallback) const {
    return has(section, key) ? get_list(section, key) : std::move(fallback);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    check_key(section, key, "config");
    sections_[section][key] = value;
}

std::vector<std::pair<double, double>> load_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open profile '" + path + "'");
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected r,value");
        std::string a = trim(line.substr(0, comma));
        std::string b = trim(line.substr(comma + 1));
        try {
            std::size_t ua = 0, ub = 0;
            double r = std::stod(a, &ua), v = std::stod(b, &ub);
            if (ua != a.size() || ub != b.size()) throw std::invalid_argument(a);
            rows.emplace_back(r, v);
        } catch (const std::exception&) {
            if (lineno == 1 && rows.empty()) continue; // header line
            throw ConfigError(path + ":" + std::to_string(lineno) + ": non-numeric row '" +
                              line + "'");
        }
    }
    if (rows.size() < 2) throw ConfigError(path + ": profile needs at least 2 rows");
    return rows;
}

Potential make_potential(const Config& cfg) {
    if (!cfg.has_section("potential"))
        throw ConfigError("config: missing [potential] section");
    std::string kind = cfg.get_string("potential", "kind", "power_decay");
    std::string sign_str = cfg.get_string("potential", "sign", "positive");
    Sign sign;
    if (sign_str == "positive" || sign_str == "+") sign = Sign::positive;
    else if (sign_str == "negative" || sign_str == "-") sign = Sign::negative;
    else throw ConfigError("config: sign must be positive or negative, got '" + sign_str + "'");
    double alpha = cfg.get_double("potential", "alpha");
    int dim = static_cast<int>(cfg.get_int("potential", "dim"));
    double k1 = cfg.get_double("potential", "K1", 0.0);
    double k2 = cfg.get_double("potential", "K2", 0.0);
    if (kind == "power_decay") {
        double k = cfg.get_double("potential", "K", 1.0);
        return Potential::power_decay(sign, alpha, k, dim, k1, k2);
    }
    if (kind == "custom_radial") {
        auto rows = load_profile_csv(cfg.get_string("potential", "profile_path"));
        std::vector<double> radii, values;
        for (const auto& [r, v] : rows) {
            radii.push_back(r);
            values.push_back(v);
        }
        return Potential::custom_radial(sign, alpha, dim, std::move(radii), std::move(values),
                                        k1, k2);
    }
    throw ConfigError("config: kind must be power_decay or custom_radial, got '" + kind + "'");
}

fkmc::McConfig make_mc(const Config& cfg) {
    fkmc::McConfig mc;
    mc.seed = static_cast<std::uint64_t>(cfg.get_int("", "seed", 1));
    mc.n_paths = cfg.get_int("mc", "n_paths", mc.n_paths);
    mc.n_steps = static_cast<int>(cfg.get_int("mc", "n_steps", mc.n_steps));
    if (cfg.has("mc", "quadrature"))
        mc.quadrature = fkmc::quadrature_from_string(cfg.get_string("mc", "quadrature"));
    mc.antithetic = cfg.get_bool("mc", "antithetic", mc.antithetic);
    mc.step_halving_check = cfg.get_bool("mc", "step_halving_check", mc.step_halving_check);
    mc.compensated_sum = cfg.get_bool("mc", "compensated_sum", mc.compensated_sum);
    mc.n_threads = static_cast<int>(cfg.get_int("", "threads", mc.n_threads));
    mc.t_cap = cfg.get_double("mc", "t_cap", mc.t_cap);
    return mc;
}

pde::GridConfig make_pde(const Config& cfg) {
    pde::GridConfig g;
    g.x_range = cfg.get_double("pde", "x_range", g.x_range);
    g.n_space = static_cast<int>(cfg.get_int("pde", "n_space", g.n_space));
    g.n_time = static_cast<int>(cfg.get_int("pde", "n_time", g.n_time));
    g.delta_init_width = cfg.get_double("pde", "delta_init_width", g.delta_init_width);
    return g;
}

verify::FitConfig make_fit(const Config& cfg) {
    verify::FitConfig f;
    f.band_ceiling = cfg.get_double("verify", "band_ceiling", f.band_ceiling);
    f.grid_points = static_cast<int>(cfg.get_int("verify", "grid_points", f.grid_points));
    f.grid_min = cfg.get_double("verify", "grid_min", f.grid_min);
    f.grid_max = cfg.get_double("verify", "grid_max", f.grid_max);
    f.exclusion_sigma = cfg.get_double("verify", "exclusion_sigma", f.exclusion_sigma);
    f.containment_sigma = cfg.get_double("verify", "containment_sigma", f.containment_sigma);
    f.max_reject_fraction = cfg.get_double("verify", "max_reject_fraction", f.max_reject_fraction);
    return f;
}

} // namespace schro::config
