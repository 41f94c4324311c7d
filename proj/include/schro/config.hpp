#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "schro/feynman_kac.hpp"
#include "schro/pde.hpp"
#include "schro/potential.hpp"
#include "schro/verify.hpp"

namespace schro::config {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat sectioned key=value text. '#' starts a comment, [name] opens a section,
// keys before the first header live in the unnamed top-level section. Sections
// and keys are checked against a fixed schema at parse time; an unknown key
// fails with the list of valid keys for its section.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    // Required-value getters throw ConfigError when the key is absent.
    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    // Comma-separated list of reals.
    std::vector<double> get_list(const std::string& section, const std::string& key) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 std::vector<double> fallback) const;

    // Flag overrides; validates against the same schema.
    void set(const std::string& section, const std::string& key, const std::string& value);

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// (r, value) rows from a two-column CSV, header line optional.
std::vector<std::pair<double, double>> load_profile_csv(const std::string& path);

// Builders from the named sections. make_potential requires [potential];
// the others fall back to defaults when their section is absent. The top-level
// `seed` key feeds every random stream.
Potential make_potential(const Config& cfg);
fkmc::McConfig make_mc(const Config& cfg);
pde::GridConfig make_pde(const Config& cfg);
verify::FitConfig make_fit(const Config& cfg);

} // namespace schro::config
