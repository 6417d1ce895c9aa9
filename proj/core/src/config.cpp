#include "dks/config.hpp"

#include "dks/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dks::cfg {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_real(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) { // shortest round-tripping form
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string fmt_int(long long v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", v);
    return buf;
}

} // namespace

const std::vector<KeySpec>& key_registry() {
    static const std::vector<KeySpec> reg = {
        // atom cloud and light
        {"N", KeyType::integer, "100000", "-", "atom number"},
        {"mass_kg", KeyType::real, "1.44e-25", "kg", "atomic mass"},
        {"scattering_length_m", KeyType::real, "5.2e-09", "m", "s-wave scattering length"},
        {"wavelength_m", KeyType::real, "7.8e-07", "m", "two-photon laser wavelength (k = 2 pi / lambda)"},
        {"pulse_type", KeyType::text, "bragg", "-", "raman | bragg"},
        // traps (ordinary frequencies; omega = 2 pi f)
        {"omega_initial_x_hz", KeyType::real, "80", "Hz", "initial trap frequency, x"},
        {"omega_initial_y_hz", KeyType::real, "80", "Hz", "initial trap frequency, y"},
        {"omega_initial_z_hz", KeyType::real, "80", "Hz", "initial trap frequency, z"},
        {"omega_dks1_x_hz", KeyType::real, "250", "Hz", "first kick trap frequency, x"},
        {"omega_dks1_y_hz", KeyType::real, "250", "Hz", "first kick trap frequency, y"},
        {"omega_dks1_z_hz", KeyType::real, "20", "Hz", "first kick trap frequency, z"},
        {"omega_dks2_x_hz", KeyType::real, "250", "Hz", "second kick trap frequency, x"},
        {"omega_dks2_y_hz", KeyType::real, "250", "Hz", "second kick trap frequency, y"},
        {"omega_dks2_z_hz", KeyType::real, "20", "Hz", "second kick trap frequency, z"},
        // protocol timings
        {"T0_s", KeyType::real, "0.001", "s", "free expansion before the first splitter"},
        {"t_exp_s", KeyType::real, "0.005", "s", "pre-expansion before each kick"},
        {"dt1_s", KeyType::real, "0.00025", "s", "first kick duration"},
        {"T_tau_prime_s", KeyType::real, "0.00525", "s", "dilution half-interval after re-overlap"},
        {"T_theta_s", KeyType::real, "0.005", "s", "interferometer pulse spacing"},
        {"dt2_s", KeyType::real, "0", "s", "second kick duration (echo readout)"},
        {"readout", KeyType::text, "linear", "-", "linear | echo"},
        {"collimate_before_bs2", KeyType::flag, "false", "-", "zero the expansion rate at the second splitter"},
        {"include_pre_dks2_window", KeyType::flag, "true", "-", "count the drift before the second kick toward tau2"},
        {"delta_n", KeyType::real, "0", "-", "atom-counting noise standard deviation"},
        // closed-form gain inputs (gain command)
        {"mode", KeyType::text, "linear", "-", "gain command mode: linear | echo | perturbative"},
        {"tau", KeyType::text, "auto", "-", "twist strength, or 'auto' for the numeric optimum"},
        {"tau1", KeyType::real, "0", "-", "preparation twist (echo overrides)"},
        {"tau2", KeyType::real, "0", "-", "readout twist (echo overrides)"},
        {"tau_ai", KeyType::real, "0", "-", "residual twist during the interferometer"},
        {"engine_cap", KeyType::integer, "4096", "-", "largest N admitted to the exact engine"},
        // numerics
        {"seed", KeyType::integer, "0", "-", "seed for optimizer restarts"},
        {"threads", KeyType::integer, "1", "-", "parallel evaluation threads for scans"},
        {"mf_dt_max_s", KeyType::real, "2e-05", "s", "coarsest chi-trace sampling step"},
        {"mf_refine_rel", KeyType::real, "1e-06", "-", "tau convergence target under grid halving (0 = single pass)"},
        // tuner brackets
        {"t_tau_prime_min_s", KeyType::real, "0", "s", "lower bracket for the linear-condition tuner"},
        {"t_tau_prime_max_s", KeyType::real, "0.2", "s", "upper bracket for the linear-condition tuner"},
        {"dt2_min_s", KeyType::real, "0", "s", "lower bracket for the untwist tuner"},
        {"dt2_max_s", KeyType::real, "0.005", "s", "upper bracket for the untwist tuner"},
        {"tune", KeyType::text, "both", "-", "echo-tune selection: linear | untwist | both"},
        {"dt2_sweep_steps", KeyType::integer, "0", "-", "echo-tune: also emit a tau2(dt2) sweep with this many points"},
        // prep-scan axes
        {"t_exp_min_s", KeyType::real, "0.001", "s", "prep-scan: smallest pre-expansion"},
        {"t_exp_max_s", KeyType::real, "0.008", "s", "prep-scan: largest pre-expansion"},
        {"t_exp_steps", KeyType::integer, "40", "-", "prep-scan: pre-expansion grid size"},
        {"dt1_min_s", KeyType::real, "0", "s", "prep-scan: smallest kick duration"},
        {"dt1_max_s", KeyType::real, "0.0005", "s", "prep-scan: largest kick duration"},
        {"dt1_steps", KeyType::integer, "40", "-", "prep-scan: kick-duration grid size"},
        {"pulse_types", KeyType::text, "both", "-", "prep-scan: bragg | raman | both"},
        // robustness axis
        {"delta_n_min", KeyType::real, "0", "-", "robustness: smallest detection noise"},
        {"delta_n_max", KeyType::real, "50", "-", "robustness: largest detection noise"},
        {"delta_n_steps", KeyType::integer, "51", "-", "robustness: detection-noise grid size"},
    };
    return reg;
}

namespace {

const KeySpec* find_key(const std::string& name) {
    for (const auto& k : key_registry())
        if (k.name == name) return &k;
    return nullptr;
}

std::string normalize(const KeySpec& spec, const std::string& value_in,
                      const std::string& where) {
    std::string v = trim(value_in);
    switch (spec.type) {
    case KeyType::integer: {
        char* end = nullptr;
        long long n = std::strtoll(v.c_str(), &end, 10);
        if (v.empty() || end == nullptr || *end != '\0')
            throw ConfigError(where + ": key '" + spec.name + "' expects an integer, got '" +
                              v + "'");
        return fmt_int(n);
    }
    case KeyType::real: {
        char* end = nullptr;
        double d = std::strtod(v.c_str(), &end);
        if (v.empty() || end == nullptr || *end != '\0')
            throw ConfigError(where + ": key '" + spec.name + "' expects a number, got '" +
                              v + "'");
        return fmt_real(d);
    }
    case KeyType::flag: {
        if (v == "true" || v == "1" || v == "yes") return "true";
        if (v == "false" || v == "0" || v == "no") return "false";
        throw ConfigError(where + ": key '" + spec.name + "' expects true/false, got '" + v +
                          "'");
    }
    case KeyType::text:
        if (v.empty())
            throw ConfigError(where + ": key '" + spec.name + "' has an empty value");
        return v;
    }
    throw ConfigError(where + ": bad key type");
}

} // namespace

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        const KeySpec* spec = find_key(key);
        if (!spec)
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        cfg.values_[key] = normalize(*spec, value, "line " + std::to_string(lineno));
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'");
    values_[key] = normalize(*spec, value, "set()");
}

bool RunConfig::is_set(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'");
    return spec->default_value;
}

long long RunConfig::i64(const std::string& key) const {
    return std::strtoll(raw(key).c_str(), nullptr, 10);
}

double RunConfig::real(const std::string& key) const {
    return std::strtod(raw(key).c_str(), nullptr);
}

std::string RunConfig::str(const std::string& key) const { return raw(key); }

bool RunConfig::flag(const std::string& key) const { return raw(key) == "true"; }

std::optional<double> RunConfig::real_or_auto(const std::string& key) const {
    std::string v = raw(key);
    if (v == "auto") return std::nullopt;
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == nullptr || *end != '\0')
        throw ConfigError("key '" + key + "': expected a number or 'auto', got '" + v + "'");
    return d;
}

std::string RunConfig::dump() const {
    std::ostringstream out;
    for (const auto& k : key_registry()) out << k.name << " = " << raw(k.name) << "\n";
    return out.str();
}

} // namespace dks::cfg
