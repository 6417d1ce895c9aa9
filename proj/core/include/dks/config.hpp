#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dks::cfg {

enum class KeyType { integer, real, text, flag };

struct KeySpec {
    std::string name;
    KeyType type;
    std::string default_value;
    std::string unit; // "s", "Hz", "m", "kg", "1/m" or "-" for dimensionless
    std::string doc;
};

/// The full set of keys accepted in a run configuration (flat key=value
/// lines, '#' comments). Unknown keys are rejected at parse time.
const std::vector<KeySpec>& key_registry();

class RunConfig {
public:
    RunConfig() = default;

    /// Parse the key=value text; throws ConfigError with a line diagnostic.
    static RunConfig parse(const std::string& text);
    static RunConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool is_set(const std::string& key) const;

    long long i64(const std::string& key) const;
    double real(const std::string& key) const;
    std::string str(const std::string& key) const;
    bool flag(const std::string& key) const;
    /// real(key), or nullopt if the value is the literal "auto".
    std::optional<double> real_or_auto(const std::string& key) const;

    /// Canonical round-trippable dump: registry order, every key present.
    std::string dump() const;

private:
    std::string raw(const std::string& key) const;
    std::map<std::string, std::string> values_;
};

} // namespace dks::cfg
