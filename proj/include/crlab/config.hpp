#pragma once

// Typed key/value configuration files, see docs/config.md for the grammar.
//
//   [model]
//   kind = "heisenberg"
//   dims = [32, 32, 32]
//   # comment

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crlab/errors.hpp"

namespace crlab::config {

struct Value {
    std::variant<bool, double, std::string, std::vector<Value>> v;

    std::string type_name() const;
};

class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;
    const std::map<std::string, Value>* section(const std::string& name) const;

    /// Typed getters throw ConfigError on a missing key (no fallback) or a
    /// type mismatch.
    std::string get_string(const std::string& section, const std::string& key,
                           std::optional<std::string> fallback = std::nullopt) const;
    double get_double(const std::string& section, const std::string& key,
                      std::optional<double> fallback = std::nullopt) const;
    long get_int(const std::string& section, const std::string& key, std::optional<long> fallback = std::nullopt) const;
    bool get_bool(const std::string& section, const std::string& key, std::optional<bool> fallback = std::nullopt) const;
    std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                         std::optional<std::vector<std::string>> fallback = std::nullopt) const;
    std::vector<long> get_ints(const std::string& section, const std::string& key,
                               std::optional<std::vector<long>> fallback = std::nullopt) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    std::optional<std::vector<double>> fallback = std::nullopt) const;

    void set(const std::string& section, const std::string& key, Value value);

private:
    const Value* find(const std::string& section, const std::string& key) const;

    std::string origin_;
    std::map<std::string, std::map<std::string, Value>> sections_;
};

} // namespace crlab::config
