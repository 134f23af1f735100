#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "plq/lattice.hpp"

namespace plq {

using Json = nlohmann::ordered_json;

/// Invalid configuration; `field` is a dotted path such as "spins[1].sublattice".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : "field '" + field + "': " + what),
          field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Read-only view of a JSON value that remembers its path for diagnostics.
class ConfigNode {
public:
    ConfigNode(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {}

    const Json& json() const { return *value_; }
    const std::string& path() const { return path_; }

    bool has(const std::string& key) const;
    ConfigNode at(const std::string& key) const;
    std::vector<ConfigNode> items() const;

    double number() const;
    int integer() const;
    std::uint64_t unsigned_integer() const;
    bool boolean() const;
    std::string string() const;

    double number(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    bool boolean(const std::string& key, bool fallback) const;
    std::string string(const std::string& key, const std::string& fallback) const;

    /// Rejects keys outside `allowed` (catches typos in configs).
    void only(std::initializer_list<const char*> allowed) const;

    [[noreturn]] void fail(const std::string& what) const;

private:
    const Json* value_;
    std::string path_;
};

Json to_json(const LatticeSpec& spec);
Json to_json(const DisorderRealization& d);
Json to_json(const SpinPlacement& s);

/// Accepts either {"hoppings": [...]} or, for dimers, {"J": .., "delta": ..}.
LatticeSpec lattice_from_json(const ConfigNode& node);
DisorderRealization disorder_from_json(const ConfigNode& node);
/// Accepts {"cell", "sublattice"} or a 1-based {"cavity"} along `spec`.
SpinPlacement spin_from_json(const ConfigNode& node, const LatticeSpec& spec);

/// Hopping-pattern indices from names ("Ja", "J1", ...) or integers.
std::vector<int> subset_from_json(const ConfigNode& node, const LatticeSpec& spec);

} // namespace plq
