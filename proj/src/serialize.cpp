#include "plq/serialize.hpp"

#include <algorithm>
#include <cmath>

namespace plq {

bool ConfigNode::has(const std::string& key) const {
    return value_->is_object() && value_->contains(key);
}

ConfigNode ConfigNode::at(const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    const std::string child = path_.empty() ? key : path_ + "." + key;
    if (it == value_->end()) throw ConfigError(child, "missing required field");
    return ConfigNode(*it, child);
}

std::vector<ConfigNode> ConfigNode::items() const {
    if (!value_->is_array()) fail("expected an array");
    std::vector<ConfigNode> out;
    for (std::size_t i = 0; i < value_->size(); ++i)
        out.emplace_back((*value_)[i], path_ + "[" + std::to_string(i) + "]");
    return out;
}

double ConfigNode::number() const {
    if (!value_->is_number()) fail("expected a number");
    const double x = value_->get<double>();
    if (!std::isfinite(x)) fail("expected a finite number");
    return x;
}

int ConfigNode::integer() const {
    if (!value_->is_number_integer()) fail("expected an integer");
    return value_->get<int>();
}

std::uint64_t ConfigNode::unsigned_integer() const {
    if (!value_->is_number_unsigned()) fail("expected a non-negative integer");
    return value_->get<std::uint64_t>();
}

bool ConfigNode::boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
}

std::string ConfigNode::string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
}

double ConfigNode::number(const std::string& key, double fallback) const {
    return has(key) ? at(key).number() : fallback;
}
int ConfigNode::integer(const std::string& key, int fallback) const {
    return has(key) ? at(key).integer() : fallback;
}
bool ConfigNode::boolean(const std::string& key, bool fallback) const {
    return has(key) ? at(key).boolean() : fallback;
}
std::string ConfigNode::string(const std::string& key, const std::string& fallback) const {
    return has(key) ? at(key).string() : fallback;
}

void ConfigNode::only(std::initializer_list<const char*> allowed) const {
    if (!value_->is_object()) fail("expected an object");
    for (auto it = value_->begin(); it != value_->end(); ++it) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                    [&](const char* a) { return it.key() == a; });
        if (!ok) {
            std::string list;
            for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
            throw ConfigError(path_.empty() ? it.key() : path_ + "." + it.key(),
                              "unknown field (allowed: " + list + ")");
        }
    }
}

void ConfigNode::fail(const std::string& what) const { throw ConfigError(path_, what); }

Json to_json(const LatticeSpec& spec) {
    return Json{{"kind", to_string(spec.kind())},
                {"hoppings", spec.hoppings()},
                {"n_cells", spec.n_cells()},
                {"boundary", to_string(spec.boundary())},
                {"onsite", spec.onsite()}};
}

Json to_json(const DisorderRealization& d) {
    return Json{{"kind", to_string(d.kind)}, {"width", d.width},   {"seed", d.seed},
                {"subset", d.subset},        {"targets", d.targets}, {"offsets", d.offsets}};
}

Json to_json(const SpinPlacement& s) {
    return Json{{"cell", s.cell},
                {"sublattice", to_string(s.sublattice)},
                {"g", s.g},
                {"detuning", s.detuning}};
}

namespace {

template <class F>
auto wrap(const ConfigNode& node, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InvalidArgument& e) {
        throw ConfigError(node.path(), e.what());
    }
}

} // namespace

LatticeSpec lattice_from_json(const ConfigNode& node) {
    node.only({"kind", "hoppings", "J", "delta", "n_cells", "boundary", "onsite", "label"});
    const LatticeKind kind = wrap(node.at("kind"), [&] { return lattice_kind_from_string(node.at("kind").string()); });
    std::vector<double> hoppings;
    if (node.has("hoppings")) {
        if (node.has("delta")) node.fail("give either hoppings or (J, delta), not both");
        for (const auto& h : node.at("hoppings").items()) hoppings.push_back(h.number());
    } else {
        if (kind != LatticeKind::dimer) node.fail("trimer lattices need explicit hoppings");
        const double J = node.number("J", 1.0);
        const double delta = node.at("delta").number();
        hoppings = {J * (1.0 + delta), J * (1.0 - delta)};
    }
    const int n_cells = node.at("n_cells").integer();
    const Boundary boundary = node.has("boundary")
                                  ? wrap(node.at("boundary"), [&] { return boundary_from_string(node.at("boundary").string()); })
                                  : Boundary::open;
    const double onsite = node.number("onsite", 0.0);
    return wrap(node, [&] { return LatticeSpec(kind, hoppings, n_cells, boundary, onsite); });
}

std::vector<int> subset_from_json(const ConfigNode& node, const LatticeSpec& spec) {
    static const char* dimer_names[] = {"J1", "J2"};
    static const char* trimer_names[] = {"Ja", "Jb", "Jc"};
    std::vector<int> out;
    for (const auto& item : node.items()) {
        if (item.json().is_number_integer()) {
            out.push_back(item.integer());
            continue;
        }
        const std::string name = item.string();
        int found = -1;
        for (int p = 0; p < spec.cell_size(); ++p)
            if (name == (spec.kind() == LatticeKind::dimer ? dimer_names[p] : trimer_names[p])) found = p;
        if (found < 0) item.fail("unknown hopping name '" + name + "'");
        out.push_back(found);
    }
    return out;
}

DisorderRealization disorder_from_json(const ConfigNode& node) {
    node.only({"kind", "width", "seed", "subset", "targets", "offsets"});
    DisorderRealization d;
    d.kind = wrap(node.at("kind"), [&] { return disorder_kind_from_string(node.at("kind").string()); });
    d.width = node.at("width").number();
    d.seed = node.has("seed") ? node.at("seed").unsigned_integer() : 0;
    if (node.has("subset"))
        for (const auto& s : node.at("subset").items()) d.subset.push_back(s.integer());
    for (const auto& t : node.at("targets").items()) d.targets.push_back(t.integer());
    for (const auto& o : node.at("offsets").items()) d.offsets.push_back(o.number());
    return d;
}

SpinPlacement spin_from_json(const ConfigNode& node, const LatticeSpec& spec) {
    node.only({"cell", "sublattice", "cavity", "g", "detuning", "label"});
    const double g = node.number("g", 0.3);
    const double detuning = node.number("detuning", 0.0);
    if (!(g > 0.0)) node.at("g").fail("g must be > 0");
    if (node.has("cavity")) {
        if (node.has("cell") || node.has("sublattice")) node.fail("give either cavity or (cell, sublattice)");
        const ConfigNode c = node.at("cavity");
        return wrap(c, [&] { return spin_at_cavity(spec, c.integer(), g, detuning); });
    }
    SpinPlacement s;
    s.cell = node.at("cell").integer();
    s.sublattice = wrap(node.at("sublattice"), [&] { return sublattice_from_string(node.at("sublattice").string()); });
    if (static_cast<int>(s.sublattice) >= spec.cell_size())
        node.at("sublattice").fail("sublattice " + to_string(s.sublattice) + " does not exist in this lattice");
    s.g = g;
    s.detuning = detuning;
    wrap(node, [&] { return spec.site_index(s.cell, s.sublattice); });
    return s;
}

} // namespace plq
