#include "plq/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>

#include "plq/boundstate.hpp"
#include "plq/csv.hpp"
#include "plq/device.hpp"
#include "plq/dynamics.hpp"
#include "plq/rng.hpp"
#include "plq/selfenergy.hpp"

namespace plq {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- presets

namespace {

const std::vector<std::pair<std::string, const char*>>& preset_table() {
    static const std::vector<std::pair<std::string, const char*>> table = {
        {"fig2c", R"({
  "task": "bands", "n_k": 256,
  "lattices": [
    {"label": "delta+0.3", "kind": "dimer", "J": 1.0, "delta": 0.3, "n_cells": 20},
    {"label": "delta-0.3", "kind": "dimer", "J": 1.0, "delta": -0.3, "n_cells": 20}]})"},
        {"fig2d", R"({
  "task": "bands", "n_k": 256,
  "lattices": [
    {"label": "1-4-3", "kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
    {"label": "3-1-4", "kind": "trimer", "hoppings": [3, 1, 4], "n_cells": 20},
    {"label": "4-3-1", "kind": "trimer", "hoppings": [4, 3, 1], "n_cells": 20}]})"},
        {"fig3a", R"({
  "task": "bound_state",
  "lattice": {"kind": "dimer", "J": 1.0, "delta": 0.3, "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "A", "g": 0.3, "detuning": 0.0}})"},
        {"fig3b", R"({
  "task": "bound_state",
  "lattice": {"kind": "dimer", "J": 1.0, "delta": 0.3, "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "B", "g": 0.3, "detuning": 0.0}})"},
        {"fig3c", R"({
  "task": "bound_state", "seed": 31, "realizations": 100,
  "lattice": {"kind": "dimer", "J": 1.0, "delta": 0.3, "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "A", "g": 0.3, "detuning": 0.0},
  "disorder": {"kind": "bond", "width": 0.5}})"},
        {"fig3d", R"({
  "task": "bound_state", "seed": 32, "realizations": 100,
  "lattice": {"kind": "dimer", "J": 1.0, "delta": 0.3, "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "A", "g": 0.3, "detuning": 0.0},
  "disorder": {"kind": "site", "width": 0.5}})"},
        {"fig4", R"({
  "task": "decay", "g": 0.3, "x_ij": 2, "n_omega": 400,
  "lattices": [
    {"label": "delta+0.3", "kind": "dimer", "J": 1.0, "delta": 0.3, "n_cells": 1},
    {"label": "delta-0.3", "kind": "dimer", "J": 1.0, "delta": -0.3, "n_cells": 1}]})"},
        {"fig5b", R"({
  "task": "dynamics", "seed": 51, "realizations": 20,
  "lattice": {"kind": "dimer", "J": 1.0, "delta": 0.3, "n_cells": 6},
  "spins": [
    {"cell": 1, "sublattice": "A", "g": 0.3, "detuning": 0.0},
    {"cell": 1, "sublattice": "B", "g": 0.3, "detuning": 0.0},
    {"cell": 4, "sublattice": "A", "g": 0.3, "detuning": 0.0}],
  "initial": [1, 0, 0],
  "disorder": {"kind": "bond", "width": 1.0},
  "time": {"t_max": 50, "n_times": 1001}})"},
        {"fig5c", R"({
  "task": "dynamics", "seed": 52, "realizations": 20,
  "lattice": {"kind": "dimer", "J": 1.0, "delta": 0.3, "n_cells": 6},
  "spins": [
    {"cell": 1, "sublattice": "A", "g": 0.3, "detuning": 0.0},
    {"cell": 1, "sublattice": "B", "g": 0.3, "detuning": 0.0},
    {"cell": 4, "sublattice": "A", "g": 0.3, "detuning": 0.0}],
  "initial": [1, 0, 0],
  "disorder": {"kind": "site", "width": 1.0},
  "time": {"t_max": 50, "n_times": 1001}})"},
        {"fig6", R"({
  "task": "edge_control",
  "lattice": {"kind": "dimer", "J": 1.0, "delta": -0.3, "n_cells": 6},
  "spin": {"cavity": 5, "g": 0.3, "detuning": 0.0},
  "time": {"t_max": 200, "n_times": 2001}})"},
        {"fig7a", R"({
  "task": "bound_state",
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "A", "g": 0.3, "detuning": 4.0}})"},
        {"fig7b", R"({
  "task": "bound_state",
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "B", "g": 0.3, "detuning": 3.0}})"},
        {"fig7c", R"({
  "task": "bound_state",
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "C", "g": 0.3, "detuning": 1.0}})"},
        {"fig7d", R"({
  "task": "bound_state",
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "A", "g": 0.3, "detuning": -4.0}})"},
        {"fig7e", R"({
  "task": "bound_state",
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "B", "g": 0.3, "detuning": -3.0}})"},
        {"fig7f", R"({
  "task": "bound_state",
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "C", "g": 0.3, "detuning": -1.0}})"},
        {"fig7g", R"({
  "task": "bound_state", "seed": 71, "realizations": 100,
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "B", "g": 0.3, "detuning": 3.0},
  "disorder": {"kind": "bond_subset", "subset": ["Ja", "Jb"], "width": 1.0}})"},
        {"fig7h", R"({
  "task": "bound_state", "seed": 72, "realizations": 100,
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "B", "g": 0.3, "detuning": 3.0},
  "disorder": {"kind": "bond_subset", "subset": ["Jc"], "width": 1.0}})"},
        {"fig7i", R"({
  "task": "bound_state", "seed": 73, "realizations": 100,
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 20},
  "spin": {"cell": 10, "sublattice": "B", "g": 0.3, "detuning": 3.0},
  "disorder": {"kind": "site", "width": 1.0}})"},
        {"fig8a", R"({
  "task": "decay", "g": 0.3, "n_omega": 300,
  "lattices": [{"label": "1-4-3", "kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 1}]})"},
        {"fig8b", R"({
  "task": "decay", "g": 0.3, "n_omega": 300,
  "lattices": [{"label": "1-1-3", "kind": "trimer", "hoppings": [1, 1, 3], "n_cells": 1}]})"},
        {"fig8c", R"({
  "task": "decay", "g": 0.3, "n_omega": 300,
  "lattices": [{"label": "1-1-1", "kind": "trimer", "hoppings": [1, 1, 1], "n_cells": 1}]})"},
        {"fig9c", R"({
  "task": "dynamics", "seed": 93, "realizations": 20, "clean_reference": true,
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 4},
  "spins": [
    {"label": "A", "cavity": 4, "g": 0.3, "detuning": 3.0},
    {"label": "B", "cavity": 5, "g": 0.3, "detuning": 3.0},
    {"label": "C", "cavity": 3, "g": 0.3, "detuning": 3.0}],
  "initial": [1, 0, 0],
  "disorder": {"kind": "bond_subset", "subset": ["Ja", "Jb"], "width": 1.0},
  "time": {"t_max": 300, "n_times": 1501}})"},
        {"fig9d", R"({
  "task": "dynamics", "seed": 94, "realizations": 20, "clean_reference": true,
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 4},
  "spins": [
    {"label": "A", "cavity": 10, "g": 0.3, "detuning": 3.0},
    {"label": "B", "cavity": 5, "g": 0.3, "detuning": 3.0},
    {"label": "C", "cavity": 9, "g": 0.3, "detuning": 3.0}],
  "initial": [0, 1, 0],
  "combinations": [
    {"label": "symmetric", "coefficients": [1, 0, 1]},
    {"label": "antisymmetric", "coefficients": [1, 0, -1]}],
  "compensation": {"enabled": true, "reference": "B", "cancel": [["A", "C"]]},
  "disorder": {"kind": "bond_subset", "subset": ["Ja", "Jb"], "width": 1.0},
  "time": {"t_max": 300, "n_times": 1501}})"},
        {"fig10", R"({
  "task": "edge_control", "resonant_edge": true,
  "lattice": {"kind": "trimer", "hoppings": [1, 4, 3], "n_cells": 4},
  "spin": {"cavity": 5, "g": 0.3, "detuning": 4.0},
  "time": {"t_max": 300, "n_times": 3001}})"},
        {"feasibility", R"({"task": "feasibility"})"},
    };
    return table;
}

std::string joined_names() {
    std::string s;
    for (const auto& [name, _] : preset_table()) s += (s.empty() ? "" : ", ") + name;
    return s + " (groups: fig2, fig3, fig5, fig7, fig8, fig9)";
}

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : preset_table()) names.push_back(name);
    return names;
}

std::vector<std::string> resolve_preset(const std::string& name) {
    std::vector<std::string> out;
    for (const auto& [leaf, _] : preset_table()) {
        if (leaf == name) return {leaf};
        // a group is a prefix followed by a single panel letter
        if (leaf.size() == name.size() + 1 && leaf.compare(0, name.size(), name) == 0 &&
            std::isalpha(static_cast<unsigned char>(leaf.back())) && name.rfind("fig", 0) == 0)
            out.push_back(leaf);
    }
    if (out.empty()) throw ConfigError("preset", "unknown preset '" + name + "'; available: " + joined_names());
    return out;
}

Json preset_config(const std::string& name) {
    for (const auto& [leaf, text] : preset_table())
        if (leaf == name) {
            Json cfg = Json::parse(text);
            Json out = {{"name", leaf}};
            out.update(cfg);
            return out;
        }
    throw ConfigError("preset", "unknown preset '" + name + "'; available: " + joined_names());
}

Json parse_config(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // locate the byte offset reported by the parser
        const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        int line = 1, col = 1;
        for (std::size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("", source + ": line " + std::to_string(line) + ", column " +
                                  std::to_string(col) + ": invalid JSON");
    }
}

void apply_override(Json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set", "expected key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }

    Json* node = &cfg;
    std::size_t start = 0;
    std::string walked;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError(key, "empty path component");
        walked += (walked.empty() ? "" : ".") + part;
        const bool last = dot == std::string::npos;
        if (node->is_array()) {
            const bool numeric = std::all_of(part.begin(), part.end(), ::isdigit);
            const std::size_t idx = numeric ? std::stoul(part) : node->size();
            if (idx >= node->size()) throw ConfigError(walked, "array index out of range");
            node = &(*node)[idx];
        } else {
            if (!node->is_object()) throw ConfigError(walked, "cannot descend into a scalar");
            if (last) {
                (*node)[part] = value;
                return;
            }
            if (!node->contains(part)) (*node)[part] = Json::object();
            node = &(*node)[part];
        }
        if (last) {
            *node = value;
            return;
        }
        start = dot + 1;
    }
}

int resolve_nk(const ConfigNode& cfg, int fallback) {
    if (cfg.has("n_k")) {
        const int n = cfg.at("n_k").integer();
        if (n < 2) cfg.at("n_k").fail("must be >= 2");
        return n;
    }
    if (const char* env = std::getenv("PLQ_NK")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (!end || *end != '\0' || n < 2 || n > (1 << 22))
            throw ConfigError("PLQ_NK", "expected an integer in [2, 4194304], got '" + std::string(env) + "'");
        return static_cast<int>(n);
    }
    return fallback;
}

// ---------------------------------------------------------------- tasks

namespace {

struct Context {
    fs::path dir;
    RunOutput* out;

    void write(const std::string& file, const CsvTable& t) const {
        t.write(dir / file);
        out->files.push_back(file);
    }
    void write(const std::string& file, const Json& j) const {
        std::ofstream f(dir / file, std::ios::binary);
        f << j.dump(2) << '\n';
        if (!f) throw std::runtime_error("cannot write " + (dir / file).string());
        out->files.push_back(file);
    }
};

std::uint64_t seed_of(const ConfigNode& cfg) {
    return cfg.has("seed") ? cfg.at("seed").unsigned_integer() : 0;
}

std::string label_of(const ConfigNode& node, const std::string& fallback) {
    const std::string l = node.string("label", fallback);
    if (l.empty() || l.find_first_of(",/\\\n") != std::string::npos)
        node.at("label").fail("labels must be non-empty without commas or slashes");
    return l;
}

// lattice objects may carry a "label" that is not part of the spec itself
LatticeSpec lattice_at(const ConfigNode& node) { return lattice_from_json(node); }

struct DisorderConfig {
    DisorderKind kind;
    double width;
    std::vector<int> subset;
};

std::optional<DisorderConfig> disorder_config(const ConfigNode& cfg, const LatticeSpec& spec) {
    if (!cfg.has("disorder")) return std::nullopt;
    const ConfigNode d = cfg.at("disorder");
    d.only({"kind", "width", "subset"});
    DisorderConfig out;
    try {
        out.kind = disorder_kind_from_string(d.at("kind").string());
    } catch (const InvalidArgument& e) {
        d.at("kind").fail(e.what());
    }
    out.width = d.at("width").number();
    if (out.width < 0) d.at("width").fail("must be >= 0");
    if (d.has("subset")) out.subset = subset_from_json(d.at("subset"), spec);
    if (out.kind == DisorderKind::bond_subset && out.subset.empty()) d.fail("bond_subset needs a subset");
    return out;
}

Json band_intervals_json(const std::vector<BandInterval>& bands) {
    Json j = Json::array();
    for (const auto& b : bands) j.push_back({b.lo, b.hi});
    return j;
}

CsvTable profile_table(const BoundStateProfile& p, int cell_offset) {
    CsvTable t({"cell", "sublattice", "re", "im", "prob"});
    for (const auto& s : p.sites)
        t.row({cell(s.cell + cell_offset), to_string(s.sublattice), cell(s.amplitude.real()),
               cell(s.amplitude.imag()), cell(std::norm(s.amplitude))});
    return t;
}

Json metrics_json(const ChiralityMetrics& m) {
    return Json{{"left_weight", m.left_weight},
                {"right_weight", m.right_weight},
                {"spin_site_weight", m.spin_site_weight},
                {"sublattice_weight", {m.sublattice_weight[0], m.sublattice_weight[1], m.sublattice_weight[2]}},
                {"chirality", m.chirality}};
}

void task_bands(const ConfigNode& cfg, Context& ctx) {
    cfg.only({"name", "task", "description", "n_k", "lattices"});
    const int n_k = resolve_nk(cfg, 256);
    Json summary = Json::array();
    for (const auto& node : cfg.at("lattices").items()) {
        const LatticeSpec spec = lattice_at(node);
        const std::string label = label_of(node, to_string(spec.kind()));
        CsvTable bands({"k", "band", "omega"});
        for (const auto& p : band_structure(spec, n_k)) bands.row({cell(p.k), cell(p.band), cell(p.omega)});
        ctx.write("bands_" + label + ".csv", bands);

        Json entry = {{"label", label}, {"band_intervals", band_intervals_json(band_intervals(spec, 2))}};
        if (spec.boundary() == Boundary::open && spec.n_cells() >= 4) {
            CsvTable edges({"energy", "side", "side_weight"});
            Json energies = Json::array();
            for (const auto& e : find_edge_states(spec)) {
                edges.row({cell(e.energy), to_string(e.side), cell(e.side_weight)});
                energies.push_back({{"energy", e.energy}, {"side", to_string(e.side)}});
            }
            ctx.write("edge_states_" + label + ".csv", edges);
            entry["edge_states"] = energies;
        }
        summary.push_back(entry);
    }
    ctx.out->summary = {{"lattices", summary}};
}

void task_bound_state(const ConfigNode& cfg, Context& ctx) {
    cfg.only({"name", "task", "description", "n_k", "lattice", "spin", "disorder", "seed",
              "realizations", "j_range"});
    const LatticeSpec spec = lattice_at(cfg.at("lattice"));
    const SpinPlacement spin = spin_from_json(cfg.at("spin"), spec);
    const auto disorder = disorder_config(cfg, spec);
    const std::uint64_t seed = seed_of(cfg);
    const int n_k = resolve_nk(cfg, 4096);
    const int j_range = cfg.integer("j_range", 10);
    const int realizations = cfg.integer("realizations", 1);
    if (realizations < 1) cfg.at("realizations").fail("must be >= 1");
    if (j_range < 1) cfg.at("j_range").fail("must be >= 1");

    std::optional<DisorderRealization> d;
    if (disorder) d = sample_disorder(spec, disorder->kind, disorder->width, derive_seed(seed, 0), disorder->subset);
    const SpinPlacement spins[] = {spin};
    const auto h = assemble_hamiltonian(spec, d ? &*d : nullptr, spins);
    const auto states = numeric_bound_states(h, spec);

    Json summary;
    summary["bound_states"] = Json::array();
    for (const auto& s : states)
        summary["bound_states"].push_back({{"energy", s.energy}, {"spin_weight", s.spin_weight()}});

    const auto forbidden = predicted_forbidden_side(spec, spin.sublattice, spin.detuning);
    summary["predicted_forbidden_side"] = forbidden ? to_string(*forbidden) : "none";

    const BoundStateProfile* best = nullptr;
    for (const auto& s : states)
        if (!best || std::abs(s.energy - spin.detuning) < std::abs(best->energy - spin.detuning)) best = &s;
    if (best) {
        ctx.write("profile.csv", profile_table(*best, 0));
        summary["energy"] = best->energy;
        summary["spin_amplitude"] = {best->spin_amplitude.real(), best->spin_amplitude.imag()};
        if (forbidden)
            summary["chirality"] = metrics_json(
                chirality_metrics(*best, spec.cell_size(), spin.cell, spin.sublattice, *forbidden));
    }

    const BoundStateProfile fourier =
        profile_from_kspace(spec, spin.sublattice, spin.detuning, spin.g, n_k, -j_range, j_range);
    ctx.write("profile_fourier.csv", profile_table(fourier, spin.cell));
    if (spec.kind() == LatticeKind::dimer && spin.detuning == 0.0 && spec.dimerization() > 0.0) {
        const BoundStateProfile analytic = dimer_chiral_profile(
            spec.mean_hopping(), spec.dimerization(), spin.sublattice, spin.g, -j_range, j_range);
        ctx.write("profile_analytic.csv", profile_table(analytic, spin.cell));
    }

    if (disorder && realizations > 1 && forbidden) {
        const auto samples = chirality_ensemble(spec, spin, disorder->kind, disorder->width,
                                                disorder->subset, realizations, seed);
        CsvTable t({"realization", "seed", "energy", "chirality"});
        std::vector<double> energies, chir;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            t.row({cell(static_cast<int>(i)), std::to_string(samples[i].seed), cell(samples[i].energy),
                   cell(samples[i].chirality)});
            energies.push_back(std::abs(samples[i].energy - spin.detuning));
            chir.push_back(samples[i].chirality);
        }
        ctx.write("ensemble.csv", t);
        std::vector<double> sorted = energies;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                                : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        summary["ensemble"] = {
            {"realizations", realizations},
            {"median_abs_energy_shift", median},
            {"min_chirality", *std::min_element(chir.begin(), chir.end())},
            {"fraction_chirality_ge_0.99",
             double(std::count_if(chir.begin(), chir.end(), [](double c) { return c >= 0.99; })) / chir.size()}};
    }
    ctx.out->summary = summary;
}

void task_decay(const ConfigNode& cfg, Context& ctx) {
    cfg.only({"name", "task", "description", "lattices", "g", "x_ij", "n_omega"});
    const double g = cfg.number("g", 0.3);
    const int n_omega = cfg.integer("n_omega", 300);
    if (n_omega < 2) cfg.at("n_omega").fail("must be >= 2");
    Json summary = Json::array();
    for (const auto& node : cfg.at("lattices").items()) {
        const LatticeSpec spec = lattice_at(node);
        const std::string label = label_of(node, to_string(spec.kind()));
        CsvTable t({"omega", "pair_or_sublattice", "gamma"});
        Json entry = {{"label", label}};
        if (spec.kind() == LatticeKind::dimer) {
            const int x = cfg.integer("x_ij", 2);
            const double J = spec.mean_hopping(), delta = spec.dimerization();
            const double lo = 2.0 * J * std::abs(delta), hi = 2.0 * J;
            for (int i = 0; i < n_omega; ++i) {
                // open grid: band edges are excluded
                const double w = lo + (hi - lo) * (i + 0.5) / n_omega;
                t.row({cell(w), "e", cell(gamma_single_dimer(w, J, delta, g))});
                t.row({cell(w), "AA", cell(gamma_dimer(w, J, delta, g, x, PairKind::same))});
                t.row({cell(w), "AB", cell(gamma_dimer(w, J, delta, g, x, PairKind::ab))});
                t.row({cell(w), "BA", cell(gamma_dimer(w, J, delta, g, x, PairKind::ba))});
            }
            CsvTable sp({"omega", "k", "super"});
            const auto points = superradiant_points(J, delta, x);
            for (const auto& p : points) sp.row({cell(p.omega), cell(p.k), cell(p.super ? 1 : -1)});
            ctx.write("superradiant_" + label + ".csv", sp);
            entry["x_ij"] = x;
            entry["superradiant_points_upper_band"] = points.size();
        } else {
            const auto bands = band_intervals(spec, 2);
            for (const auto& b : bands) {
                for (int i = 0; i < n_omega; ++i) {
                    const double w = b.lo + (b.hi - b.lo) * (i + 0.5) / n_omega;
                    for (Sublattice m : {Sublattice::A, Sublattice::B, Sublattice::C})
                        t.row({cell(w), to_string(m), cell(gamma_trimer(w, spec, m, g))});
                }
            }
            entry["band_intervals"] = band_intervals_json(bands);
        }
        ctx.write("decay_" + label + ".csv", t);
        summary.push_back(entry);
    }
    ctx.out->summary = {{"lattices", summary}};
}

DynamicsScenario dynamics_scenario(const ConfigNode& cfg, const LatticeSpec& spec) {
    DynamicsScenario s;
    s.name = cfg.string("name", "config");
    s.spec = spec;
    std::map<std::string, int> index;
    for (const auto& node : cfg.at("spins").items()) {
        s.spins.push_back(spin_from_json(node, spec));
        const std::string label = label_of(node, "spin" + std::to_string(s.spins.size()));
        if (!index.emplace(label, static_cast<int>(s.spin_labels.size())).second)
            node.at("label").fail("duplicate spin label");
        s.spin_labels.push_back(label);
    }
    if (s.spins.empty()) cfg.at("spins").fail("at least one spin is required");
    const std::size_t n = s.spins.size();

    auto coefficients = [&](const ConfigNode& node) {
        std::vector<cplx> c;
        for (const auto& x : node.items()) c.push_back(x.number());
        if (c.size() != n) node.fail("needs one entry per spin (" + std::to_string(n) + ")");
        if (std::all_of(c.begin(), c.end(), [](cplx z) { return z == 0.0; })) node.fail("all entries are zero");
        return c;
    };
    if (cfg.has("initial")) s.initial_spins = coefficients(cfg.at("initial"));
    if (cfg.has("combinations"))
        for (const auto& node : cfg.at("combinations").items()) {
            node.only({"label", "coefficients"});
            s.combinations.push_back({label_of(node, "combination"), coefficients(node.at("coefficients"))});
        }
    auto spin_ref = [&](const ConfigNode& node) {
        auto it = index.find(node.string());
        if (it == index.end()) node.fail("unknown spin label '" + node.string() + "'");
        return it->second;
    };
    if (cfg.has("compensation")) {
        const ConfigNode c = cfg.at("compensation");
        c.only({"enabled", "reference", "cancel"});
        s.compensation.enabled = c.boolean("enabled", true);
        if (c.has("reference")) s.compensation.reference_spin = spin_ref(c.at("reference"));
        if (c.has("cancel"))
            for (const auto& pair : c.at("cancel").items()) {
                const auto ends = pair.items();
                if (ends.size() != 2) pair.fail("expected a pair of spin labels");
                const int a = spin_ref(ends[0]), b = spin_ref(ends[1]);
                if (a == b) pair.fail("a spin cannot be paired with itself");
                s.compensation.cancel_pairs.emplace_back(a, b);
            }
    }
    if (cfg.has("time")) {
        const ConfigNode t = cfg.at("time");
        t.only({"t_max", "n_times"});
        s.t_max = t.number("t_max", s.t_max);
        s.n_times = t.integer("n_times", s.n_times);
        if (!(s.t_max > 0)) t.at("t_max").fail("must be > 0");
        if (s.n_times < 2) t.at("n_times").fail("must be >= 2");
    }
    if (const auto d = disorder_config(cfg, spec)) {
        s.disorder = d->kind;
        s.disorder_width = d->width;
        s.disorder_subset = d->subset;
    }
    return s;
}

CsvTable observable_table(const std::vector<double>& times, const std::vector<std::string>& labels,
                          const RMatrix& obs) {
    std::vector<std::string> header = {"t"};
    header.insert(header.end(), labels.begin(), labels.end());
    CsvTable t(header);
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<std::string> row = {cell(times[i])};
        for (Eigen::Index o = 0; o < obs.rows(); ++o) row.push_back(cell(obs(o, i)));
        t.row(std::move(row));
    }
    return t;
}

Json matrix_json(const RMatrix& m) {
    Json j = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}

void task_dynamics(const ConfigNode& cfg, Context& ctx) {
    cfg.only({"name", "task", "description", "lattice", "spins", "initial", "combinations",
              "compensation", "time", "disorder", "seed", "realizations", "keep_traces", "clean_reference"});
    const LatticeSpec spec = lattice_at(cfg.at("lattice"));
    const DynamicsScenario s = dynamics_scenario(cfg, spec);
    const int realizations = cfg.integer("realizations", 1);
    if (realizations < 1) cfg.at("realizations").fail("must be >= 1");
    const bool keep = cfg.boolean("keep_traces", false);
    const std::uint64_t seed = seed_of(cfg);

    const EnsembleStatistics st = ensemble_run(s, realizations, seed, true);
    ctx.write("populations.csv", observable_table(st.times, st.labels, st.traces[0]));
    ctx.write("mean.csv", observable_table(st.times, st.labels, st.mean));
    ctx.write("envelope_min.csv", observable_table(st.times, st.labels, st.min));
    ctx.write("envelope_max.csv", observable_table(st.times, st.labels, st.max));
    if (keep)
        for (int i = 0; i < realizations; ++i)
            ctx.write("populations_r" + std::to_string(i) + ".csv", observable_table(st.times, st.labels, st.traces[i]));

    Json summary;
    summary["labels"] = st.labels;
    summary["seeds"] = st.seeds;
    summary["max_norm_drift"] = st.max_norm_drift;
    summary["peak"] = matrix_json(st.peak);
    summary["floor"] = matrix_json(st.floor);
    if (s.disorder && cfg.boolean("clean_reference", false)) {
        DynamicsScenario clean = s;
        clean.disorder.reset();
        const RMatrix obs = run_realization(clean, nullptr, st.times);
        ctx.write("populations_clean.csv", observable_table(st.times, st.labels, obs));
        const RVector peak = obs.rowwise().maxCoeff();
        summary["clean_peak"] = std::vector<double>(peak.data(), peak.data() + peak.size());
    }
    // effective Markovian model, when every spin sits at a common in-gap detuning
    const double e0 = s.spins.front().detuning;
    const bool common = std::all_of(s.spins.begin(), s.spins.end(), [&](const SpinPlacement& p) { return p.detuning == e0; });
    if (common && distance_to_bands(band_intervals(spec, 2), e0) > 1e-6) {
        const EffectiveSpinModel m = spin_spin_couplings(spec, s.spins, e0);
        summary["effective_model"] = {{"couplings", matrix_json(m.couplings)},
                                      {"shifts", std::vector<double>(m.shifts.data(), m.shifts.data() + m.shifts.size())}};
    }
    ctx.out->summary = summary;
}

void task_edge_control(const ConfigNode& cfg, Context& ctx) {
    cfg.only({"name", "task", "description", "lattice", "spin", "time", "resonant_edge"});
    const LatticeSpec spec = lattice_at(cfg.at("lattice"));
    SpinPlacement spin = spin_from_json(cfg.at("spin"), spec);
    double t_max = 200.0;
    int n_times = 2001;
    if (cfg.has("time")) {
        const ConfigNode t = cfg.at("time");
        t.only({"t_max", "n_times"});
        t_max = t.number("t_max", t_max);
        n_times = t.integer("n_times", n_times);
        if (!(t_max > 0)) t.at("t_max").fail("must be > 0");
        if (n_times < 2) t.at("n_times").fail("must be >= 2");
    }
    const auto edges = find_edge_states(spec);
    if (edges.empty()) throw NumericalError("edge_control", "the chain has no edge states");
    const EdgeStateRecord* nearest = &edges.front();
    for (const auto& e : edges)
        if (std::abs(e.energy - spin.detuning) < std::abs(nearest->energy - spin.detuning)) nearest = &e;
    if (cfg.boolean("resonant_edge", false)) spin.detuning = nearest->energy;

    const SpinPlacement spins[] = {spin};
    const auto h = assemble_hamiltonian(spec, spins);
    CVector psi0 = CVector::Zero(h.dim());
    psi0[h.spin_index(0)] = 1.0;
    const std::vector<double> times = time_grid(t_max, n_times);
    const DynamicsTrace trace = propagate(h, psi0, times);

    std::vector<std::string> header = {"t", "spin"};
    for (int s = 0; s < h.n_sites; ++s) header.push_back(h.basis[s].name());
    CsvTable pops(header);
    double spin_min = 1.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<std::string> row = {cell(times[i]), cell(trace.population(i, h.spin_index(0)))};
        for (int s = 0; s < h.n_sites; ++s) row.push_back(cell(trace.population(i, s)));
        pops.row(std::move(row));
        spin_min = std::min(spin_min, trace.population(i, h.spin_index(0)));
    }
    ctx.write("populations.csv", pops);

    const int site = spec.site_index(spin.cell, spin.sublattice);
    Json summary = {{"spin_detuning", spin.detuning},
                    {"edge_energies", Json::array()},
                    {"nearest_edge_energy", nearest->energy},
                    {"g_edge_spin", spin.g * nearest->amplitudes[site]},
                    {"min_spin_population", spin_min}};
    for (const auto& e : edges) summary["edge_energies"].push_back(e.energy);

    if (edges.size() == 2 && spec.kind() == LatticeKind::dimer) {
        const EdgeCoupling ec = edge_coupling(spec, spin);
        summary["epsilon"] = ec.epsilon;
        summary["g_plus"] = ec.g_plus;
        summary["g_minus"] = ec.g_minus;
        if (std::abs(std::abs(ec.g_plus) - std::abs(ec.g_minus)) <= 1e-6 * std::abs(ec.g_plus)) {
            const double w0 = std::sqrt(ec.epsilon * ec.epsilon + 2.0 * ec.g_plus * ec.g_plus);
            CsvTable cf({"t", "ce_closed_form", "ce_numeric_re", "ce_numeric_im"});
            double worst = 0.0;
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double c = edge_spin_closed_form(ec.epsilon, ec.g_plus, ec.g_minus, times[i]);
                const cplx num = trace.amplitudes[i][h.spin_index(0)];
                cf.row({cell(times[i]), cell(c), cell(num.real()), cell(num.imag())});
                if (times[i] <= 2.0 * pi / w0) worst = std::max(worst, std::norm(num - c));
            }
            ctx.write("closed_form.csv", cf);
            summary["omega0"] = w0;
            summary["max_sq_deviation_one_period"] = worst;
        }
    }
    ctx.out->summary = summary;
}

void task_feasibility(const ConfigNode& cfg, Context& ctx) {
    cfg.only({"name", "task", "description"});
    const FeasibilityReport r = feasibility_report();
    const std::string text = format_report(r);
    {
        std::ofstream f(ctx.dir / "report.txt", std::ios::binary);
        f << text;
        ctx.out->files.push_back("report.txt");
    }
    // T is one J_hop period; J_hop = g^2 / delta with g = 1
    const double dev20 = adiabatic_elimination_check(1.0, 1.0, 20.0, 2.0 * pi * 20.0);
    const double dev10 = adiabatic_elimination_check(1.0, 1.0, 10.0, 2.0 * pi * 10.0);
    DeviceParams p;
    p.d_spin = 2.0 * pi * 100e12;
    p.v = 1e4;
    p.omega_m = 2.0 * pi * 5e9;
    p.rho = 3500.0;
    p.volume = r.volume_for_g;
    const Json summary = {
        {"J_over_2pi_Hz", r.J_over_2pi},
        {"g_over_2pi_Hz", r.g_over_2pi},
        {"Jij_scale_over_2pi_Hz", r.Jij_scale_over_2pi},
        {"Jij_nearest_over_2pi_Hz", r.Jij_nearest_over_2pi},
        {"gamma_i_over_2pi_Hz", r.gamma_i_over_2pi},
        {"gamma_s_over_2pi_Hz", r.gamma_s_over_2pi},
        {"coherence_margin", r.coherence_margin},
        {"volume_for_g_m3", r.volume_for_g},
        {"g_roundtrip_over_2pi_Hz", coupling_estimate(p) / (2.0 * pi)},
        {"J_hop_example_Hz", r.hopping_example},
        {"adiabatic_deviation_g_delta_1_20", dev20},
        {"adiabatic_deviation_g_delta_1_10", dev10},
        {"adiabatic_scaling_ratio", dev10 / dev20}};
    ctx.write("feasibility.json", summary);
    ctx.out->summary = summary;
}

} // namespace

RunOutput run_scenario(const Json& cfg_json, const fs::path& dir) {
    const ConfigNode cfg(cfg_json, "");
    if (!cfg_json.is_object()) cfg.fail("configuration must be a JSON object");
    RunOutput out;
    out.name = cfg.string("name", "config");
    out.config = cfg_json;
    fs::create_directories(dir);
    Context ctx{dir, &out};

    const std::string task = cfg.at("task").string();
    try {
        if (task == "bands")
            task_bands(cfg, ctx);
        else if (task == "bound_state")
            task_bound_state(cfg, ctx);
        else if (task == "decay")
            task_decay(cfg, ctx);
        else if (task == "dynamics")
            task_dynamics(cfg, ctx);
        else if (task == "edge_control")
            task_edge_control(cfg, ctx);
        else if (task == "feasibility")
            task_feasibility(cfg, ctx);
        else
            cfg.at("task").fail("unknown task '" + task +
                                "' (expected bands|bound_state|decay|dynamics|edge_control|feasibility)");
    } catch (const InvalidArgument& e) {
        throw ConfigError("", e.what());
    }
    ctx.write("summary.json", out.summary);
    return out;
}

} // namespace plq
