#include "plq/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "plq/rng.hpp"

namespace plq {

std::string to_string(LatticeKind k) { return k == LatticeKind::dimer ? "dimer" : "trimer"; }
std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }
std::string to_string(Sublattice s) {
    static const char* names[] = {"A", "B", "C"};
    return names[static_cast<int>(s)];
}

LatticeKind lattice_kind_from_string(const std::string& s) {
    if (s == "dimer") return LatticeKind::dimer;
    if (s == "trimer") return LatticeKind::trimer;
    throw InvalidArgument("unknown lattice kind '" + s + "' (expected dimer|trimer)");
}

Boundary boundary_from_string(const std::string& s) {
    if (s == "open") return Boundary::open;
    if (s == "periodic") return Boundary::periodic;
    throw InvalidArgument("unknown boundary '" + s + "' (expected open|periodic)");
}

Sublattice sublattice_from_string(const std::string& s) {
    if (s == "A" || s == "a") return Sublattice::A;
    if (s == "B" || s == "b") return Sublattice::B;
    if (s == "C" || s == "c") return Sublattice::C;
    throw InvalidArgument("unknown sublattice '" + s + "' (expected A|B|C)");
}

std::string to_string(DisorderKind k) {
    switch (k) {
    case DisorderKind::bond: return "bond";
    case DisorderKind::site: return "site";
    case DisorderKind::bond_subset: return "bond_subset";
    }
    return "?";
}

DisorderKind disorder_kind_from_string(const std::string& s) {
    if (s == "bond") return DisorderKind::bond;
    if (s == "site") return DisorderKind::site;
    if (s == "bond_subset") return DisorderKind::bond_subset;
    throw InvalidArgument("unknown disorder kind '" + s + "' (expected bond|site|bond_subset)");
}

LatticeSpec::LatticeSpec(LatticeKind kind, std::vector<double> hoppings, int n_cells,
                         Boundary boundary, double onsite)
    : kind_(kind), hoppings_(std::move(hoppings)), n_cells_(n_cells), boundary_(boundary),
      onsite_(onsite) {
    const std::size_t arity = kind_ == LatticeKind::dimer ? 2 : 3;
    if (hoppings_.size() != arity)
        throw InvalidArgument(to_string(kind_) + " lattice needs exactly " + std::to_string(arity) +
                              " hoppings, got " + std::to_string(hoppings_.size()));
    for (double j : hoppings_)
        if (!(j > 0.0) || !std::isfinite(j))
            throw InvalidArgument("hoppings must be positive and finite");
    if (n_cells_ < 1) throw InvalidArgument("n_cells must be >= 1");
    if (!std::isfinite(onsite_)) throw InvalidArgument("onsite energy must be finite");
}

int LatticeSpec::site_index(int cell, Sublattice s) const {
    if (cell < 0 || cell >= n_cells_ || !has_sublattice(s))
        throw InvalidArgument("site (" + std::to_string(cell) + ", " + to_string(s) +
                              ") is outside the " + std::to_string(n_cells_) + "-cell " +
                              to_string(kind_) + " lattice");
    return cell * cell_size() + static_cast<int>(s);
}

std::pair<int, int> LatticeSpec::bond_sites(int bond) const {
    return {bond, (bond + 1) % n_sites()};
}

double LatticeSpec::mean_hopping() const {
    if (kind_ != LatticeKind::dimer) throw InvalidArgument("mean_hopping: dimer lattices only");
    return 0.5 * (hoppings_[0] + hoppings_[1]);
}

double LatticeSpec::dimerization() const {
    if (kind_ != LatticeKind::dimer) throw InvalidArgument("dimerization: dimer lattices only");
    return (hoppings_[0] - hoppings_[1]) / (hoppings_[0] + hoppings_[1]);
}

LatticeSpec LatticeSpec::resized(int n_cells, Boundary boundary) const {
    return LatticeSpec(kind_, hoppings_, n_cells, boundary, onsite_);
}

LatticeSpec make_lattice(LatticeKind kind, std::vector<double> hoppings, int n_cells,
                         Boundary boundary) {
    return LatticeSpec(kind, std::move(hoppings), n_cells, boundary);
}

LatticeSpec make_dimer(double J, double delta, int n_cells, Boundary boundary) {
    return LatticeSpec(LatticeKind::dimer, {J * (1.0 + delta), J * (1.0 - delta)}, n_cells,
                       boundary);
}

DisorderRealization sample_disorder(const LatticeSpec& spec, DisorderKind kind, double W,
                                    std::uint64_t seed, std::vector<int> subset) {
    if (!(W >= 0.0) || !std::isfinite(W)) throw InvalidArgument("disorder width W must be >= 0");

    DisorderRealization d;
    d.kind = kind;
    d.width = W;
    d.seed = seed;
    switch (kind) {
    case DisorderKind::site:
        for (int s = 0; s < spec.n_sites(); ++s) d.targets.push_back(s);
        break;
    case DisorderKind::bond:
        for (int b = 0; b < spec.n_bonds(); ++b) d.targets.push_back(b);
        break;
    case DisorderKind::bond_subset: {
        std::sort(subset.begin(), subset.end());
        subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
        if (subset.empty()) throw InvalidArgument("bond_subset disorder needs a non-empty subset");
        for (int p : subset)
            if (p < 0 || p >= spec.cell_size())
                throw InvalidArgument("bond_subset index " + std::to_string(p) + " out of range");
        for (int b = 0; b < spec.n_bonds(); ++b)
            if (std::binary_search(subset.begin(), subset.end(), spec.bond_pattern(b)))
                d.targets.push_back(b);
        d.subset = std::move(subset);
        break;
    }
    }
    // counter = target index: a bond keeps its offset whatever subset it belongs to
    const CounterStream stream(seed);
    d.offsets.reserve(d.targets.size());
    for (int t : d.targets) d.offsets.push_back(stream.symmetric(static_cast<std::uint64_t>(t), W));
    return d;
}

void validate_disorder(const LatticeSpec& spec, const DisorderRealization& d) {
    if (d.targets.size() != d.offsets.size())
        throw InvalidArgument("disorder: offsets and targets differ in length");
    const int limit = d.kind == DisorderKind::site ? spec.n_sites() : spec.n_bonds();
    for (int t : d.targets)
        if (t < 0 || t >= limit)
            throw InvalidArgument("disorder target " + std::to_string(t) +
                                  " does not exist in this lattice");
    for (double x : d.offsets)
        if (std::abs(x) > 0.5 * d.width * (1.0 + 1e-15))
            throw InvalidArgument("disorder offset exceeds W/2");
}

SpinPlacement spin_at_cavity(const LatticeSpec& spec, int cavity, double g, double detuning) {
    if (cavity < 1 || cavity > spec.n_sites())
        throw InvalidArgument("cavity " + std::to_string(cavity) + " outside 1.." +
                              std::to_string(spec.n_sites()));
    const int site = cavity - 1;
    return {spec.cell_of(site), spec.sublattice_of(site), g, detuning};
}

std::string BasisLabel::name() const {
    if (type == Type::spin) return "spin" + std::to_string(spin + 1);
    static const char* lower[] = {"a", "b", "c"};
    return lower[static_cast<int>(sublattice)] + std::to_string(cell);
}

CMatrix phonon_matrix(const LatticeSpec& spec, const DisorderRealization* disorder) {
    const int n = spec.n_sites();
    CMatrix h = CMatrix::Zero(n, n);
    for (int s = 0; s < n; ++s) h(s, s) = spec.onsite();

    std::vector<double> bond_offset(spec.n_bonds(), 0.0);
    if (disorder) {
        validate_disorder(spec, *disorder);
        for (std::size_t i = 0; i < disorder->targets.size(); ++i) {
            if (disorder->kind == DisorderKind::site)
                h(disorder->targets[i], disorder->targets[i]) += disorder->offsets[i];
            else
                bond_offset[disorder->targets[i]] += disorder->offsets[i];
        }
    }
    for (int b = 0; b < spec.n_bonds(); ++b) {
        const auto [i, j] = spec.bond_sites(b);
        const double t = -(spec.bond_hopping(b) + bond_offset[b]);
        h(i, j) += t;
        h(j, i) += t;
    }
    return h;
}

SingleExcitationHamiltonian assemble_hamiltonian(const LatticeSpec& spec,
                                                 const DisorderRealization* disorder,
                                                 std::span<const SpinPlacement> spins,
                                                 bool allow_shared_sites) {
    SingleExcitationHamiltonian out;
    out.n_sites = spec.n_sites();
    out.n_spins = static_cast<int>(spins.size());
    out.matrix = CMatrix::Zero(out.dim(), out.dim());
    out.matrix.topLeftCorner(out.n_sites, out.n_sites) = phonon_matrix(spec, disorder);

    out.basis.reserve(out.dim());
    for (int s = 0; s < out.n_sites; ++s)
        out.basis.push_back({BasisLabel::Type::phonon, spec.cell_of(s), spec.sublattice_of(s), -1});

    std::set<int> used;
    for (int k = 0; k < out.n_spins; ++k) {
        const SpinPlacement& p = spins[k];
        const int site = spec.site_index(p.cell, p.sublattice);
        if (!used.insert(site).second && !allow_shared_sites)
            throw InvalidArgument("two spins placed on site (" + std::to_string(p.cell) + ", " +
                                  to_string(p.sublattice) + ")");
        if (!std::isfinite(p.g) || !std::isfinite(p.detuning))
            throw InvalidArgument("spin parameters must be finite");
        const int row = out.spin_index(k);
        out.matrix(row, row) = p.detuning;
        out.matrix(row, site) = p.g;
        out.matrix(site, row) = p.g;
        out.basis.push_back({BasisLabel::Type::spin, p.cell, p.sublattice, k});
    }
    return out;
}

SingleExcitationHamiltonian assemble_hamiltonian(const LatticeSpec& spec,
                                                 std::span<const SpinPlacement> spins) {
    return assemble_hamiltonian(spec, nullptr, spins, false);
}

void add_spin_exchange(SingleExcitationHamiltonian& h, int spin_i, int spin_j, double value) {
    if (spin_i == spin_j || spin_i < 0 || spin_j < 0 || spin_i >= h.n_spins || spin_j >= h.n_spins)
        throw InvalidArgument("add_spin_exchange: invalid spin pair");
    h.matrix(h.spin_index(spin_i), h.spin_index(spin_j)) += value;
    h.matrix(h.spin_index(spin_j), h.spin_index(spin_i)) += value;
}

void add_spin_shift(SingleExcitationHamiltonian& h, int spin, double value) {
    if (spin < 0 || spin >= h.n_spins) throw InvalidArgument("add_spin_shift: invalid spin");
    h.matrix(h.spin_index(spin), h.spin_index(spin)) += value;
}

} // namespace plq
