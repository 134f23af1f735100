#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plq/common.hpp"

namespace plq {

enum class LatticeKind { dimer, trimer };
enum class Boundary { open, periodic };
enum class Sublattice : int { A = 0, B = 1, C = 2 };

std::string to_string(LatticeKind k);
std::string to_string(Boundary b);
std::string to_string(Sublattice s);
LatticeKind lattice_kind_from_string(const std::string& s);
Boundary boundary_from_string(const std::string& s);
Sublattice sublattice_from_string(const std::string& s);

/// Sites are laid out cell by cell: (0,A), (0,B), [(0,C)], (1,A), ...
/// Bond b joins sites b and b+1 and carries hoppings()[b % cell_size()];
/// a periodic chain adds the wrap bond (n_sites-1 -> 0).
/// All energies are in units of J and measured from the cavity frequency.
class LatticeSpec {
public:
    LatticeSpec(LatticeKind kind, std::vector<double> hoppings, int n_cells,
                Boundary boundary = Boundary::open, double onsite = 0.0);

    LatticeKind kind() const { return kind_; }
    const std::vector<double>& hoppings() const { return hoppings_; }
    int n_cells() const { return n_cells_; }
    Boundary boundary() const { return boundary_; }
    double onsite() const { return onsite_; }

    int cell_size() const { return static_cast<int>(hoppings_.size()); }
    int n_sites() const { return n_cells_ * cell_size(); }
    int n_bonds() const { return boundary_ == Boundary::open ? n_sites() - 1 : n_sites(); }

    /// Site index of (cell, sublattice); throws InvalidArgument when out of range.
    int site_index(int cell, Sublattice s) const;
    int cell_of(int site) const { return site / cell_size(); }
    Sublattice sublattice_of(int site) const { return static_cast<Sublattice>(site % cell_size()); }
    bool has_sublattice(Sublattice s) const { return static_cast<int>(s) < cell_size(); }

    /// Hopping pattern index (0 for J1/J_a, ...) of a bond.
    int bond_pattern(int bond) const { return bond % cell_size(); }
    double bond_hopping(int bond) const { return hoppings_[bond_pattern(bond)]; }
    std::pair<int, int> bond_sites(int bond) const;

    /// Dimer only: J = (J1+J2)/2.
    double mean_hopping() const;
    /// Dimer only: delta = (J1-J2)/(J1+J2).
    double dimerization() const;

    /// Same hoppings and kind, different size or boundary.
    LatticeSpec resized(int n_cells, Boundary boundary) const;

    bool operator==(const LatticeSpec&) const = default;

private:
    LatticeKind kind_;
    std::vector<double> hoppings_;
    int n_cells_;
    Boundary boundary_;
    double onsite_;
};

LatticeSpec make_lattice(LatticeKind kind, std::vector<double> hoppings, int n_cells,
                         Boundary boundary = Boundary::open);

/// Dimer with J1 = J(1+delta), J2 = J(1-delta).
LatticeSpec make_dimer(double J, double delta, int n_cells, Boundary boundary = Boundary::open);

enum class DisorderKind { bond, site, bond_subset };
std::string to_string(DisorderKind k);
DisorderKind disorder_kind_from_string(const std::string& s);

/// Random offsets (units of J) applied either to bonds or to site energies.
/// `targets[i]` is the bond or site index that receives `offsets[i]`.
struct DisorderRealization {
    DisorderKind kind = DisorderKind::bond;
    std::vector<int> subset;   ///< hopping-pattern indices for bond_subset
    std::vector<int> targets;
    std::vector<double> offsets;
    double width = 0.0;        ///< offsets lie in [-width/2, width/2]
    std::uint64_t seed = 0;

    bool operator==(const DisorderRealization&) const = default;
};

/// Uniform i.i.d. offsets on [-W/2, W/2]; element i draws from counter i of the
/// stream keyed by `seed`, so the result is independent of evaluation order.
DisorderRealization sample_disorder(const LatticeSpec& spec, DisorderKind kind, double W,
                                    std::uint64_t seed, std::vector<int> subset = {});

/// Throws InvalidArgument if the realization does not fit the spec.
void validate_disorder(const LatticeSpec& spec, const DisorderRealization& d);

struct SpinPlacement {
    int cell = 0;
    Sublattice sublattice = Sublattice::A;
    double g = 0.3;
    double detuning = 0.0;  ///< omega_sigma - omega_m

    bool operator==(const SpinPlacement&) const = default;
};

/// Placement addressed by 1-based cavity number along the chain (cavity 1 = cell 0, A).
SpinPlacement spin_at_cavity(const LatticeSpec& spec, int cavity, double g, double detuning);

struct BasisLabel {
    enum class Type { phonon, spin } type = Type::phonon;
    int cell = 0;
    Sublattice sublattice = Sublattice::A;
    int spin = -1;

    /// "a3", "b0", ... for phonon sites; "spin1", "spin2", ... (1-based) for spins.
    std::string name() const;
};

struct SingleExcitationHamiltonian {
    CMatrix matrix;
    std::vector<BasisLabel> basis;
    int n_sites = 0;
    int n_spins = 0;

    int dim() const { return n_sites + n_spins; }
    int spin_index(int spin) const { return n_sites + spin; }
};

/// Full single-excitation Hamiltonian over phonon sites followed by spins.
/// Bonds enter as -(J_bond + xi_bond); site energies as onsite + xi_site;
/// each spin has diagonal Delta and couples with g to its own site only.
SingleExcitationHamiltonian assemble_hamiltonian(const LatticeSpec& spec,
                                                 const DisorderRealization* disorder,
                                                 std::span<const SpinPlacement> spins,
                                                 bool allow_shared_sites = false);

SingleExcitationHamiltonian assemble_hamiltonian(const LatticeSpec& spec,
                                                 std::span<const SpinPlacement> spins = {});

/// Extra spin-spin exchange (value * (s_i^+ s_j^- + h.c.)) and spin energy shifts;
/// used to model externally applied compensation fields.
void add_spin_exchange(SingleExcitationHamiltonian& h, int spin_i, int spin_j, double value);
void add_spin_shift(SingleExcitationHamiltonian& h, int spin, double value);

/// Bare phonon block (no spins) as a dense matrix.
CMatrix phonon_matrix(const LatticeSpec& spec, const DisorderRealization* disorder = nullptr);

} // namespace plq
