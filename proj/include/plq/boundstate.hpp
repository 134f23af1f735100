#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plq/bloch.hpp"
#include "plq/common.hpp"
#include "plq/lattice.hpp"

namespace plq {

enum class ProfileSource { analytic, fourier, numeric };
std::string to_string(ProfileSource s);

struct SiteAmplitude {
    int cell;
    Sublattice sublattice;
    cplx amplitude;
};

/// Stationary single-excitation state: spin amplitude(s) plus phonon cloud.
/// Profiles are normalized so that sum |spin|^2 + sum |C_{j,n}|^2 = 1.
struct BoundStateProfile {
    double energy = 0.0;
    cplx spin_amplitude = 0.0;          ///< C_e of the first (or only) spin
    std::vector<cplx> spin_amplitudes;  ///< all spins, numeric profiles only
    std::vector<SiteAmplitude> sites;   ///< ordered by cell, then sublattice
    ProfileSource source = ProfileSource::numeric;

    /// Amplitude on (cell, sublattice), zero when the site is not listed.
    cplx amplitude(int cell, Sublattice s) const;
    double spin_weight() const;
    double phonon_weight() const;
};

/// Closed-form zero-energy chiral profile of a dimer (delta > 0) with the spin at
/// cell 0, truncated to cells [j_min, j_max] and normalized.
BoundStateProfile dimer_chiral_profile(double J, double delta, Sublattice sublattice, double g,
                                       int j_min, int j_max);

/// Real-space profile from the Bloch Green's function,
/// C_{j,n} = g C_e G_{(j,n),(0,m)}(E_BS), for a spin on sublattice m at cell 0.
BoundStateProfile profile_from_kspace(const LatticeSpec& spec, Sublattice m, double energy,
                                      double g, int n_k, int j_min, int j_max);

/// In-gap eigenstates of H (gaps from the bulk bands of `clean`) with spin weight
/// above 0.01, sorted by |E|. Degenerate eigenvalues are rotated so that the spin
/// weight is concentrated in as few states as possible.
std::vector<BoundStateProfile> numeric_bound_states(const SingleExcitationHamiltonian& h,
                                                    const LatticeSpec& clean);

struct ChiralityMetrics {
    double left_weight = 0.0;   ///< phonon weight on sites left of the spin's site
    double right_weight = 0.0;
    double spin_site_weight = 0.0;
    double sublattice_weight[3] = {0.0, 0.0, 0.0};
    double chirality = 0.0;     ///< 1 - forbidden-side weight / phonon weight
};

/// `forbidden` must be left or right.
ChiralityMetrics chirality_metrics(const BoundStateProfile& profile, int cell_size, int spin_cell,
                                   Sublattice spin_sublattice, EdgeSide forbidden);

/// Side on which the clean bound state of a spin on sublattice m at energy E has
/// (numerically) no phonon weight; nullopt when the clean state is two-sided.
std::optional<EdgeSide> predicted_forbidden_side(const LatticeSpec& spec, Sublattice m,
                                                 double energy);

struct ChiralitySample {
    std::uint64_t seed;
    double energy;
    double chirality;
};

/// Disorder ensemble for a single spin on a finite chain: for each realization,
/// the bound state closest to the spin's detuning is scored against the clean
/// prediction at that energy.
/// Realizations run concurrently; results are ordered by realization index.
std::vector<ChiralitySample> chirality_ensemble(const LatticeSpec& spec, const SpinPlacement& spin,
                                                DisorderKind kind, double W,
                                                const std::vector<int>& subset, int n_realizations,
                                                std::uint64_t master_seed);

} // namespace plq
