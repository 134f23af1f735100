#pragma once

#include <vector>

#include "plq/common.hpp"
#include "plq/lattice.hpp"

namespace plq {

struct DimerBands {
    double upper;
    double lower;
};

/// omega(k) = J sqrt(2(1+delta^2) + 2(1-delta^2) cos k); returns (+omega, -omega).
DimerBands dimer_dispersion(double J, double delta, double k);

/// arg(-J1 - J2 e^{-ik}) in (-pi, pi].
double dimer_phase(double J1, double J2, double k);

/// Momentum-space kernel in the (a_k, b_k[, c_k]) basis, diagonal = onsite energy.
CMatrix bloch_kernel(const LatticeSpec& spec, double k);

struct BlochDiagonalization {
    double k = 0.0;
    RVector energies;  ///< ascending
    CMatrix modes;     ///< column s is the eigenvector of band s (M in H(k) = M D M^dagger)
};

/// Sorted eigenpairs of a small Hermitian kernel. Gauge: largest component of each
/// eigenvector real-positive; degenerate energies ordered lexicographically by eigenvector.
BlochDiagonalization diagonalize_kernel(const CMatrix& kernel, double k = 0.0);

/// n_k points k_i = -pi + 2 pi (i+1)/n_k, i.e. uniform over (-pi, pi].
std::vector<double> k_grid(int n_k);

struct BandPoint {
    double k;
    int band;
    double omega;
};

/// Ordered by k, then band index.
std::vector<BandPoint> band_structure(const LatticeSpec& spec, int n_k);

struct BandInterval {
    double lo;
    double hi;
};

/// Energy range of each bulk band; extrema sampled on a uniform grid that
/// contains k = 0 and k = pi whenever n_k is even.
std::vector<BandInterval> band_intervals(const LatticeSpec& spec, int n_k = 1024);

/// Distance from E to the nearest bulk band (0 when inside a band).
double distance_to_bands(const std::vector<BandInterval>& bands, double energy);

enum class EdgeSide { left, right, both };
std::string to_string(EdgeSide s);

struct EdgeStateRecord {
    double energy = 0.0;
    EdgeSide side = EdgeSide::both;
    double side_weight = 0.0;  ///< outer-quarter weight on the labelled side(s)
    RVector amplitudes;        ///< real eigenvector over the chain sites
    RVector weights;           ///< |amplitude|^2 per site
};

/// In-gap eigenstates of the bare open chain with more than half of their weight
/// in an outer quarter. Near-degenerate in-gap clusters are rotated into maximally
/// localized combinations before classification.
std::vector<EdgeStateRecord> find_edge_states(const LatticeSpec& spec);

} // namespace plq
