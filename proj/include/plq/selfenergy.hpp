#pragma once

#include <functional>
#include <vector>

#include "plq/common.hpp"
#include "plq/lattice.hpp"

namespace plq {

enum class Branch { y_plus, y_minus };
/// Sublattices of spins (i, j): same (AA or BB), ab (i on A, j on B), ba.
enum class PairKind { same, ab, ba };

std::string to_string(PairKind p);

struct YRoots {
    cplx y_plus;
    cplx y_minus;
    cplx y_min;  ///< root of smaller modulus
    Branch branch;
};

/// Roots of the dimer lattice propagator; y_plus * y_minus = 1.
/// Throws NumericalError at a branch point (|y+| == |y-|, i.e. on a band).
YRoots y_roots(cplx z, double J, double delta);

struct SelfEnergyValue {
    cplx value;
    Branch branch;
    PairKind pair;
};

/// Closed-form dimer self-energy between spins i and j (x_ij = x_j - x_i in cells).
/// Real z must lie outside both bands; complex z must have Im z > 0 (retarded).
SelfEnergyValue sigma_dimer(cplx z, double J, double delta, double g, int x_ij, PairKind pair);

/// Single-spin Markovian decay rate 2 g^2 |w| / sqrt((4J^2 - w^2)(w^2 - 4J^2 delta^2)).
double gamma_single_dimer(double omega, double J, double delta, double g);

/// Collective decay rate of a spin pair resonant with a band (2J|delta| < |omega| < 2J).
double gamma_dimer(double omega, double J, double delta, double g, int x_ij, PairKind pair);

/// Wave number in [0, pi] of the band state at energy omega.
double dimer_resonant_k(double omega, double J, double delta);

struct SuperradiantPoint {
    double omega;
    double k;
    bool super;  ///< true: Gamma_ij = +Gamma_e, false: Gamma_ij = -Gamma_e
};

/// Frequencies in the upper band where |Gamma_ij^{AB}| = Gamma_e.
std::vector<SuperradiantPoint> superradiant_points(double J, double delta, int x_ij);

/// Optional per-(k, band) phase applied to the eigenvectors; used to check gauge freedom.
using GaugeHook = std::function<cplx(double k, int band)>;

/// (1/n_k) sum_k e^{ik dx} [ (z - H(k))^{-1} ]_{n m}, evaluated through the band
/// eigen-decomposition with compensated summation.
cplx kspace_propagator(const LatticeSpec& spec, cplx z, Sublattice m, Sublattice n, int dx,
                       int n_k, const GaugeHook& gauge = {});

/// Self-energy from a k-integral over the bands of any lattice: spin i on sublattice m,
/// spin j on sublattice n, x_ij = x_j - x_i.
cplx sigma_trimer(cplx z, const LatticeSpec& spec, Sublattice m, Sublattice n, int x_ij,
                  int n_k, double g, const GaugeHook& gauge = {});

/// Markovian decay 2 g^2 |V_m|^2 / |v_g| of a spin resonant with a band of `spec`.
double gamma_trimer(double omega, const LatticeSpec& spec, Sublattice m, double g);

struct SiteRef {
    int cell;  ///< relative to the central cell of the oracle chain
    Sublattice sublattice;
};

/// Brute-force g^2 [(z + i eta - H)^{-1}]_{j,i} on an open chain of about n_sites sites.
cplx greens_oracle(const LatticeSpec& spec, cplx z, SiteRef i, SiteRef j, int n_sites,
                   double eta, double g);

} // namespace plq
