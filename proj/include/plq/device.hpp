#pragma once

#include <string>

#include "plq/common.hpp"

namespace plq {

/// Physical parameters of one phononic cavity with an embedded spin (SI units,
/// frequencies as angular frequencies in rad/s). delta_wg is the cavity to
/// waveguide-mode detuning, named apart from the lattice dimerization.
struct DeviceParams {
    double g1 = 0.0;
    double g2 = 0.0;
    double delta_wg = 0.0;
    double d_spin = 0.0;   ///< strain susceptibility, rad/s per unit strain
    double v = 0.0;        ///< sound speed, m/s
    double omega_m = 0.0;  ///< cavity mode frequency
    double rho = 0.0;      ///< density, kg/m^3
    double volume = 0.0;   ///< mode volume, m^3
    double xi = 1.0;       ///< strain weight at the defect

    /// g_i <= delta_wg / 5.
    bool adiabatic() const;
};

inline constexpr double hbar = 1.054571817e-34;

/// J_hop = g1 g2 / delta_wg.
double effective_hopping(double g1, double g2, double delta_wg);

/// Max over t in [0, T] of |P_1^exact(t) - P_1^eff(t)|, where P_1 is the
/// population of cavity 1 (initially excited) in the cavity-waveguide-cavity
/// model and in the two-cavity model with hopping J_hop.
double adiabatic_elimination_check(double g1, double g2, double delta_wg, double T,
                                   int n_times = 4001);

/// g = (d_spin / v) sqrt(hbar omega_m / (2 rho V)) xi.
double coupling_estimate(const DeviceParams& p);

/// Mode volume for which coupling_estimate returns g (other fields of p used as given).
double volume_for_coupling(const DeviceParams& p, double g);

struct FeasibilityReport {
    double J_over_2pi;            ///< Hz
    double g_over_2pi;            ///< Hz
    double Jij_scale_over_2pi;    ///< g^2 / J, Hz
    double Jij_nearest_over_2pi;  ///< dimer nearest-neighbour A-B coupling at delta = 0.3, Hz
    double gamma_i_over_2pi;      ///< cavity intrinsic damping, Hz
    double gamma_s_over_2pi;      ///< spin dephasing, Hz
    double volume_for_g;          ///< m^3, mode volume that yields g
    double hopping_example;       ///< J_hop / 2pi for the example waveguide coupling, Hz
    double coherence_margin;      ///< Jij_scale / max(gamma_i, gamma_s)
};

FeasibilityReport feasibility_report();
std::string format_report(const FeasibilityReport& r);

} // namespace plq
