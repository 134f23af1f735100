#include "plq/device.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "plq/dynamics.hpp"

namespace plq {

bool DeviceParams::adiabatic() const {
    return g1 <= std::abs(delta_wg) / 5.0 && g2 <= std::abs(delta_wg) / 5.0;
}

double effective_hopping(double g1, double g2, double delta_wg) {
    if (delta_wg == 0.0 || !std::isfinite(delta_wg))
        throw InvalidArgument("effective_hopping: waveguide detuning must be finite and nonzero");
    return g1 * g2 / delta_wg;
}

double adiabatic_elimination_check(double g1, double g2, double delta_wg, double T, int n_times) {
    if (!(T > 0.0)) throw InvalidArgument("adiabatic_elimination_check: T must be > 0");
    const double j_hop = effective_hopping(g1, g2, delta_wg);

    // basis (d1, f, d2)
    CMatrix exact = CMatrix::Zero(3, 3);
    exact(1, 1) = delta_wg;
    exact(0, 1) = exact(1, 0) = g1;
    exact(2, 1) = exact(1, 2) = g2;
    // two-cavity model as written, without the second-order Stark shifts
    CMatrix eff = CMatrix::Zero(2, 2);
    eff(0, 1) = eff(1, 0) = j_hop;

    const std::vector<double> times = time_grid(T, n_times);
    CVector a0 = CVector::Zero(3), b0 = CVector::Zero(2);
    a0[0] = 1.0;
    b0[0] = 1.0;
    const DynamicsTrace a = propagate(exact, a0, times);
    const DynamicsTrace b = propagate(eff, b0, times);
    double worst = 0.0;
    for (std::size_t t = 0; t < times.size(); ++t)
        worst = std::max(worst, std::abs(a.population(t, 0) - b.population(t, 0)));
    return worst;
}

namespace {

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw InvalidArgument(std::string("coupling_estimate: ") + name + " must be positive");
}

} // namespace

double coupling_estimate(const DeviceParams& p) {
    require_positive(p.d_spin, "d_spin");
    require_positive(p.v, "v");
    require_positive(p.omega_m, "omega_m");
    require_positive(p.rho, "rho");
    require_positive(p.volume, "volume");
    require_positive(p.xi, "xi");
    return p.d_spin / p.v * std::sqrt(hbar * p.omega_m / (2.0 * p.rho * p.volume)) * p.xi;
}

double volume_for_coupling(const DeviceParams& p, double g) {
    require_positive(g, "g");
    require_positive(p.d_spin, "d_spin");
    require_positive(p.v, "v");
    require_positive(p.omega_m, "omega_m");
    require_positive(p.rho, "rho");
    require_positive(p.xi, "xi");
    const double s = p.d_spin * p.xi / (p.v * g);
    return s * s * hbar * p.omega_m / (2.0 * p.rho);
}

FeasibilityReport feasibility_report() {
    const double two_pi = 2.0 * pi;
    DeviceParams p;
    p.d_spin = two_pi * 100e12;
    p.v = 1e4;
    p.omega_m = two_pi * 5e9;
    p.rho = 3500.0;
    p.xi = 1.0;

    FeasibilityReport r;
    r.J_over_2pi = 3e6;
    r.g_over_2pi = 1e6;
    r.Jij_scale_over_2pi = r.g_over_2pi * r.g_over_2pi / r.J_over_2pi;
    const double g = r.g_over_2pi / r.J_over_2pi;  // units of J
    r.Jij_nearest_over_2pi = std::abs(dimer_coupling_ab(1.0, 0.3, g, g, 0)) * r.J_over_2pi;
    r.gamma_i_over_2pi = 1e3;
    r.gamma_s_over_2pi = 100.0;
    r.volume_for_g = volume_for_coupling(p, two_pi * r.g_over_2pi);
    // waveguide couplings of 10 MHz detuned by 30 MHz
    r.hopping_example = effective_hopping(10e6, 10e6, 30e6);
    r.coherence_margin = r.Jij_scale_over_2pi / std::max(r.gamma_i_over_2pi, r.gamma_s_over_2pi);
    return r;
}

std::string format_report(const FeasibilityReport& r) {
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "J/2pi                      %.6g Hz\n"
                  "g/2pi                      %.6g Hz\n"
                  "J_ij scale g^2/J /2pi      %.6g Hz\n"
                  "J_ij nearest (delta=0.3)   %.6g Hz\n"
                  "gamma_i/2pi (cavity)       < %.6g Hz\n"
                  "gamma_s/2pi (spin)         %.6g Hz\n"
                  "J_ij / max(gamma)          %.6g\n"
                  "mode volume for g          %.6g m^3 (%.6g um^3)\n"
                  "J_hop/2pi (g_wg=10 MHz, detuning 30 MHz)  %.6g Hz\n",
                  r.J_over_2pi, r.g_over_2pi, r.Jij_scale_over_2pi, r.Jij_nearest_over_2pi,
                  r.gamma_i_over_2pi, r.gamma_s_over_2pi, r.coherence_margin, r.volume_for_g,
                  r.volume_for_g * 1e18, r.hopping_example);
    return buf;
}

} // namespace plq
