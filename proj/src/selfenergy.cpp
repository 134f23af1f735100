#include "plq/selfenergy.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "plq/bloch.hpp"
#include "plq/util.hpp"

namespace plq {

namespace {

void check_delta(double delta, const char* who) {
    if (!(std::abs(delta) < 1.0)) throw InvalidArgument(std::string(who) + ": |delta| must be < 1");
}

cplx ipow(cplx y, int n) {
    cplx r = 1.0;
    for (int i = 0; i < n; ++i) r *= y;
    return r;
}

} // namespace

std::string to_string(PairKind p) {
    switch (p) {
    case PairKind::same: return "AA";
    case PairKind::ab: return "AB";
    case PairKind::ba: return "BA";
    }
    return "?";
}

YRoots y_roots(cplx z, double J, double delta) {
    check_delta(delta, "y_roots");
    const double J2 = J * J;
    const cplx z2 = z * z;
    const cplx disc = z2 * z2 - 4.0 * J2 * (1.0 + delta * delta) * z2 + 16.0 * J2 * J2 * delta * delta;
    const cplx root = std::sqrt(disc);
    const double denom = 2.0 * J2 * (1.0 - delta * delta);
    YRoots r;
    r.y_plus = (z2 - 2.0 * J2 * (1.0 + delta * delta) + root) / denom;
    r.y_minus = (z2 - 2.0 * J2 * (1.0 + delta * delta) - root) / denom;
    const double ap = std::abs(r.y_plus), am = std::abs(r.y_minus);
    if (std::abs(ap - am) <= 1e-12 * std::max(1.0, std::max(ap, am)))
        throw NumericalError("y_roots", "branch point |y+| = |y-| (z on a band)");
    if (ap < am) {
        r.y_min = r.y_plus;
        r.branch = Branch::y_plus;
    } else {
        r.y_min = r.y_minus;
        r.branch = Branch::y_minus;
    }
    return r;
}

SelfEnergyValue sigma_dimer(cplx z, double J, double delta, double g, int x_ij, PairKind pair) {
    check_delta(delta, "sigma_dimer");
    if (z.imag() < 0.0) throw InvalidArgument("sigma_dimer: retarded evaluation needs Im z > 0");
    if (z.imag() == 0.0) {
        const double a = std::abs(z.real());
        if (a >= 2.0 * std::abs(J * delta) && a <= 2.0 * std::abs(J))
            throw NumericalError("sigma_dimer", "real z = " + std::to_string(z.real()) +
                                                    " lies on a band");
    }
    const YRoots y = y_roots(z, J, delta);
    const cplx z2 = z * z;
    const double J2 = J * J;
    // same square root as in y_roots; the sign rule makes the result branch independent
    const cplx root = std::sqrt(z2 * z2 - 4.0 * J2 * (1.0 + delta * delta) * z2 +
                                16.0 * J2 * J2 * delta * delta);
    const double sign = y.branch == Branch::y_plus ? 1.0 : -1.0;

    cplx value;
    if (pair == PairKind::same) {
        value = sign * (-g * g * z * ipow(y.y_min, std::abs(x_ij))) / root;
    } else {
        const int x = pair == PairKind::ab ? x_ij : -x_ij;
        value = sign * g * g * J *
                ((1.0 + delta) * ipow(y.y_min, std::abs(x)) +
                 (1.0 - delta) * ipow(y.y_min, std::abs(x + 1))) /
                root;
    }
    return {value, y.branch, pair};
}

double gamma_single_dimer(double omega, double J, double delta, double g) {
    check_delta(delta, "gamma_single_dimer");
    const double w2 = omega * omega;
    const double lower = 4.0 * J * J * delta * delta, upper = 4.0 * J * J;
    if (!(w2 > lower && w2 < upper))
        throw NumericalError("gamma_single_dimer",
                             "omega = " + std::to_string(omega) + " is not strictly inside a band");
    return 2.0 * g * g * std::abs(omega) / std::sqrt((upper - w2) * (w2 - lower));
}

double dimer_resonant_k(double omega, double J, double delta) {
    const double c = (omega * omega / (J * J) - 2.0 * (1.0 + delta * delta)) /
                     (2.0 * (1.0 - delta * delta));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double gamma_dimer(double omega, double J, double delta, double g, int x_ij, PairKind pair) {
    const double gamma_e = gamma_single_dimer(omega, J, delta, g);
    const double k = dimer_resonant_k(omega, J, delta);
    // Both bands contribute with the same sign to the same-sublattice rate, so no
    // sign(omega) factor there; it only enters through the odd A-B matrix element.
    if (pair == PairKind::same) return gamma_e * std::cos(k * x_ij);
    const double phi = dimer_phase(J * (1.0 + delta), J * (1.0 - delta), k);
    const double s = omega > 0 ? 1.0 : -1.0;
    return pair == PairKind::ab ? s * gamma_e * std::cos(k * x_ij - phi)
                                : s * gamma_e * std::cos(k * x_ij + phi);
}

std::vector<SuperradiantPoint> superradiant_points(double J, double delta, int x_ij) {
    check_delta(delta, "superradiant_points");
    if (x_ij < 1) throw InvalidArgument("superradiant_points: x_ij must be >= 1");
    const double J1 = J * (1.0 + delta), J2 = J * (1.0 - delta);
    // phase theta(k) = k x - phi(k); |Gamma^AB| = Gamma_e where sin(theta) = 0
    auto f = [&](double k) { return std::sin(k * x_ij - dimer_phase(J1, J2, k)); };

    // band edges k = 0 and k = pi are always roots; search strictly inside
    const int n = 8192;
    const double eps = 1e-9;
    std::vector<SuperradiantPoint> out;
    double k_prev = eps, f_prev = f(k_prev);
    for (int i = 1; i <= n; ++i) {
        const double k = eps + (pi - 2.0 * eps) * i / n;
        const double fk = f(k);
        if (f_prev == 0.0 || (f_prev < 0.0) != (fk < 0.0)) {
            double a = k_prev, b = k, fa = f_prev;
            for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            const double kr = 0.5 * (a + b);
            const double c = std::cos(kr * x_ij - dimer_phase(J1, J2, kr));
            out.push_back({dimer_dispersion(J, delta, kr).upper, kr, c > 0.0});
        }
        k_prev = k;
        f_prev = fk;
    }
    std::sort(out.begin(), out.end(),
              [](const SuperradiantPoint& a, const SuperradiantPoint& b) { return a.omega < b.omega; });
    return out;
}

cplx kspace_propagator(const LatticeSpec& spec, cplx z, Sublattice m, Sublattice n, int dx,
                       int n_k, const GaugeHook& gauge) {
    if (!spec.has_sublattice(m) || !spec.has_sublattice(n))
        throw InvalidArgument("kspace_propagator: sublattice not present in this lattice");
    const int im = static_cast<int>(m), in = static_cast<int>(n);
    CompensatedSum sum;
    for (double k : k_grid(n_k)) {
        BlochDiagonalization d = diagonalize_kernel(bloch_kernel(spec, k), k);
        if (gauge)
            for (int s = 0; s < d.energies.size(); ++s) d.modes.col(s) *= gauge(k, s);
        cplx term = 0.0;
        for (int s = 0; s < d.energies.size(); ++s)
            term += d.modes(in, s) * std::conj(d.modes(im, s)) / (z - d.energies[s]);
        sum.add(std::exp(cplx(0.0, k * dx)) * term);
    }
    return sum.value() / static_cast<double>(n_k);
}

cplx sigma_trimer(cplx z, const LatticeSpec& spec, Sublattice m, Sublattice n, int x_ij, int n_k,
                  double g, const GaugeHook& gauge) {
    if (n_k < 256) throw InvalidArgument("sigma_trimer: n_k must be >= 256");
    if (z.imag() < 0.0) throw InvalidArgument("sigma_trimer: needs Im z >= 0");
    if (z.imag() == 0.0) {
        const double d = distance_to_bands(band_intervals(spec, 2), z.real());
        if (d <= 1e-6)
            throw NumericalError("sigma_trimer", "z = " + std::to_string(z.real()) +
                                                     " is on or within 1e-6 of a band");
    }
    return g * g * kspace_propagator(spec, z, m, n, x_ij, n_k, gauge);
}

namespace {

double band_energy(const LatticeSpec& spec, int band, double k) {
    return diagonalize_kernel(bloch_kernel(spec, k), k).energies[band];
}

double gamma_at_k(const LatticeSpec& spec, int band, int m, double k, double g) {
    constexpr double h = 1e-5;
    const BlochDiagonalization d = diagonalize_kernel(bloch_kernel(spec, k), k);
    const double weight = std::norm(d.modes(m, band));
    const double vg = (band_energy(spec, band, k + h) - band_energy(spec, band, k - h)) / (2.0 * h);
    return 2.0 * g * g * weight / std::abs(vg);
}

} // namespace

double gamma_trimer(double omega, const LatticeSpec& spec, Sublattice m, double g) {
    if (!spec.has_sublattice(m)) throw InvalidArgument("gamma_trimer: sublattice not present");
    const int im = static_cast<int>(m);
    // k = 0 and k = pi hold every band extremum for these chains
    const auto bands = band_intervals(spec, 2);
    int band = -1;
    for (int b = 0; b < static_cast<int>(bands.size()); ++b)
        if (omega >= bands[b].lo && omega <= bands[b].hi) band = b;
    if (band < 0)
        throw NumericalError("gamma_trimer", "omega = " + std::to_string(omega) +
                                                 " is not inside a band");

    // the band is monotone on [0, pi]; its edges sit at k = 0 and k = pi
    const double e0 = band_energy(spec, band, 0.0), epi = band_energy(spec, band, pi);
    const double tol = 1e-12 * std::max(1.0, std::abs(omega));
    double k = -1.0;
    if (std::abs(omega - e0) <= tol) k = 0.0;
    if (std::abs(omega - epi) <= tol) k = pi;

    if (k < 0.0) {
        double a = 0.0, b = pi;
        const bool increasing = epi > e0;
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            const double mid = 0.5 * (a + b);
            if ((band_energy(spec, band, mid) < omega) == increasing)
                a = mid;
            else
                b = mid;
        }
        k = 0.5 * (a + b);
        constexpr double h = 1e-5;
        const double vg =
            (band_energy(spec, band, k + h) - band_energy(spec, band, k - h)) / (2.0 * h);
        if (std::abs(vg) > 1e-8) {
            const BlochDiagonalization d = diagonalize_kernel(bloch_kernel(spec, k), k);
            return 2.0 * g * g * std::norm(d.modes(im, band)) / std::abs(vg);
        }
        k = k < 0.5 * pi ? 0.0 : pi;
    }

    // at a band edge: finite only if the sublattice weight vanishes as well
    const BlochDiagonalization d = diagonalize_kernel(bloch_kernel(spec, k), k);
    if (std::norm(d.modes(im, band)) > 1e-8)
        throw NumericalError("gamma_trimer", "band-edge divergence (v_g -> 0) at omega = " +
                                                 std::to_string(omega));
    const double dir = k < 0.5 * pi ? 1.0 : -1.0;
    const double s = 1e-3;
    // linear extrapolation; the rate is non-negative by construction
    return std::max(0.0, 2.0 * gamma_at_k(spec, band, im, k + dir * s, g) -
                             gamma_at_k(spec, band, im, k + dir * 2.0 * s, g));
}

cplx greens_oracle(const LatticeSpec& spec, cplx z, SiteRef i, SiteRef j, int n_sites, double eta,
                   double g) {
    if (n_sites < 500) throw InvalidArgument("greens_oracle: n_sites must be >= 500");
    if (eta < 0.0) throw InvalidArgument("greens_oracle: eta must be >= 0");
    const int n_cells = n_sites / spec.cell_size();
    const LatticeSpec chain = spec.resized(n_cells, Boundary::open);
    const int center = n_cells / 2;
    const int si = chain.site_index(center + i.cell, i.sublattice);
    const int sj = chain.site_index(center + j.cell, j.sublattice);

    const cplx zz = z + cplx(0.0, eta);
    if (zz.imag() == 0.0 && distance_to_bands(band_intervals(spec, 2), zz.real()) == 0.0)
        throw InvalidArgument("greens_oracle: in-band z needs eta > 0");

    const int n = chain.n_sites();
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(3 * n);
    for (int s = 0; s < n; ++s) entries.emplace_back(s, s, zz - chain.onsite());
    for (int bnd = 0; bnd < chain.n_bonds(); ++bnd) {
        const auto [p, q] = chain.bond_sites(bnd);
        const double t = chain.bond_hopping(bnd);  // (z - H) has +J off the diagonal
        entries.emplace_back(p, q, t);
        entries.emplace_back(q, p, t);
    }
    Eigen::SparseMatrix<cplx> a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw NumericalError("greens_oracle", "singular resolvent (z is an eigenvalue)");
    CVector rhs = CVector::Zero(n);
    rhs[si] = 1.0;
    const CVector col = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !col.allFinite())
        throw NumericalError("greens_oracle", "linear solve failed");
    return g * g * col[sj];
}

} // namespace plq
