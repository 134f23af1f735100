#include "plq/bloch.hpp"

#include <algorithm>
#include <cmath>

#include "plq/linalg.hpp"

namespace plq {

DimerBands dimer_dispersion(double J, double delta, double k) {
    if (!(std::abs(delta) < 1.0)) throw InvalidArgument("dimer_dispersion: |delta| must be < 1");
    const double arg = 2.0 * (1.0 + delta * delta) + 2.0 * (1.0 - delta * delta) * std::cos(k);
    const double w = std::abs(J) * std::sqrt(std::max(arg, 0.0));
    return {w, -w};
}

double dimer_phase(double J1, double J2, double k) {
    if (J1 == 0.0 && J2 == 0.0) throw InvalidArgument("dimer_phase: J1 and J2 both zero");
    const cplx h = -J1 - J2 * std::exp(cplx(0.0, -k));
    double phi = std::arg(h);
    if (phi <= -pi) phi += 2.0 * pi;
    return phi;
}

CMatrix bloch_kernel(const LatticeSpec& spec, double k) {
    const auto& J = spec.hoppings();
    const cplx eik = std::exp(cplx(0.0, k));
    const int n = spec.cell_size();
    CMatrix h = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = spec.onsite();
    if (spec.kind() == LatticeKind::dimer) {
        h(0, 1) = -J[0] - J[1] * std::conj(eik);
        h(1, 0) = std::conj(h(0, 1));
    } else {
        h(0, 1) = h(1, 0) = -J[0];
        h(1, 2) = h(2, 1) = -J[1];
        h(0, 2) = -J[2] * std::conj(eik);
        h(2, 0) = -J[2] * eik;
    }
    return h;
}

namespace {

bool lexicographic_less(const CVector& a, const CVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

} // namespace

BlochDiagonalization diagonalize_kernel(const CMatrix& kernel, double k) {
    const HermitianEigen e = eigh(kernel, 1e-12);
    const Eigen::Index n = e.values.size();
    const double tie = 1e-12 * std::max(1.0, e.values.cwiseAbs().maxCoeff());

    std::vector<Eigen::Index> order(n);
    for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
    // insertion sort: the tolerance-based comparison is not a strict weak ordering
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = i; j > 0; --j) {
            const Eigen::Index a = order[j - 1], b = order[j];
            const double da = e.values[a], db = e.values[b];
            const bool swap = std::abs(da - db) > tie
                                  ? db < da
                                  : lexicographic_less(e.vectors.col(b), e.vectors.col(a));
            if (!swap) break;
            std::swap(order[j - 1], order[j]);
        }
    }

    BlochDiagonalization out;
    out.k = k;
    out.energies.resize(n);
    out.modes.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.energies[i] = e.values[order[i]];
        out.modes.col(i) = e.vectors.col(order[i]);
    }
    return out;
}

std::vector<double> k_grid(int n_k) {
    if (n_k < 1) throw InvalidArgument("k_grid: n_k must be >= 1");
    std::vector<double> ks(n_k);
    for (int i = 0; i < n_k; ++i) ks[i] = -pi + 2.0 * pi * (i + 1) / n_k;
    return ks;
}

std::vector<BandPoint> band_structure(const LatticeSpec& spec, int n_k) {
    if (n_k < 2) throw InvalidArgument("band_structure: n_k must be >= 2");
    std::vector<BandPoint> table;
    table.reserve(static_cast<std::size_t>(n_k) * spec.cell_size());
    for (double k : k_grid(n_k)) {
        const BlochDiagonalization d = diagonalize_kernel(bloch_kernel(spec, k), k);
        for (int b = 0; b < spec.cell_size(); ++b) table.push_back({k, b, d.energies[b]});
    }
    return table;
}

std::vector<BandInterval> band_intervals(const LatticeSpec& spec, int n_k) {
    const int nb = spec.cell_size();
    std::vector<BandInterval> bands(nb, {INFINITY, -INFINITY});
    for (const BandPoint& p : band_structure(spec, n_k)) {
        bands[p.band].lo = std::min(bands[p.band].lo, p.omega);
        bands[p.band].hi = std::max(bands[p.band].hi, p.omega);
    }
    return bands;
}

double distance_to_bands(const std::vector<BandInterval>& bands, double energy) {
    double d = INFINITY;
    for (const BandInterval& b : bands) {
        if (energy >= b.lo && energy <= b.hi) return 0.0;
        d = std::min(d, energy < b.lo ? b.lo - energy : energy - b.hi);
    }
    return d;
}

std::string to_string(EdgeSide s) {
    switch (s) {
    case EdgeSide::left: return "left";
    case EdgeSide::right: return "right";
    case EdgeSide::both: return "both";
    }
    return "?";
}

std::vector<EdgeStateRecord> find_edge_states(const LatticeSpec& spec) {
    if (spec.boundary() != Boundary::open)
        throw InvalidArgument("find_edge_states: needs an open chain");
    if (spec.n_cells() < 4) throw InvalidArgument("find_edge_states: needs at least 4 cells");

    const RMatrix h = phonon_matrix(spec).real();
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(h);
    const RVector& energies = solver.eigenvalues();
    const RMatrix& vectors = solver.eigenvectors();

    const auto bands = band_intervals(spec, 1024);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& b : bands) {
        lo = std::min(lo, b.lo);
        hi = std::max(hi, b.hi);
    }
    const double margin = 1e-3 * (hi - lo);

    std::vector<int> in_gap;
    for (int i = 0; i < energies.size(); ++i)
        if (distance_to_bands(bands, energies[i]) > margin) in_gap.push_back(i);

    const int n = spec.n_sites();
    const int quarter = n / 4;
    std::vector<EdgeStateRecord> out;

    auto classify = [&](const RVector& v) {
        EdgeStateRecord r;
        r.amplitudes = v;
        const Eigen::Index peak = [&] {
            Eigen::Index idx;
            v.cwiseAbs().maxCoeff(&idx);
            return idx;
        }();
        if (v[peak] < 0) r.amplitudes = -v;
        r.weights = v.cwiseAbs2();
        r.energy = v.dot(h * v);
        const double left = r.weights.head(quarter).sum();
        const double right = r.weights.tail(quarter).sum();
        if (left > 0.5) {
            r.side = EdgeSide::left;
            r.side_weight = left;
        } else if (right > 0.5) {
            r.side = EdgeSide::right;
            r.side_weight = right;
        } else if (left + right > 0.5) {
            r.side = EdgeSide::both;
            r.side_weight = left + right;
        } else {
            return;
        }
        out.push_back(std::move(r));
    };

    // group consecutive in-gap energies closer than the margin
    std::size_t i = 0;
    while (i < in_gap.size()) {
        std::size_t j = i + 1;
        while (j < in_gap.size() && energies[in_gap[j]] - energies[in_gap[j - 1]] < margin &&
               in_gap[j] == in_gap[j - 1] + 1)
            ++j;
        const int m = static_cast<int>(j - i);
        RMatrix cluster(n, m);
        for (int c = 0; c < m; ++c) cluster.col(c) = vectors.col(in_gap[i + c]);
        if (m == 1) {
            classify(cluster.col(0));
        } else {
            // maximally localized combinations: diagonalize the projected position operator
            RVector position(n);
            for (int s = 0; s < n; ++s) position[s] = s;
            const RMatrix projected = cluster.transpose() * position.asDiagonal() * cluster;
            Eigen::SelfAdjointEigenSolver<RMatrix> loc(projected);
            const RMatrix localized = cluster * loc.eigenvectors();
            for (int c = 0; c < m; ++c) classify(localized.col(c));
        }
        i = j;
    }
    std::sort(out.begin(), out.end(),
              [](const EdgeStateRecord& a, const EdgeStateRecord& b) { return a.energy < b.energy; });
    return out;
}

} // namespace plq
