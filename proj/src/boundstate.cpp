#include "plq/boundstate.hpp"

#include <algorithm>
#include <cmath>

#include "plq/linalg.hpp"
#include "plq/rng.hpp"
#include "plq/util.hpp"

namespace plq {

std::string to_string(ProfileSource s) {
    switch (s) {
    case ProfileSource::analytic: return "analytic";
    case ProfileSource::fourier: return "fourier";
    case ProfileSource::numeric: return "numeric";
    }
    return "?";
}

cplx BoundStateProfile::amplitude(int cell, Sublattice s) const {
    auto it = std::lower_bound(sites.begin(), sites.end(), std::pair{cell, s},
                               [](const SiteAmplitude& a, const std::pair<int, Sublattice>& key) {
                                   return std::pair{a.cell, a.sublattice} < key;
                               });
    if (it != sites.end() && it->cell == cell && it->sublattice == s) return it->amplitude;
    return 0.0;
}

double BoundStateProfile::spin_weight() const {
    if (spin_amplitudes.empty()) return std::norm(spin_amplitude);
    double w = 0.0;
    for (cplx c : spin_amplitudes) w += std::norm(c);
    return w;
}

double BoundStateProfile::phonon_weight() const {
    double w = 0.0;
    for (const auto& s : sites) w += std::norm(s.amplitude);
    return w;
}

namespace {

void normalize(BoundStateProfile& p) {
    const double norm = std::sqrt(p.spin_weight() + p.phonon_weight());
    if (!(norm > 0.0)) throw NumericalError("normalize", "profile has zero norm");
    p.spin_amplitude /= norm;
    for (cplx& c : p.spin_amplitudes) c /= norm;
    for (auto& s : p.sites) s.amplitude /= norm;
}

void check_range(int j_min, int j_max) {
    if (j_min > j_max) throw InvalidArgument("empty cell range");
}

} // namespace

BoundStateProfile dimer_chiral_profile(double J, double delta, Sublattice sublattice, double g,
                                       int j_min, int j_max) {
    if (!(delta > 0.0)) throw InvalidArgument("dimer_chiral_profile: needs delta > 0 (relabel sublattices for delta < 0)");
    if (!(delta < 1.0)) throw InvalidArgument("dimer_chiral_profile: needs delta < 1");
    if (sublattice == Sublattice::C) throw InvalidArgument("dimer_chiral_profile: dimer has no C sublattice");
    check_range(j_min, j_max);

    const double r = (1.0 - delta) / (1.0 + delta);
    // spin on A at cell 0: weight only on B sites at j >= 0
    auto b_of_a = [&](int j) -> double {
        return j < 0 ? 0.0 : g * std::pow(-r, j) / (J * (1.0 + delta));
    };

    BoundStateProfile p;
    p.source = ProfileSource::analytic;
    p.energy = 0.0;
    p.spin_amplitude = 1.0;
    for (int j = j_min; j <= j_max; ++j) {
        const bool on_a = sublattice == Sublattice::A;
        p.sites.push_back({j, Sublattice::A, on_a ? 0.0 : b_of_a(-j)});
        p.sites.push_back({j, Sublattice::B, on_a ? b_of_a(j) : 0.0});
    }
    normalize(p);
    return p;
}

BoundStateProfile profile_from_kspace(const LatticeSpec& spec, Sublattice m, double energy,
                                      double g, int n_k, int j_min, int j_max) {
    if (n_k < 1024) throw InvalidArgument("profile_from_kspace: n_k must be >= 1024");
    if (!spec.has_sublattice(m)) throw InvalidArgument("profile_from_kspace: sublattice not present");
    check_range(j_min, j_max);
    if (distance_to_bands(band_intervals(spec, 2), energy) <= 1e-6)
        throw NumericalError("profile_from_kspace",
                             "E_BS = " + std::to_string(energy) + " is not inside a gap");

    const int nb = spec.cell_size();
    const int im = static_cast<int>(m);
    const std::vector<double> ks = k_grid(n_k);
    // resolvent column (E - H(k))^{-1}_{n m} for every k
    std::vector<CVector> column(n_k, CVector::Zero(nb));
    for (int i = 0; i < n_k; ++i) {
        const BlochDiagonalization d = diagonalize_kernel(bloch_kernel(spec, ks[i]), ks[i]);
        for (int s = 0; s < nb; ++s)
            column[i] += d.modes.col(s) * (std::conj(d.modes(im, s)) / (energy - d.energies[s]));
    }

    BoundStateProfile p;
    p.source = ProfileSource::fourier;
    p.energy = energy;
    p.spin_amplitude = 1.0;
    for (int j = j_min; j <= j_max; ++j) {
        for (int n = 0; n < nb; ++n) {
            CompensatedSum sum;
            for (int i = 0; i < n_k; ++i) sum.add(std::exp(cplx(0.0, ks[i] * j)) * column[i][n]);
            p.sites.push_back({j, static_cast<Sublattice>(n), g * sum.value() / double(n_k)});
        }
    }
    normalize(p);
    return p;
}

std::vector<BoundStateProfile> numeric_bound_states(const SingleExcitationHamiltonian& h,
                                                    const LatticeSpec& clean) {
    const HermitianEigen e = eigh(h.matrix);
    const auto bands = band_intervals(clean, 2);
    constexpr double gap_margin = 1e-6;
    constexpr double spin_threshold = 0.01;

    std::vector<int> in_gap;
    for (int i = 0; i < e.values.size(); ++i)
        if (distance_to_bands(bands, e.values[i]) > gap_margin) in_gap.push_back(i);

    std::vector<BoundStateProfile> out;
    auto emit = [&](const CVector& v) {
        const CVector spins = v.tail(h.n_spins);
        if (spins.squaredNorm() <= spin_threshold) return;
        // gauge: largest spin amplitude real-positive
        Eigen::Index peak;
        spins.cwiseAbs().maxCoeff(&peak);
        const cplx phase = std::abs(spins[peak]) > 0 ? std::conj(spins[peak]) / std::abs(spins[peak]) : 1.0;

        BoundStateProfile p;
        p.source = ProfileSource::numeric;
        p.energy = std::real(v.dot(h.matrix * v));
        for (int s = 0; s < h.n_spins; ++s) p.spin_amplitudes.push_back(spins[s] * phase);
        p.spin_amplitude = p.spin_amplitudes.front();
        for (int s = 0; s < h.n_sites; ++s)
            p.sites.push_back({h.basis[s].cell, h.basis[s].sublattice, v[s] * phase});
        out.push_back(std::move(p));
    };

    std::size_t i = 0;
    while (i < in_gap.size()) {
        std::size_t j = i + 1;
        const double scale = std::max(1.0, std::abs(e.values[in_gap[i]]));
        while (j < in_gap.size() && in_gap[j] == in_gap[j - 1] + 1 &&
               e.values[in_gap[j]] - e.values[in_gap[j - 1]] < 1e-8 * scale)
            ++j;
        const int m = static_cast<int>(j - i);
        CMatrix cluster(h.dim(), m);
        for (int c = 0; c < m; ++c) cluster.col(c) = e.vectors.col(in_gap[i + c]);
        if (m == 1 || h.n_spins == 0) {
            for (int c = 0; c < m; ++c) emit(cluster.col(c));
        } else {
            // principal directions of the spin block concentrate the spin weight
            const CMatrix s = cluster.bottomRows(h.n_spins);
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(s.adjoint() * s);
            const CMatrix rotated = cluster * solver.eigenvectors();
            for (int c = m - 1; c >= 0; --c) emit(rotated.col(c));
        }
        i = j;
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.energy) != std::abs(b.energy)) return std::abs(a.energy) < std::abs(b.energy);
        return a.energy < b.energy;
    });
    return out;
}

ChiralityMetrics chirality_metrics(const BoundStateProfile& profile, int cell_size, int spin_cell,
                                   Sublattice spin_sublattice, EdgeSide forbidden) {
    if (profile.sites.empty()) throw InvalidArgument("chirality_metrics: empty profile");
    if (forbidden == EdgeSide::both) throw InvalidArgument("chirality_metrics: forbidden side must be left or right");
    const int spin_pos = spin_cell * cell_size + static_cast<int>(spin_sublattice);
    ChiralityMetrics m;
    double total = 0.0;
    for (const auto& s : profile.sites) {
        const double w = std::norm(s.amplitude);
        const int pos = s.cell * cell_size + static_cast<int>(s.sublattice);
        total += w;
        if (pos < spin_pos)
            m.left_weight += w;
        else if (pos > spin_pos)
            m.right_weight += w;
        else
            m.spin_site_weight += w;
        m.sublattice_weight[static_cast<int>(s.sublattice)] += w;
    }
    if (!(total > 0.0)) throw InvalidArgument("chirality_metrics: phonon part is zero");
    m.left_weight /= total;
    m.right_weight /= total;
    m.spin_site_weight /= total;
    for (double& w : m.sublattice_weight) w /= total;
    const double bad = forbidden == EdgeSide::left ? m.left_weight : m.right_weight;
    m.chirality = std::clamp(1.0 - bad, 0.0, 1.0);
    return m;
}

std::optional<EdgeSide> predicted_forbidden_side(const LatticeSpec& spec, Sublattice m,
                                                 double energy) {
    const BoundStateProfile p = profile_from_kspace(spec, m, energy, 1.0, 4096, -20, 20);
    const ChiralityMetrics c = chirality_metrics(p, spec.cell_size(), 0, m, EdgeSide::left);
    constexpr double tiny = 1e-10;
    if (c.left_weight < tiny && c.right_weight > tiny) return EdgeSide::left;
    if (c.right_weight < tiny && c.left_weight > tiny) return EdgeSide::right;
    return std::nullopt;
}

std::vector<ChiralitySample> chirality_ensemble(const LatticeSpec& spec, const SpinPlacement& spin,
                                                DisorderKind kind, double W,
                                                const std::vector<int>& subset, int n_realizations,
                                                std::uint64_t master_seed) {
    if (n_realizations < 1) throw InvalidArgument("chirality_ensemble: n_realizations must be >= 1");
    const auto forbidden = predicted_forbidden_side(spec, spin.sublattice, spin.detuning);
    if (!forbidden)
        throw InvalidArgument("chirality_ensemble: the clean bound state is not one-sided");

    std::vector<ChiralitySample> out(n_realizations);
    parallel_for(n_realizations, [&](int i) {
        const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
        const DisorderRealization d = sample_disorder(spec, kind, W, seed, subset);
        const SpinPlacement spins[] = {spin};
        const auto h = assemble_hamiltonian(spec, &d, spins);
        const auto states = numeric_bound_states(h, spec);
        ChiralitySample s{seed, std::nan(""), 0.0};
        const BoundStateProfile* best = nullptr;
        for (const auto& st : states)
            if (!best || std::abs(st.energy - spin.detuning) < std::abs(best->energy - spin.detuning))
                best = &st;
        if (best) {
            s.energy = best->energy;
            s.chirality =
                chirality_metrics(*best, spec.cell_size(), spin.cell, spin.sublattice, *forbidden)
                    .chirality;
        }
        out[i] = s;
    });
    return out;
}

} // namespace plq
