#include "plq/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "plq/bloch.hpp"
#include "plq/linalg.hpp"
#include "plq/rng.hpp"
#include "plq/util.hpp"

namespace plq {

DynamicsTrace propagate(const CMatrix& h, const CVector& psi0, const std::vector<double>& times) {
    if (psi0.size() != h.rows()) throw InvalidArgument("propagate: state and matrix sizes differ");
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw InvalidArgument("propagate: initial state is not normalized");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i]))
            throw InvalidArgument("propagate: times must be finite and non-negative");
        if (i > 0 && times[i] < times[i - 1]) throw InvalidArgument("propagate: times must be sorted");
    }
    const HermitianEigen e = eigh(h);
    const CVector c = e.vectors.adjoint() * psi0;

    DynamicsTrace trace;
    trace.times = times;
    trace.amplitudes.reserve(times.size());
    for (double t : times) {
        CVector phased(c.size());
        for (Eigen::Index i = 0; i < c.size(); ++i) phased[i] = std::exp(cplx(0.0, -e.values[i] * t)) * c[i];
        CVector psi = e.vectors * phased;
        trace.max_norm_drift = std::max(trace.max_norm_drift, std::abs(psi.squaredNorm() - 1.0));
        trace.amplitudes.push_back(std::move(psi));
    }
    if (trace.max_norm_drift > 1e-9)
        throw NumericalError("propagate", "norm drift " + std::to_string(trace.max_norm_drift));
    return trace;
}

DynamicsTrace propagate(const SingleExcitationHamiltonian& h, const CVector& psi0,
                        const std::vector<double>& times) {
    DynamicsTrace trace = propagate(h.matrix, psi0, times);
    for (const auto& b : h.basis) trace.labels.push_back(b.name());
    return trace;
}

std::vector<double> time_grid(double t_max, int n_times) {
    if (n_times < 1 || !(t_max >= 0.0)) throw InvalidArgument("time_grid: need n_times >= 1 and t_max >= 0");
    std::vector<double> t(n_times, 0.0);
    for (int i = 1; i < n_times; ++i) t[i] = t_max * i / (n_times - 1);
    return t;
}

RMatrix EffectiveSpinModel::hamiltonian() const {
    RMatrix h = couplings;
    for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) += detunings[i] + shifts[i];
    return h;
}

double dimer_coupling_ab(double J, double delta, double g_i, double g_j, int x_ij) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("dimer_coupling_ab: needs 0 < delta < 1");
    if (x_ij < 0) return 0.0;
    const double r = (1.0 - delta) / (1.0 + delta);
    return g_i * g_j * std::pow(-r, x_ij) / (J * (1.0 + delta));
}

EffectiveSpinModel spin_spin_couplings(const LatticeSpec& spec,
                                       const std::vector<SpinPlacement>& spins, double energy) {
    const int n = static_cast<int>(spins.size());
    if (n == 0) throw InvalidArgument("spin_spin_couplings: no spins");
    for (const auto& s : spins) {
        if (!spec.has_sublattice(s.sublattice))
            throw InvalidArgument("spin_spin_couplings: sublattice not present in this lattice");
        if (std::abs(s.detuning - energy) > 1e-12)
            throw InvalidArgument("spin_spin_couplings: every spin must be detuned to E_BS");
    }
    if (distance_to_bands(band_intervals(spec, 2), energy) <= 1e-6)
        throw NumericalError("spin_spin_couplings",
                             "E_BS = " + std::to_string(energy) + " is not inside a gap");

    EffectiveSpinModel model;
    model.couplings = RMatrix::Zero(n, n);
    model.detunings = RVector::Constant(n, energy);
    model.shifts = RVector::Zero(n);
    for (int i = 0; i < n; ++i) model.labels.push_back("spin" + std::to_string(i + 1));

    const bool closed_form = spec.kind() == LatticeKind::dimer && energy == 0.0 &&
                             spec.onsite() == 0.0 && spec.dimerization() > 0.0;
    if (closed_form) {
        const double J = spec.mean_hopping(), delta = spec.dimerization();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto& a = spins[i];
                const auto& b = spins[j];
                if (a.sublattice == Sublattice::A && b.sublattice == Sublattice::B)
                    model.couplings(i, j) = model.couplings(j, i) =
                        dimer_coupling_ab(J, delta, a.g, b.g, b.cell - a.cell);
            }
        return model;  // Sigma_e(0) = 0
    }

    constexpr int n_k = 4096;
    const int nb = spec.cell_size();
    const std::vector<double> ks = k_grid(n_k);
    std::vector<CMatrix> resolvent(n_k);
    for (int q = 0; q < n_k; ++q) {
        const BlochDiagonalization d = diagonalize_kernel(bloch_kernel(spec, ks[q]), ks[q]);
        CMatrix r = CMatrix::Zero(nb, nb);
        for (int s = 0; s < nb; ++s)
            r += d.modes.col(s) * d.modes.col(s).adjoint() / (energy - d.energies[s]);
        resolvent[q] = r;
    }
    // G_{(dx, n), (0, m)}
    auto green = [&](int dx, int nn, int mm) {
        CompensatedSum sum;
        for (int q = 0; q < n_k; ++q) sum.add(std::exp(cplx(0.0, ks[q] * dx)) * resolvent[q](nn, mm));
        return sum.value() / double(n_k);
    };
    for (int i = 0; i < n; ++i) {
        const int mi = static_cast<int>(spins[i].sublattice);
        model.shifts[i] = spins[i].g * spins[i].g * green(0, mi, mi).real();
        for (int j = i + 1; j < n; ++j) {
            const int mj = static_cast<int>(spins[j].sublattice);
            const double v =
                spins[i].g * spins[j].g * green(spins[j].cell - spins[i].cell, mj, mi).real();
            model.couplings(i, j) = model.couplings(j, i) = v;
        }
    }
    return model;
}

double edge_spin_closed_form(double epsilon, double g_plus, double g_minus, double t) {
    if (std::abs(std::abs(g_plus) - std::abs(g_minus)) > 1e-6 * std::max(std::abs(g_plus), std::abs(g_minus)))
        throw InvalidArgument("edge_spin_closed_form: needs |g+| = |g-|");
    const double e2 = epsilon * epsilon, g2 = 2.0 * g_plus * g_plus;
    if (e2 + g2 == 0.0) return 1.0;
    const double w0 = std::sqrt(e2 + g2);
    return (e2 + g2 * std::cos(w0 * t)) / (e2 + g2);
}

EdgeCoupling edge_coupling(const LatticeSpec& spec, const SpinPlacement& spin) {
    const auto edges = find_edge_states(spec);
    if (edges.size() != 2)
        throw NumericalError("edge_coupling", "expected two in-gap edge states, found " +
                                                  std::to_string(edges.size()));
    const int site = spec.site_index(spin.cell, spin.sublattice);
    EdgeCoupling c;
    c.epsilon = 0.5 * (edges[1].energy - edges[0].energy);
    c.center = 0.5 * (edges[1].energy + edges[0].energy);
    c.g_plus = spin.g * edges[1].amplitudes[site];
    c.g_minus = spin.g * edges[0].amplitudes[site];
    return c;
}

void apply_compensation(SingleExcitationHamiltonian& h, const EffectiveSpinModel& model,
                        const DetuningCompensation& comp) {
    if (!comp.enabled) return;
    if (comp.reference_spin < 0 || comp.reference_spin >= h.n_spins)
        throw InvalidArgument("compensation: reference spin out of range");
    for (const auto& [i, j] : comp.cancel_pairs) add_spin_exchange(h, i, j, -model.couplings(i, j));
    for (int s = 0; s < h.n_spins; ++s)
        if (s != comp.reference_spin)
            add_spin_shift(h, s, -(model.shifts[s] - model.shifts[comp.reference_spin]));
}

std::vector<std::string> observable_labels(const DynamicsScenario& s) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < s.spins.size(); ++i)
        labels.push_back(i < s.spin_labels.size() ? s.spin_labels[i] : "spin" + std::to_string(i + 1));
    for (const auto& c : s.combinations) labels.push_back(c.label);
    return labels;
}

namespace {

CVector normalized(const std::vector<cplx>& c, std::size_t n, const char* what) {
    if (c.size() != n) throw InvalidArgument(std::string(what) + ": needs one coefficient per spin");
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = c[i];
    const double norm = v.norm();
    if (!(norm > 0.0)) throw InvalidArgument(std::string(what) + ": all coefficients are zero");
    return v / norm;
}

} // namespace

RMatrix run_realization(const DynamicsScenario& scenario, const DisorderRealization* disorder,
                        const std::vector<double>& times, double* norm_drift) {
    const std::size_t ns = scenario.spins.size();
    if (ns == 0) throw InvalidArgument("scenario '" + scenario.name + "' has no spins");
    SingleExcitationHamiltonian h = assemble_hamiltonian(scenario.spec, disorder, scenario.spins);
    if (scenario.compensation.enabled) {
        const EffectiveSpinModel model =
            spin_spin_couplings(scenario.spec, scenario.spins, scenario.spins.front().detuning);
        apply_compensation(h, model, scenario.compensation);
    }

    std::vector<cplx> init = scenario.initial_spins;
    if (init.empty()) {
        init.assign(ns, 0.0);
        init[0] = 1.0;
    }
    CVector psi0 = CVector::Zero(h.dim());
    psi0.tail(ns) = normalized(init, ns, "initial state");

    std::vector<CVector> combos;
    for (const auto& c : scenario.combinations) combos.push_back(normalized(c.coefficients, ns, c.label.c_str()));

    const DynamicsTrace trace = propagate(h, psi0, times);
    if (norm_drift) *norm_drift = trace.max_norm_drift;

    RMatrix obs(ns + combos.size(), times.size());
    for (std::size_t t = 0; t < times.size(); ++t) {
        const CVector spins = trace.amplitudes[t].tail(ns);
        for (std::size_t s = 0; s < ns; ++s) obs(s, t) = std::norm(spins[s]);
        for (std::size_t c = 0; c < combos.size(); ++c) obs(ns + c, t) = std::norm(combos[c].dot(spins));
    }
    return obs;
}

EnsembleStatistics ensemble_run(const DynamicsScenario& scenario, int n_realizations,
                                std::uint64_t master_seed, bool keep_traces) {
    if (n_realizations < 1) throw InvalidArgument("ensemble_run: n_realizations must be >= 1");
    EnsembleStatistics st;
    st.times = time_grid(scenario.t_max, scenario.n_times);
    st.labels = observable_labels(scenario);
    for (int i = 0; i < n_realizations; ++i) st.seeds.push_back(derive_seed(master_seed, i));

    std::vector<RMatrix> runs(n_realizations);
    std::vector<double> drift(n_realizations, 0.0);
    if (!scenario.disorder) {
        runs[0] = run_realization(scenario, nullptr, st.times, &drift[0]);
        for (int i = 1; i < n_realizations; ++i) {
            runs[i] = runs[0];
            drift[i] = drift[0];
        }
    } else {
        parallel_for(n_realizations, [&](int i) {
            const DisorderRealization d =
                sample_disorder(scenario.spec, *scenario.disorder, scenario.disorder_width,
                                st.seeds[i], scenario.disorder_subset);
            runs[i] = run_realization(scenario, &d, st.times, &drift[i]);
        });
    }

    const Eigen::Index n_obs = runs[0].rows(), n_t = runs[0].cols();
    st.mean = RMatrix::Zero(n_obs, n_t);
    st.min = runs[0];
    st.max = runs[0];
    st.peak.resize(n_realizations, n_obs);
    st.floor.resize(n_realizations, n_obs);
    for (int i = 0; i < n_realizations; ++i) {
        st.mean += runs[i];
        st.min = st.min.cwiseMin(runs[i]);
        st.max = st.max.cwiseMax(runs[i]);
        st.peak.row(i) = runs[i].rowwise().maxCoeff().transpose();
        st.floor.row(i) = runs[i].rowwise().minCoeff().transpose();
        st.max_norm_drift = std::max(st.max_norm_drift, drift[i]);
    }
    st.mean /= double(n_realizations);
    if (keep_traces) st.traces = std::move(runs);
    return st;
}

} // namespace plq
