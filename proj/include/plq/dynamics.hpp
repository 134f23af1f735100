#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plq/common.hpp"
#include "plq/lattice.hpp"

namespace plq {

struct DynamicsTrace {
    std::vector<double> times;
    std::vector<CVector> amplitudes;  ///< one state vector per time
    std::vector<std::string> labels;  ///< basis labels, empty for raw matrices
    double max_norm_drift = 0.0;

    double population(std::size_t t, int index) const { return std::norm(amplitudes[t][index]); }
};

/// psi(t) = exp(-iHt) psi0 by spectral decomposition. Requires a Hermitian H,
/// a normalized psi0 and sorted non-negative times; throws NumericalError if the
/// norm drifts by more than 1e-9.
DynamicsTrace propagate(const CMatrix& h, const CVector& psi0, const std::vector<double>& times);
DynamicsTrace propagate(const SingleExcitationHamiltonian& h, const CVector& psi0,
                        const std::vector<double>& times);

/// n_times points spread uniformly over [0, t_max].
std::vector<double> time_grid(double t_max, int n_times);

/// Markovian spin-only model: H_eff = sum_ij J_ij s_i^+ s_j^- + sum_i (Delta_i + shift_i) s_i^+ s_i^-.
struct EffectiveSpinModel {
    RMatrix couplings;  ///< J_ij, zero diagonal, symmetric
    std::vector<std::string> labels;
    RVector detunings;
    RVector shifts;     ///< Re Sigma_e(E_BS) of each spin

    RMatrix hamiltonian() const;
};

/// Bath-mediated couplings J_ij = g_i g_j G_{j,i}(E_BS) for spins sharing the
/// detuning E_BS in a gap. Dimer at E_BS = 0 with delta > 0 uses the closed form;
/// everything else the Bloch integral on a 4096-point grid.
EffectiveSpinModel spin_spin_couplings(const LatticeSpec& spec,
                                       const std::vector<SpinPlacement>& spins, double energy);

/// Closed-form dimer coupling for spin i on A at cell x_i and spin j on B at cell
/// x_j (delta > 0, E = 0): g_i g_j (-r)^x / (J(1+delta)) for x = x_j - x_i >= 0, else 0.
double dimer_coupling_ab(double J, double delta, double g_i, double g_j, int x_ij);

/// Spin amplitude of the three-level spin + edge-state model at resonance.
double edge_spin_closed_form(double epsilon, double g_plus, double g_minus, double t);

struct EdgeCoupling {
    double epsilon = 0.0;  ///< half splitting of the two in-gap chain states
    double center = 0.0;   ///< their mean energy
    double g_plus = 0.0;   ///< g times the upper state's amplitude on the spin's site
    double g_minus = 0.0;
};

/// Extracts (epsilon, g+, g-) from the two in-gap edge states of an open chain.
EdgeCoupling edge_coupling(const LatticeSpec& spec, const SpinPlacement& spin);

/// Idealized external fields that cancel selected bath-induced terms:
/// exchange on `cancel_pairs` is removed and every spin's Lamb shift is aligned
/// with that of `reference_spin`.
struct DetuningCompensation {
    bool enabled = false;
    int reference_spin = 0;
    std::vector<std::pair<int, int>> cancel_pairs;
};

void apply_compensation(SingleExcitationHamiltonian& h, const EffectiveSpinModel& model,
                        const DetuningCompensation& comp);

/// Weighted superposition of spin excitations tracked as an extra observable.
struct SpinCombination {
    std::string label;
    std::vector<cplx> coefficients;  ///< one per spin, normalized on use
};

struct DynamicsScenario {
    std::string name;
    LatticeSpec spec{LatticeKind::dimer, {1.0, 1.0}, 1};
    std::optional<DisorderKind> disorder;
    double disorder_width = 0.0;
    std::vector<int> disorder_subset;
    std::vector<SpinPlacement> spins;
    std::vector<std::string> spin_labels;  ///< defaults to spin1, spin2, ...
    std::vector<cplx> initial_spins;  ///< initial spin amplitudes (normalized on use)
    double t_max = 50.0;
    int n_times = 501;
    DetuningCompensation compensation;
    std::vector<SpinCombination> combinations;
};

/// Observables: spin populations followed by the combination populations.
std::vector<std::string> observable_labels(const DynamicsScenario& s);

struct EnsembleStatistics {
    std::vector<double> times;
    std::vector<std::string> labels;
    std::vector<std::uint64_t> seeds;
    RMatrix mean;   ///< observable x time
    RMatrix min;
    RMatrix max;
    RMatrix peak;   ///< realization x observable, max over time
    RMatrix floor;  ///< realization x observable, min over time
    double max_norm_drift = 0.0;
    std::vector<RMatrix> traces;  ///< per realization (observable x time), if requested
};

/// Runs n realizations with seeds derive_seed(master_seed, i). A scenario without
/// disorder gives n identical runs. Aggregation is in realization order, so the
/// result does not depend on thread scheduling.
EnsembleStatistics ensemble_run(const DynamicsScenario& scenario, int n_realizations,
                                std::uint64_t master_seed, bool keep_traces = false);

/// Observable populations of one realization (observable x time).
RMatrix run_realization(const DynamicsScenario& scenario, const DisorderRealization* disorder,
                        const std::vector<double>& times, double* norm_drift = nullptr);

} // namespace plq
