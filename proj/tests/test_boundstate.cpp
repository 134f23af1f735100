#include "doctest.h"

#include <cmath>
#include <cstdlib>

#include "plq/boundstate.hpp"

using namespace plq;

namespace {

double total_weight(const BoundStateProfile& p) { return p.spin_weight() + p.phonon_weight(); }

const BoundStateProfile& nearest(const std::vector<BoundStateProfile>& states, double e) {
    REQUIRE(!states.empty());
    const BoundStateProfile* best = &states.front();
    for (const auto& s : states)
        if (std::abs(s.energy - e) < std::abs(best->energy - e)) best = &s;
    return *best;
}

} // namespace

TEST_CASE("analytic chiral profile") {
    const BoundStateProfile p = dimer_chiral_profile(1.0, 0.3, Sublattice::A, 0.3, -10, 10);
    CHECK(total_weight(p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.amplitude(-1, Sublattice::B) == cplx(0.0));
    for (int j = 0; j < 9; ++j)
        CHECK(std::abs(p.amplitude(j + 1, Sublattice::B) / p.amplitude(j, Sublattice::B) + 7.0 / 13.0) < 1e-12);
    for (int j = -10; j <= 10; ++j) CHECK(p.amplitude(j, Sublattice::A) == cplx(0.0));

    // the B spin is the mirror image on the A sublattice
    const BoundStateProfile q = dimer_chiral_profile(1.0, 0.3, Sublattice::B, 0.3, -10, 10);
    for (int j = 0; j <= 10; ++j) CHECK(std::abs(q.amplitude(-j, Sublattice::A) - p.amplitude(j, Sublattice::B)) < 1e-15);

    // delta -> 1: everything on the neighbouring site
    const BoundStateProfile r = dimer_chiral_profile(1.0, 1.0 - 1e-9, Sublattice::A, 0.3, -5, 5);
    CHECK(std::norm(r.amplitude(0, Sublattice::B)) / r.phonon_weight() == doctest::Approx(1.0));

    CHECK_THROWS_AS(dimer_chiral_profile(1.0, -0.3, Sublattice::A, 0.3, -5, 5), InvalidArgument);
    CHECK_THROWS_AS(dimer_chiral_profile(1.0, 0.3, Sublattice::C, 0.3, -5, 5), InvalidArgument);
}

TEST_CASE("analytic, Fourier and numeric profiles agree") {
    const BoundStateProfile a = dimer_chiral_profile(1.0, 0.3, Sublattice::A, 0.3, -10, 10);
    const BoundStateProfile f =
        profile_from_kspace(make_dimer(1.0, 0.3, 1, Boundary::periodic), Sublattice::A, 0.0, 0.3, 4096, -10, 10);
    CHECK(std::abs(a.spin_amplitude - f.spin_amplitude) < 1e-10);
    for (const auto& s : a.sites) CHECK(std::abs(s.amplitude - f.amplitude(s.cell, s.sublattice)) < 1e-10);

    const LatticeSpec spec = make_dimer(1.0, 0.3, 40);
    const SpinPlacement spins[] = {{20, Sublattice::A, 0.3, 0.0}};
    const auto states = numeric_bound_states(assemble_hamiltonian(spec, spins), spec);
    REQUIRE(states.size() == 1);
    const BoundStateProfile& n = states.front();
    CHECK(total_weight(n) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(n.energy) < 1e-10);
    // the 40-cell tail is long enough that truncation is invisible at this tolerance
    CHECK(std::abs(std::abs(n.spin_amplitude) - std::abs(a.spin_amplitude)) < 1e-4);
    for (int j = 0; j <= 10; ++j)
        CHECK(std::abs(std::abs(n.amplitude(20 + j, Sublattice::B)) - std::abs(a.amplitude(j, Sublattice::B))) < 1e-4);
}

TEST_CASE("Fourier profile requires an in-gap energy") {
    const LatticeSpec t = make_lattice(LatticeKind::trimer, {1, 4, 3}, 1, Boundary::periodic);
    CHECK_THROWS_AS(profile_from_kspace(t, Sublattice::A, 0.5, 0.3, 4096, -5, 5), NumericalError);
    CHECK_THROWS_AS(profile_from_kspace(t, Sublattice::A, 3.0, 0.3, 512, -5, 5), InvalidArgument);
}

TEST_CASE("chirality metric") {
    BoundStateProfile one_sided;
    one_sided.sites = {{0, Sublattice::A, 0.0}, {0, Sublattice::B, 0.8}, {1, Sublattice::B, 0.6}};
    CHECK(chirality_metrics(one_sided, 2, 0, Sublattice::A, EdgeSide::left).chirality == 1.0);
    CHECK(chirality_metrics(one_sided, 2, 0, Sublattice::A, EdgeSide::right).chirality == doctest::Approx(0.0));

    BoundStateProfile symmetric;
    symmetric.sites = {{-1, Sublattice::B, 0.5}, {0, Sublattice::A, 0.0}, {0, Sublattice::B, 0.5}};
    CHECK(chirality_metrics(symmetric, 2, 0, Sublattice::A, EdgeSide::left).chirality == doctest::Approx(0.5));
    CHECK_THROWS_AS(chirality_metrics(symmetric, 2, 0, Sublattice::A, EdgeSide::both), InvalidArgument);
}

TEST_CASE("predicted forbidden sides") {
    const LatticeSpec d = make_dimer(1.0, 0.3, 1, Boundary::periodic);
    CHECK(predicted_forbidden_side(d, Sublattice::A, 0.0) == EdgeSide::left);
    CHECK(predicted_forbidden_side(d, Sublattice::B, 0.0) == EdgeSide::right);
    CHECK_FALSE(predicted_forbidden_side(d, Sublattice::A, 0.3).has_value());

    const LatticeSpec t = make_lattice(LatticeKind::trimer, {1, 4, 3}, 1, Boundary::periodic);
    int chiral = 0;
    for (Sublattice m : {Sublattice::A, Sublattice::B, Sublattice::C})
        for (double e : {-4.0, -3.0, -1.0, 1.0, 3.0, 4.0}) chiral += predicted_forbidden_side(t, m, e).has_value();
    CHECK(chiral == 6);
    CHECK(predicted_forbidden_side(t, Sublattice::A, 4.0).has_value());
    CHECK(predicted_forbidden_side(t, Sublattice::B, -3.0).has_value());
    CHECK(predicted_forbidden_side(t, Sublattice::C, 1.0).has_value());
}

TEST_CASE("trimer chiral bound states on a finite chain") {
    const LatticeSpec spec = make_lattice(LatticeKind::trimer, {1, 4, 3}, 40);
    const LatticeSpec bulk = spec.resized(1, Boundary::periodic);
    const std::pair<Sublattice, double> cases[] = {{Sublattice::A, 4.0},  {Sublattice::B, 3.0},  {Sublattice::C, 1.0},
                                                   {Sublattice::A, -4.0}, {Sublattice::B, -3.0}, {Sublattice::C, -1.0}};
    for (const auto& [m, e] : cases) {
        const SpinPlacement spins[] = {{20, m, 0.3, e}};
        const auto states = numeric_bound_states(assemble_hamiltonian(spec, spins), spec);
        const BoundStateProfile& p = nearest(states, e);
        CHECK(std::abs(p.energy - e) < 1e-6);
        const auto side = predicted_forbidden_side(bulk, m, e);
        REQUIRE(side.has_value());
        CHECK(chirality_metrics(p, 3, 20, m, *side).chirality > 0.999);
    }
}

TEST_CASE("degenerate bound states are separated by spin weight") {
    // two A spins at E = 0 give two degenerate bound states; distinct couplings make
    // the spin weights distinct, so the separation is unique
    const LatticeSpec spec = make_dimer(1.0, 0.3, 40);
    const SpinPlacement spins[] = {{5, Sublattice::A, 0.3, 0.0}, {30, Sublattice::A, 0.2, 0.0}};
    const auto states = numeric_bound_states(assemble_hamiltonian(spec, spins), spec);
    REQUIRE(states.size() == 2);
    for (const auto& s : states) {
        CHECK(s.spin_amplitudes.size() == 2);
        const double a = std::norm(s.spin_amplitudes[0]), b = std::norm(s.spin_amplitudes[1]);
        CHECK(std::min(a, b) < 1e-12);
        CHECK(std::max(a, b) > 0.9);
    }
}

TEST_CASE("bond disorder preserves the zero-energy chiral state, site disorder does not") {
    const LatticeSpec spec = make_dimer(1.0, 0.3, 20);
    const SpinPlacement spin{10, Sublattice::A, 0.3, 0.0};
    const auto bond = chirality_ensemble(spec, spin, DisorderKind::bond, 0.5, {}, 20, 11);
    for (const auto& s : bond) {
        CHECK(std::abs(s.energy) < 1e-10);
        CHECK(s.chirality >= 1.0 - 1e-9);
    }
    const auto site = chirality_ensemble(spec, spin, DisorderKind::site, 0.5, {}, 20, 11);
    int broken = 0;
    for (const auto& s : site) broken += s.chirality < 1.0 - 1e-9;
    CHECK(broken == 20);
}

TEST_CASE("intracell trimer disorder keeps the B state directional") {
    const LatticeSpec spec = make_lattice(LatticeKind::trimer, {1, 4, 3}, 20);
    const SpinPlacement spin{10, Sublattice::B, 0.3, 3.0};
    for (const auto& s : chirality_ensemble(spec, spin, DisorderKind::bond_subset, 0.5, {0, 1}, 100, 5))
        CHECK(s.chirality >= 0.99);
}

TEST_CASE("ensembles do not depend on the thread count") {
    const LatticeSpec spec = make_dimer(1.0, 0.3, 12);
    const SpinPlacement spin{6, Sublattice::A, 0.3, 0.0};
    ::setenv("PLQ_THREADS", "1", 1);
    const auto serial = chirality_ensemble(spec, spin, DisorderKind::site, 0.5, {}, 16, 99);
    ::setenv("PLQ_THREADS", "4", 1);
    const auto parallel = chirality_ensemble(spec, spin, DisorderKind::site, 0.5, {}, 16, 99);
    ::unsetenv("PLQ_THREADS");
    for (int i = 0; i < 16; ++i) {
        CHECK(serial[i].seed == parallel[i].seed);
        CHECK(serial[i].energy == parallel[i].energy);
        CHECK(serial[i].chirality == parallel[i].chirality);
    }
}
