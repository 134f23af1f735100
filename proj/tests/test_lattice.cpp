#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "plq/linalg.hpp"
#include "plq/lattice.hpp"
#include "plq/rng.hpp"

using namespace plq;

TEST_CASE("dimer hoppings from J and delta") {
    const LatticeSpec s = make_dimer(1.0, 0.3, 4);
    CHECK(s.hoppings()[0] == doctest::Approx(1.3));
    CHECK(s.hoppings()[1] == doctest::Approx(0.7));
    CHECK(s.mean_hopping() == doctest::Approx(1.0));
    CHECK(s.dimerization() == doctest::Approx(0.3));
    CHECK(make_lattice(LatticeKind::dimer, {1.0, 1.0}, 3).dimerization() == 0.0);
}

TEST_CASE("site layout is cell by cell") {
    const LatticeSpec s = make_lattice(LatticeKind::trimer, {1, 4, 3}, 5);
    CHECK(s.n_sites() == 15);
    CHECK(s.site_index(2, Sublattice::C) == 8);
    CHECK(s.cell_of(8) == 2);
    CHECK(s.sublattice_of(8) == Sublattice::C);
    CHECK(s.bond_hopping(5) == 3.0);
    CHECK(s.bond_sites(5) == std::pair{5, 6});
    CHECK(s.n_bonds() == 14);
    CHECK(s.resized(5, Boundary::periodic).n_bonds() == 15);
    CHECK_THROWS_AS(s.site_index(5, Sublattice::A), InvalidArgument);
    CHECK_THROWS_AS(make_dimer(1.0, 0.3, 2).site_index(0, Sublattice::C), InvalidArgument);
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(make_lattice(LatticeKind::dimer, {1, 2, 3}, 2), InvalidArgument);
    CHECK_THROWS_AS(make_lattice(LatticeKind::trimer, {1, 2, 3}, 0), InvalidArgument);
    CHECK_THROWS_AS(sublattice_from_string("D"), InvalidArgument);
}

TEST_CASE("one open trimer cell transcribes the hoppings") {
    const CMatrix h = phonon_matrix(make_lattice(LatticeKind::trimer, {1, 4, 3}, 1));
    CHECK(h.rows() == 3);
    CHECK(h(0, 1) == cplx(-1.0));
    CHECK(h(1, 2) == cplx(-4.0));
    CHECK(h(0, 2) == cplx(0.0));
}

TEST_CASE("periodic chain closes the ring with the last pattern hopping") {
    const CMatrix h = phonon_matrix(make_dimer(1.0, 0.3, 3, Boundary::periodic));
    CHECK(h(5, 0).real() == doctest::Approx(-0.7));
    CHECK(h(0, 5).real() == doctest::Approx(-0.7));
}

TEST_CASE("disorder is deterministic and order independent") {
    const LatticeSpec s = make_dimer(1.0, 0.3, 10);
    const auto a = sample_disorder(s, DisorderKind::bond, 0.5, 42);
    const auto b = sample_disorder(s, DisorderKind::bond, 0.5, 42);
    CHECK(a == b);
    CHECK(a.offsets != sample_disorder(s, DisorderKind::bond, 0.5, 43).offsets);
    for (double x : a.offsets) CHECK(std::abs(x) <= 0.25);
    // element i only depends on (seed, i)
    const CounterStream stream(42);
    CHECK(stream.symmetric(7, 0.5) == stream.symmetric(7, 0.5));

    const auto zero = sample_disorder(s, DisorderKind::site, 0.0, 9);
    CHECK(std::all_of(zero.offsets.begin(), zero.offsets.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("bond_subset only touches the selected hopping pattern") {
    const LatticeSpec s = make_lattice(LatticeKind::trimer, {1, 4, 3}, 6);
    const auto d = sample_disorder(s, DisorderKind::bond_subset, 1.0, 5, {2});
    CHECK(!d.targets.empty());
    for (int b : d.targets) CHECK(s.bond_pattern(b) == 2);
    CHECK_THROWS_AS(sample_disorder(s, DisorderKind::bond_subset, 1.0, 5, {}), InvalidArgument);
}

TEST_CASE("derived seeds differ per index") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("uniform draws lie in [0, 1)") {
    const CounterStream s(123);
    double lo = 1.0, hi = 0.0, mean = 0.0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const double u = s.uniform(i);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        mean += u / 20000.0;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("assembled Hamiltonians are Hermitian") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const LatticeSpec s = seed % 2 ? make_lattice(LatticeKind::trimer, {1, 4, 3}, 6, Boundary::periodic)
                                       : make_dimer(1.0, -0.4, 8);
        const DisorderKind kind = seed % 3 ? DisorderKind::bond : DisorderKind::site;
        const auto d = sample_disorder(s, kind, 1.0, seed);
        const SpinPlacement spins[] = {{0, Sublattice::A, 0.3, 0.5}, {2, Sublattice::B, 0.1, -0.2}};
        const auto h = assemble_hamiltonian(s, &d, spins);
        CHECK(hermiticity_error(h.matrix) <= 1e-12);
        CHECK(h.dim() == s.n_sites() + 2);
        CHECK(h.matrix(h.spin_index(0), 0) == cplx(0.3));
        CHECK(h.matrix(h.spin_index(1), h.spin_index(1)) == cplx(-0.2));
    }
}

TEST_CASE("spins may not share a cavity unless allowed") {
    const LatticeSpec s = make_dimer(1.0, 0.3, 4);
    const SpinPlacement spins[] = {{1, Sublattice::A, 0.3, 0.0}, {1, Sublattice::A, 0.3, 0.0}};
    CHECK_THROWS_AS(assemble_hamiltonian(s, nullptr, spins), InvalidArgument);
    CHECK_NOTHROW(assemble_hamiltonian(s, nullptr, spins, true));
}

TEST_CASE("cavity numbering is 1-based along the chain") {
    const LatticeSpec s = make_dimer(1.0, -0.3, 6);
    const SpinPlacement p = spin_at_cavity(s, 5, 0.3, 0.0);
    CHECK(p.cell == 2);
    CHECK(p.sublattice == Sublattice::A);
    CHECK_THROWS_AS(spin_at_cavity(s, 13, 0.3, 0.0), InvalidArgument);
    CHECK_THROWS_AS(spin_at_cavity(s, 0, 0.3, 0.0), InvalidArgument);
}

TEST_CASE("basis labels") {
    const LatticeSpec s = make_dimer(1.0, 0.3, 2);
    const SpinPlacement spins[] = {{1, Sublattice::B, 0.3, 0.0}};
    const auto h = assemble_hamiltonian(s, spins);
    CHECK(h.basis[3].name() == "b1");
    CHECK(h.basis[4].name() == "spin1");
}
