#include <doctest.h>

#include <cmath>

#include "rwa/linalg.hpp"
#include "rwa/models.hpp"
#include "rwa/perturbation.hpp"

using namespace rwa;

namespace {

Matrix sx() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

// exact eigenvalue of S closest to z
cplx nearest(const Vector& ev, cplx z) {
    cplx best = ev(0);
    for (Eigen::Index k = 1; k < ev.size(); ++k)
        if (std::abs(ev(k) - z) < std::abs(best - z)) best = ev(k);
    return best;
}

} // namespace

TEST_CASE("closed-system first order") {
    Matrix h1 = Matrix::Zero(3, 3);
    h1.diagonal() << 0.1, -0.2, 0.3;
    auto d = closed_first_order({0.0, 1.0, 2.5}, h1);
    CHECK(d.delta_omega(0) == 0.1);
    CHECK(d.delta_omega(1) == -0.2);
    CHECK(d.basis_corrections.norm() == 0.0);
    CHECK(d.degenerate_blocks.empty());

    // two-level with off-diagonal perturbation: second-order agreement
    std::vector<double> err;
    for (double lam : {0.01, 0.005, 0.0025}) {
        auto r = closed_first_order({0.0, 1.0}, lam * sx());
        CHECK(r.delta_omega.norm() == 0.0);
        CHECK(r.basis_corrections(1, 0).real() == doctest::Approx(-lam));
        CHECK(r.basis_corrections(0, 1).real() == doctest::Approx(lam));
        Matrix h(2, 2);
        h << 0.0, lam, lam, 1.0;
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const double e = std::abs(es.eigenvalues()(0) - (0.0 + r.delta_omega(0)));
        Vector v0 = es.eigenvectors().col(0);
        v0 *= std::abs(v0(0)) / v0(0);
        const Vector approx = r.zeroth_order.col(0) + r.basis_corrections.col(0);
        err.push_back(e + (v0 - approx).norm());
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.02));
    CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.02));

    // fully degenerate: eigen-decomposition of H1
    Matrix hd(3, 3);
    hd << 0.2, cplx(0.1, 0.05), 0.0, cplx(0.1, -0.05), -0.1, 0.3, 0.0, 0.3, 0.05;
    auto f = closed_first_order({1.0, 1.0, 1.0}, hd);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hd);
    CHECK((f.delta_omega - es.eigenvalues()).norm() < 1e-14);
    REQUIRE(f.degenerate_blocks.size() == 1);
    CHECK((hd * f.zeroth_order - f.zeroth_order * f.delta_omega.cast<cplx>().asDiagonal().toDenseMatrix())
              .norm() < 1e-14);
    CHECK(f.basis_corrections.norm() == 0.0);

    // degenerate pair inside a nondegenerate spectrum
    Matrix hm(3, 3);
    hm << 0.0, 0.02, 0.01, 0.02, 0.0, 0.03, 0.01, 0.03, 0.05;
    auto m = closed_first_order({0.0, 0.0, 1.0}, hm);
    CHECK(m.delta_omega(0) == doctest::Approx(-0.02));
    CHECK(m.delta_omega(1) == doctest::Approx(0.02));
    CHECK(m.delta_omega(2) == doctest::Approx(0.05));
    CHECK(m.basis_corrections(0, 2).real() == doctest::Approx(0.01));
    CHECK(m.basis_corrections(2, 2) == cplx(0));

    CHECK_THROWS_AS(closed_first_order({0.0, 1.0}, Matrix::Identity(3, 3)), ValidationError);
}

TEST_CASE("TLS coherence correction and Pauli rates") {
    const double W = 1.0;
    for (double T : {0.0, 0.5, 2.0}) {
        auto bath = ohmic(0.005, 50.0, Regulator::lorentz_drude, T);
        auto g = build_tcl2(two_level(W), "x", bath);
        auto c = tls_coefficients(bath, W);
        auto r = liouville_corrections(g);
        // |+><-| is index (1, 0)
        const cplx f = r.delta_f.at({1, 0});
        CHECK(f.real() == doctest::Approx(-c.Gamma).epsilon(1e-9));
        CHECK(f.imag() == doctest::Approx(c.delta_Omega).epsilon(1e-9));
        CHECK(std::conj(r.delta_f.at({0, 1})) == f);
        CHECK(r.flagged.empty());
        REQUIRE(r.delta_sigma.count({1, 0}));
        CHECK(r.delta_sigma.at({1, 0})(1, 0) == cplx(0));

        // coherence-block eigenvalue
        const auto blk = tls_generators(bath, W, TlsVariant::full);
        Eigen::ComplexEigenSolver<Matrix> es(blk.coherence);
        const cplx z(-c.Gamma, -W + c.delta_Omega);
        const double second = std::norm(cplx(c.Gamma, c.delta_Omega)) / (2 * (W - c.delta_Omega));
        CHECK(std::abs(nearest(es.eigenvalues(), z) - z) < 1.5 * second);

        const auto p = r.pauli;
        const double x = T == 0 ? 0.0 : W / (2 * T);
        if (T > 0) {
            const double ch = std::cosh(x);
            // ordering (-, +)
            CHECK(p.W(0, 0) == doctest::Approx(-c.Gamma * std::exp(-x) / ch).epsilon(1e-10));
            CHECK(p.W(0, 1) == doctest::Approx(c.Gamma * std::exp(x) / ch).epsilon(1e-10));
            CHECK(p.W(1, 0) == doctest::Approx(c.Gamma * std::exp(-x) / ch).epsilon(1e-10));
            CHECK(p.W(1, 1) == doctest::Approx(-c.Gamma * std::exp(x) / ch).epsilon(1e-10));
        }
        CHECK(std::abs(p.W.col(0).sum()) < 1e-15);
        CHECK(std::abs(p.W.col(1).sum()) < 1e-15);
        CHECK(std::abs(p.eigenvalues(0)) < 1e-15);
        CHECK(p.eigenvalues(1).real() == doctest::Approx(-2 * c.Gamma).epsilon(1e-10));

        const auto m = validity_report(g);
        CHECK(m.min_gap == W);
        CHECK(m.min_gap_gap == W);
        CHECK(m.gamma_D == doctest::Approx(2 * c.Gamma).epsilon(1e-3));
        CHECK(m.weak_coupling);
        CHECK(m.secular);
    }
}

TEST_CASE("perturbative eigenvalues converge at second order") {
    std::vector<double> err;
    for (double g0 : {0.02, 0.01, 0.005}) {
        auto g = build_tcl2(two_level(1.0), "x", ohmic(g0, 20.0, Regulator::hard, 0.4));
        auto r = liouville_corrections(g);
        Eigen::ComplexEigenSolver<Matrix> es(g.super_matrix(), false);
        double e = 0.0;
        for (const auto& [ij, f] : r.delta_f) {
            const cplx z(f.real(), f.imag() - (g.sys().energies[ij.first] - g.sys().energies[ij.second]));
            e = std::max(e, std::abs(nearest(es.eigenvalues(), z) - z));
        }
        for (Eigen::Index k = 0; k < r.pauli.eigenvalues.size(); ++k)
            e = std::max(e, std::abs(nearest(es.eigenvalues(), r.pauli.eigenvalues(k)) - r.pauli.eigenvalues(k)));
        err.push_back(e);
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
    CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("free generator has no corrections") {
    auto g = free_generator(oscillator(1.0, 1.0, 4));
    auto r = liouville_corrections(g);
    for (const auto& [ij, f] : r.delta_f) CHECK(f == cplx(0));
    for (const auto& [ij, s] : r.delta_sigma) CHECK(s.norm() == 0.0);
    CHECK(r.pauli.W.norm() == 0.0);
    CHECK(r.margins.gamma_D == 0.0);
    CHECK(r.margins.weak_coupling);
    CHECK(r.margins.secular);
    // equally spaced ladder: only w = +-3 is unshared
    CHECK(r.flagged.size() == 10);
    CHECK_FALSE(r.flagged.count({3, 0}));
}

TEST_CASE("post-trace RWA keeps the diagonal corrections") {
    auto sys = oscillator(1.0, 1.0, 3);
    // anharmonic spectrum removes Bohr degeneracies
    sys.energies = {0.0, 1.0, 2.7};
    auto bath = ohmic(0.004, 20.0, Regulator::lorentz_drude, 0.5);
    auto g = build_tcl2(sys, "x", bath);
    auto post = post_trace_rwa(g);
    auto rf = liouville_corrections(g), rp = liouville_corrections(post);
    for (const auto& [ij, f] : rf.delta_f) CHECK(std::abs(f - rp.delta_f.at(ij)) < 1e-16);
    CHECK((rf.pauli.W - rp.pauli.W).norm() < 1e-16);
    for (const auto& [ij, f] : rf.delta_f) CHECK(f.real() <= 0.0);
    for (const auto& [ij, s] : rp.delta_sigma) CHECK(s.norm() < 1e-16);
    CHECK(rf.flagged.empty());
    for (const auto& [ij, s] : rf.delta_sigma) CHECK(s.norm() > 0.0);
    CHECK(std::abs(rf.pauli.eigenvalues(0)) < 1e-14);
    for (int k = 1; k < 3; ++k) CHECK(rf.pauli.eigenvalues(k).real() < 0.0);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(rf.pauli.W.col(j).sum()) < 1e-15);
}

TEST_CASE("pre-trace relaxation rates agree, frequencies do not") {
    auto bath = ohmic(0.005, 100.0, Regulator::lorentz_drude, 1.0);
    auto full = liouville_corrections(build_tcl2(two_level(1.0), "x", bath));
    auto pre = liouville_corrections(pre_trace_tcl2(two_level(1.0), "x", bath));
    const cplx a = full.delta_f.at({1, 0}), b = pre.delta_f.at({1, 0});
    CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-10));
    CHECK(std::abs(a.imag() - b.imag()) > 1e-3);
    CHECK((full.pauli.W - pre.pauli.W).norm() < 1e-12);
}

TEST_CASE("near-degenerate dressed doublet breaks the secular condition") {
    const double gc = 0.002;
    Matrix h_ab = gc * kron(sx(), sx());
    auto sys = compose(two_level(1.0), two_level(1.0), h_ab);
    auto g = build_tcl2(sys, {{"A.x", ohmic(0.01, 20.0, Regulator::hard, 0.3)}});
    auto m = validity_report(g);
    CHECK(m.min_gap_gap == doctest::Approx(2 * gc).epsilon(1e-6));
    CHECK(m.gamma_D > 2 * gc);
    CHECK_FALSE(m.secular);
    auto r = liouville_corrections(g);
    CHECK_FALSE(r.flagged.empty());
    for (const auto& ij : r.flagged) CHECK_FALSE(r.delta_sigma.count(ij));

    const std::string csv = corrections_csv(r);
    CHECK(csv.rfind("i,j,re_delta_f,im_delta_f,flagged\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
    CHECK(margins_text(m).find("secular: warn") != std::string::npos);
}

TEST_CASE("weakly anharmonic ladder: weak coupling holds, secular condition does not") {
    auto sys = oscillator(1.0, 1.0, 3);
    sys.energies = {0.0, 1.0, 2.001};
    auto g = build_tcl2(sys, "x", ohmic(0.005, 20.0, Regulator::hard, 0.5));
    auto m = validity_report(g);
    CHECK(m.min_gap == doctest::Approx(1.0));
    CHECK(m.min_gap_gap == doctest::Approx(0.001).epsilon(1e-9));
    CHECK(m.weak_coupling);
    CHECK_FALSE(m.secular);
    auto r = liouville_corrections(g);
    CHECK(r.flagged.count({1, 0}));
    CHECK(r.flagged.count({2, 1}));
    CHECK_FALSE(r.flagged.count({2, 0}));
    CHECK(r.delta_sigma.count({2, 0}));
}
