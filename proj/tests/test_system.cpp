#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "rwa/system.hpp"

using namespace rwa;

namespace {
Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

// |e><g| in the (g, e) energy ordering
Matrix sigma_plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1;
    return m;
}

Matrix kron2(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// brute-force distinct differences with a fixed absolute tolerance
std::vector<double> distinct_gaps(const std::vector<double>& e, double tol) {
    std::vector<double> all;
    for (double a : e)
        for (double b : e) all.push_back(a - b);
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (double x : all)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    return out;
}
} // namespace

TEST_CASE("two-level system") {
    auto s = two_level(1.0);
    CHECK(s.dim == 2);
    CHECK(s.energies == std::vector<double>{-0.5, 0.5});
    const Matrix& x = s.coupling("x");
    CHECK(x(0, 0) == cplx(0));
    CHECK(x(1, 1) == cplx(0));
    auto b = bohr_spectrum(s);
    REQUIRE(b.frequencies.size() == 3);
    CHECK(b.frequencies[0].omega == -1.0);
    CHECK(b.frequencies[1].omega == 0.0);
    CHECK(b.frequencies[1].multiplicity() == 2);
    CHECK(b.frequencies[2].omega == 1.0);
    CHECK(b.index(1, 0) == 2);
    CHECK_THROWS_AS(two_level(0.0), ValidationError);
    CHECK_THROWS_AS(s.coupling("z"), ValidationError);
}

TEST_CASE("oscillator") {
    const double W = 1.3, M = 0.7;
    auto two = oscillator(W, M, 2);
    CHECK((two.coupling("x") - sigma_x() / std::sqrt(2 * M * W)).norm() < 1e-15);

    auto s = oscillator(W, M, 6);
    CHECK(s.energies.front() == 0.0);
    CHECK(s.energies.back() == doctest::Approx(5 * W));
    const Matrix& x = s.coupling("x");
    const Matrix& p = s.coupling("p");
    for (int n = 0; n + 1 < 6; ++n) {
        CHECK(x(n, n + 1).real() == doctest::Approx(std::sqrt(n + 1.0) / std::sqrt(2 * M * W)));
        CHECK(x(n + 1, n).real() == doctest::Approx(std::sqrt(n + 1.0) / std::sqrt(2 * M * W)));
    }
    const Matrix c = x * p - p * x;
    for (int n = 0; n < 5; ++n) CHECK(std::abs(c(n, n) - cplx(0, 1)) < 1e-13);
    CHECK(std::abs(c(5, 5) - cplx(0, 1)) > 1.0); // truncation witness
    CHECK((c.topLeftCorner(5, 5) - cplx(0, 1) * Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-13);

    auto b = bohr_spectrum(oscillator(1.0, 1.0, 3));
    REQUIRE(b.frequencies.size() == 5);
    for (int k = 0; k < 5; ++k) CHECK(b.frequencies[k].omega == doctest::Approx(k - 2.0));
    CHECK_THROWS_AS(oscillator(1.0, 1.0, 1), ValidationError);
}

TEST_CASE("split into raising and lowering parts") {
    auto t = two_level(1.0);
    auto sp = split_pm("x", t);
    CHECK((sp.plus - sigma_plus()).norm() == 0.0);
    CHECK((sp.minus - sigma_plus().adjoint()).norm() == 0.0);
    // J = -sigma_y; in (g, e) order sigma_y = [[0, i], [-i, 0]]
    Matrix sy(2, 2);
    sy << 0, cplx(0, 1), cplx(0, -1), 0;
    CHECK((sp.j + sy).norm() < 1e-15);

    const double W = 1.7, M = 0.4;
    auto o = oscillator(W, M, 5);
    auto so = split_pm("x", o);
    CHECK((so.plus - lowering(5).adjoint() / std::sqrt(2 * M * W)).norm() < 1e-14);
    CHECK((so.j - o.coupling("p") / (M * W)).norm() < 1e-14);
    CHECK(so.zero.norm() == 0.0);

    auto z = split_pm(Matrix::Zero(5, 5), o);
    CHECK(z.plus.norm() + z.minus.norm() + z.zero.norm() + z.j.norm() == 0.0);

    // degenerate levels: elements within the block go to L_0
    SystemSpec d;
    d.dim = 3;
    d.energies = {0.0, 1.0, 1.0};
    Matrix l(3, 3);
    l << 0.5, 1, 2, 1, 0.1, cplx(0.3, 0.2), 2, cplx(0.3, -0.2), -0.4;
    d.couplings = {{"L", l}};
    auto sd = split_pm("L", d);
    CHECK((sd.plus + sd.minus + sd.zero - l).norm() == 0.0);
    CHECK((sd.plus.adjoint() - sd.minus).norm() == 0.0);
    CHECK(sd.zero(1, 2) == cplx(0.3, 0.2));
    CHECK(sd.zero(0, 1) == cplx(0));
}

TEST_CASE("composition") {
    auto a = two_level(1.0), b = two_level(1.0);
    auto free = compose(a, b, Matrix::Zero(4, 4));
    std::multiset<double> sums;
    for (double x : a.energies)
        for (double y : b.energies) sums.insert(x + y);
    std::vector<double> expect(sums.begin(), sums.end());
    for (int i = 0; i < 4; ++i) CHECK(free.energies[i] == doctest::Approx(expect[i]).epsilon(1e-14));

    // Minkowski sum of Bohr spectra
    auto ba = bohr_spectrum(a);
    std::vector<double> mink;
    for (auto& f : ba.frequencies)
        for (auto& g : ba.frequencies) mink.push_back(f.omega + g.omega);
    std::sort(mink.begin(), mink.end());
    mink.erase(std::unique(mink.begin(), mink.end()), mink.end());
    auto bf = bohr_spectrum(free);
    REQUIRE(bf.frequencies.size() == mink.size());
    for (std::size_t i = 0; i < mink.size(); ++i) CHECK(bf.frequencies[i].omega == doctest::Approx(mink[i]));

    const double g = 0.1;
    const Matrix h = g * kron2(sigma_x(), sigma_x());
    auto c = compose(a, b, h);
    const double r = std::sqrt(1.0 + g * g);
    CHECK(c.energies[0] == doctest::Approx(-r).epsilon(1e-14));
    CHECK(c.energies[1] == doctest::Approx(-g).epsilon(1e-14));
    CHECK(c.energies[2] == doctest::Approx(g).epsilon(1e-14));
    CHECK(c.energies[3] == doctest::Approx(r).epsilon(1e-14));
    for (const auto& op : c.couplings) CHECK((op.op - op.op.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(c.has_coupling("A.x"));
    CHECK(c.has_coupling("B.x"));
    CHECK(c.composition.unitary.rows() == 4);

    // Bohr spectrum of the symmetric 4-level spectrum
    const auto brute = distinct_gaps(c.energies, 1e-9);
    auto bc = bohr_spectrum(c);
    CHECK(brute.size() == 9);
    REQUIRE(bc.frequencies.size() == brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) CHECK(bc.frequencies[i].omega == doctest::Approx(brute[i]));
    bool near = false;
    for (auto& f : bc.frequencies) near = near || std::abs(f.omega - (r - g)) < 1e-12;
    CHECK(near);
    for (auto& f : bc.frequencies) {
        bool mirrored = false;
        for (auto& h2 : bc.frequencies) mirrored = mirrored || std::abs(h2.omega + f.omega) < 1e-14;
        CHECK(mirrored);
    }
    CHECK(bc.frequencies[4].multiplicity() >= 4);

    // local diagonal phases commute with H_A, H_B and leave energies unchanged
    Matrix ua = Matrix::Zero(2, 2), ub = Matrix::Zero(2, 2);
    ua(0, 0) = std::polar(1.0, 0.3);
    ua(1, 1) = std::polar(1.0, -1.1);
    ub(0, 0) = std::polar(1.0, 2.0);
    ub(1, 1) = std::polar(1.0, 0.4);
    const Matrix u = kron2(ua, ub);
    Matrix hr = 0.3 * kron2(sigma_x(), sigma_x());
    hr(0, 3) = cplx(0.1, 0.2);
    hr(3, 0) = cplx(0.1, -0.2);
    auto c1 = compose(a, b, hr);
    auto c2 = compose(a, b, u * hr * u.adjoint());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(c1.energies[i] - c2.energies[i]) < 1e-10);

    Matrix bad = Matrix::Zero(4, 4);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(compose(a, b, bad), ValidationError);
    CHECK_THROWS_AS(compose(a, b, Matrix::Zero(3, 3)), ValidationError);
}

TEST_CASE("validation and hashing") {
    auto s = two_level(1.0);
    CHECK(s.hash() == two_level(1.0).hash());
    CHECK(s.hash() != two_level(1.1).hash());
    SystemSpec bad = s;
    bad.couplings[0].op(0, 1) = cplx(1, 1);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    SystemSpec unsorted = s;
    unsorted.energies = {1.0, 0.0};
    CHECK_THROWS_AS(unsorted.validate(), ValidationError);
}
