#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ruelle/lpoly.hpp"

using namespace ruelle;

namespace {

const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

LaurentPoly haar() { return LaurentPoly({{0, inv_sqrt2}, {1, inv_sqrt2}}); }
LaurentPoly stretched_haar3() { return LaurentPoly({{0, inv_sqrt2}, {3, inv_sqrt2}}); }

LaurentPoly random_poly(std::mt19937_64& gen, int dmin, int dmax) {
    std::map<int, cplx> c;
    auto u = [&] { return 2.0 * ((gen() >> 11) * 0x1.0p-53) - 1.0; };
    for (int k = dmin; k <= dmax; ++k) c[k] = cplx{u(), u()};
    return LaurentPoly(std::move(c));
}

}  // namespace

TEST_CASE("eval: filter normalization values") {
    CHECK(std::abs(eval(haar(), CirclePoint::one()) - cplx{std::sqrt(2.0)}) < 1e-14);
    CHECK(std::abs(eval(haar(), CirclePoint::from_rational(1, 2))) < 1e-14);  // z = -1
    // (1+z^3)/sqrt(2) at the primitive cube root of unity
    CHECK(std::abs(eval(stretched_haar3(), CirclePoint::from_rational(1, 3)) -
                   cplx{std::sqrt(2.0)}) < 1e-13);
}

TEST_CASE("cross_correlation: hand expansions") {
    LaurentPoly c = cross_correlation(haar(), haar());
    CHECK(std::abs(c.coeff(-1) - cplx{0.5}) < 1e-15);
    CHECK(std::abs(c.coeff(0) - cplx{1.0}) < 1e-15);
    CHECK(std::abs(c.coeff(1) - cplx{0.5}) < 1e-15);
    CHECK(c.degree_min() == -1);
    CHECK(c.degree_max() == 1);

    LaurentPoly c3 = cross_correlation(stretched_haar3(), stretched_haar3());
    CHECK(std::abs(c3.coeff(-3) - cplx{0.5}) < 1e-15);
    CHECK(std::abs(c3.coeff(0) - cplx{1.0}) < 1e-15);
    CHECK(std::abs(c3.coeff(3) - cplx{0.5}) < 1e-15);

    LaurentPoly cn = cross_correlation(LaurentPoly::constant(std::sqrt(5.0)),
                                       LaurentPoly::constant(std::sqrt(5.0)));
    CHECK(std::abs(cn.coeff(0) - cplx{5.0}) < 1e-14);
    CHECK(cn.coeffs().size() == 1);
}

TEST_CASE("rotate basics") {
    CirclePoint rho = CirclePoint::from_rational(1, 3);
    LaurentPoly z = LaurentPoly::monomial(1);
    CHECK(std::abs(rotate(z, rho).coeff(1) - rho.value) < 1e-15);
    CHECK(std::abs(rotate(LaurentPoly::constant(1.0), rho).coeff(0) - cplx{1.0}) < 1e-15);
    // (e^{2 pi i/3})^3 = 1 leaves (1+z^3)/sqrt 2 invariant
    LaurentPoly r = rotate(stretched_haar3(), rho) - stretched_haar3();
    CHECK(r.l1_norm() < 1e-14);
}

TEST_CASE("rotate: inverse rotation restores coefficients exactly") {
    std::mt19937_64 gen(7);
    for (int t = 0; t < 20; ++t) {
        LaurentPoly p = random_poly(gen, -5, 5);
        CirclePoint rho = CirclePoint::from_angle(((gen() >> 11) * 0x1.0p-53) * two_pi);
        LaurentPoly back = rotate(rotate(p, rho), rho.conj());
        CHECK((back - p).l1_norm() < 1e-12);
    }
}

TEST_CASE("haar_integral") {
    CHECK(std::abs(haar_integral(LaurentPoly::constant(1.0)) - cplx{1.0}) < 1e-15);
    LaurentPoly harmonics({{1, 1.0}, {-1, 1.0}});
    CHECK(std::abs(haar_integral(harmonics)) < 1e-15);
    // stretched-Haar h: (3 + 4 cos t + 2 cos 2t)/9 has mean 1/3
    LaurentPoly h({{-2, 1.0 / 9}, {-1, 2.0 / 9}, {0, 3.0 / 9}, {1, 2.0 / 9}, {2, 1.0 / 9}});
    CHECK(std::abs(haar_integral(h) - cplx{1.0 / 3}) < 1e-15);
}

TEST_CASE("unit_circle_roots: Haar |m0|^2 - 2 has a double root at 1") {
    LaurentPoly p = cross_correlation(haar(), haar());
    p.add_to_coeff(0, -2.0);
    auto roots = unit_circle_roots(p);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].multiplicity == 2);
    REQUIRE(roots[0].point.rational_angle.has_value());
    CHECK(roots[0].point.rational_angle->num == 0);
}

TEST_CASE("unit_circle_roots: z - 1") {
    auto roots = unit_circle_roots(LaurentPoly({{1, 1.0}, {0, -1.0}}));
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].multiplicity == 1);
    CHECK(std::abs(roots[0].point.value - cplx{1.0}) < 1e-10);
}

TEST_CASE("unit_circle_roots: stretched Haar double roots at cube roots of unity") {
    LaurentPoly p = cross_correlation(stretched_haar3(), stretched_haar3());
    p.add_to_coeff(0, -2.0);
    auto roots = unit_circle_roots(p);
    REQUIRE(roots.size() == 3);
    for (const auto& r : roots) {
        CHECK(r.multiplicity == 2);
        REQUIRE(r.point.rational_angle.has_value());
        CHECK(r.point.rational_angle->den <= 3);
    }
}

TEST_CASE("unit_circle_roots rejects the zero polynomial") {
    CHECK_THROWS_AS(unit_circle_roots(LaurentPoly::zero()), DegenerateInput);
}

TEST_CASE("property: eval of autocorrelation equals |eval|^2 on the grid") {
    std::mt19937_64 gen(11);
    for (int t = 0; t < 10; ++t) {
        LaurentPoly p = random_poly(gen, -4, 4);
        LaurentPoly c = cross_correlation(p, p);
        for (int i = 0; i < 1024; i += 17) {
            cplx z = std::polar(1.0, two_pi * i / 1024);
            CHECK(std::abs(eval(c, z) - cplx{std::norm(eval(p, z))}) < 1e-10);
        }
    }
}

TEST_CASE("property: roots returned satisfy the residual bound") {
    std::mt19937_64 gen(13);
    for (int t = 0; t < 10; ++t) {
        LaurentPoly p = random_poly(gen, -3, 3);
        // force a root on the circle: multiply by (z - e^{i theta})
        double theta = ((gen() >> 11) * 0x1.0p-53) * two_pi;
        LaurentPoly factor({{1, 1.0}, {0, -std::polar(1.0, theta)}});
        LaurentPoly q = p * factor;
        double tol = 1e-8;
        for (const auto& r : unit_circle_roots(q, tol))
            CHECK(std::abs(eval(q, r.point)) <= tol * (1.0 + q.l1_norm()) + 1e-9);
    }
}

TEST_CASE("property: Parseval via haar_integral of the autocorrelation") {
    std::mt19937_64 gen(17);
    for (int t = 0; t < 20; ++t) {
        LaurentPoly p = random_poly(gen, -6, 6);
        double sum_sq = 0;
        for (const auto& [k, c] : p.coeffs()) sum_sq += std::norm(c);
        CHECK(std::abs(haar_integral(cross_correlation(p, p)) - cplx{sum_sq}) < 1e-12);
    }
}

TEST_CASE("rational angle snapping prefers small denominators") {
    auto ra = snap_rational_angle(two_pi / 3 + 1e-9, (1 << 20) - 1, 1e-6);
    REQUIRE(ra.has_value());
    CHECK(ra->num == 1);
    CHECK(ra->den == 3);
    CHECK_FALSE(snap_rational_angle(1.0, 100, 1e-9).has_value());
}
