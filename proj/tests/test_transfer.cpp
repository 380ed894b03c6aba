#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ruelle/filters.hpp"
#include "ruelle/transfer.hpp"

using namespace ruelle;

namespace {

LaurentPoly random_poly(std::mt19937_64& gen, int dmin, int dmax) {
    std::map<int, cplx> c;
    auto u = [&] { return 2.0 * ((gen() >> 11) * 0x1.0p-53) - 1.0; };
    for (int k = dmin; k <= dmax; ++k) c[k] = cplx{u(), u()};
    return LaurentPoly(std::move(c));
}

}  // namespace

TEST_CASE("build: window sizes and matrix entries") {
    TransferOperator haar = TransferOperator::build(builtin("haar"));
    CHECK(haar.d_star() == 1);
    CHECK(haar.dim() == 3);
    // A_{m,k} = c_{2m-k} with c = {-1: 1/2, 0: 1, 1: 1/2}
    CHECK(std::abs(haar.matrix()(1, 1) - cplx{1.0}) < 1e-15);   // m=k=0
    CHECK(std::abs(haar.matrix()(1, 2) - cplx{0.5}) < 1e-15);   // m=0,k=1
    CHECK(std::abs(haar.matrix()(2, 2) - cplx{0.5}) < 1e-15);   // m=k=1 -> c_1
}

TEST_CASE("build: stretched Haar gets a 7x7 window") {
    TransferOperator op = TransferOperator::build(builtin("stretched_haar", 3));
    CHECK(op.d_star() == 3);
    CHECK(op.dim() == 7);
}

TEST_CASE("build: scale mismatch is rejected") {
    FilterSpec a = builtin("haar");
    FilterSpec b = builtin("haar");
    b.scale_N = 3;
    CHECK_THROWS_AS(TransferOperator::build(a, b), ScaleMismatch);
    CHECK_THROWS_AS(TransferOperator::build(a, a, 0), WindowTooSmall);
}

TEST_CASE("degenerate constant filter exercises the defining formula") {
    FilterSpec c;
    c.scale_N = 2;
    c.name = "constant";
    c.m0 = LaurentPoly::constant(std::sqrt(2.0));
    c = validate(std::move(c));  // fails QMF, but R is still defined
    TransferOperator op = TransferOperator::build(c, c);
    LaurentPoly r1 = op.apply(LaurentPoly::constant(1.0));
    CHECK(std::abs(r1.coeff(0) - cplx{2.0}) < 1e-14);
    // apply(z^k) = N z^{k/2} when 2 | k, else 0
    CHECK(op.apply(LaurentPoly::monomial(1)).is_zero());
    CHECK(std::abs(op.apply(LaurentPoly::monomial(4)).coeff(2) - cplx{2.0}) < 1e-14);
}

TEST_CASE("apply: Haar fixed point and hand iterations") {
    TransferOperator op = TransferOperator::build(builtin("haar"));
    LaurentPoly one = LaurentPoly::constant(1.0);
    CHECK((op.apply(one) - one).l1_norm() < 1e-15);

    LaurentPoly rz = op.apply(LaurentPoly::monomial(1));
    CHECK(std::abs(rz.coeff(0) - cplx{0.5}) < 1e-15);
    CHECK(std::abs(rz.coeff(1) - cplx{0.5}) < 1e-15);

    LaurentPoly r2z = op.iterate(LaurentPoly::monomial(1), 2);
    CHECK(std::abs(r2z.coeff(0) - cplx{0.75}) < 1e-15);
    CHECK(std::abs(r2z.coeff(1) - cplx{0.25}) < 1e-15);

    LaurentPoly r20 = op.iterate(LaurentPoly::monomial(1), 20);
    CHECK(sup_grid_norm(r20 - one) < 1e-5);
}

TEST_CASE("apply: stretched Haar moves z^3 like Haar moves z") {
    TransferOperator op = TransferOperator::build(builtin("stretched_haar", 3));
    LaurentPoly r = op.apply(LaurentPoly::monomial(3));
    CHECK(std::abs(r.coeff(0) - cplx{0.5}) < 1e-15);
    CHECK(std::abs(r.coeff(3) - cplx{0.5}) < 1e-15);
}

TEST_CASE("iterate with n = 0 is the identity") {
    TransferOperator op = TransferOperator::build(builtin("haar"));
    std::mt19937_64 gen(3);
    LaurentPoly f = random_poly(gen, -1, 1);
    CHECK((op.iterate(f, 0) - f).l1_norm() == 0.0);
}

TEST_CASE("matrix action agrees with apply on the window") {
    std::mt19937_64 gen(5);
    for (const auto& name : {"haar", "stretched_haar", "daubechies4"}) {
        TransferOperator op = TransferOperator::build(builtin(name));
        for (int t = 0; t < 8; ++t) {
            LaurentPoly f = random_poly(gen, -op.window(), op.window());
            Eigen::VectorXcd v = op.matrix() * op.poly_to_window(f);
            LaurentPoly via_matrix = op.window_to_poly(v);
            CHECK((via_matrix - op.apply(f)).l1_norm() < 1e-14);
        }
    }
}

TEST_CASE("closure: the invariant window absorbs any polynomial support") {
    TransferOperator op = TransferOperator::build(builtin("stretched_haar", 3));
    std::mt19937_64 gen(9);
    LaurentPoly f = random_poly(gen, -20, 20);
    LaurentPoly g = op.iterate(f, 6);
    CHECK(g.degree_min() >= -op.d_star());
    CHECK(g.degree_max() <= op.d_star());
    // once inside, it never leaves
    LaurentPoly h = op.apply(g);
    CHECK(h.degree_min() >= -op.d_star());
    CHECK(h.degree_max() <= op.d_star());
}

TEST_CASE("positivity is preserved on the grid") {
    std::mt19937_64 gen(21);
    TransferOperator op = TransferOperator::build(builtin("daubechies4"));
    for (int t = 0; t < 8; ++t) {
        LaurentPoly p = random_poly(gen, -2, 2);
        LaurentPoly f = cross_correlation(p, p);  // nonnegative on the circle
        LaurentPoly rf = op.apply(f);
        for (int i = 0; i < 1024; ++i)
            CHECK(eval(rf, std::polar(1.0, two_pi * i / 1024)).real() >= -1e-10);
    }
}

TEST_CASE("cesaro_project: Haar projections") {
    TransferOperator op = TransferOperator::build(builtin("haar"));
    LaurentPoly z = LaurentPoly::monomial(1);

    CesaroResult t1 = cesaro_project(op, z, 1.0);
    CHECK(t1.converged);
    CHECK(sup_grid_norm(t1.value - LaurentPoly::constant(1.0)) < 1e-6);

    CesaroResult tm1 = cesaro_project(op, z, -1.0);
    CHECK(tm1.converged);
    CHECK(sup_grid_norm(tm1.value) < 1e-6);

    CesaroResult t0 = cesaro_project(op, LaurentPoly::zero(), 1.0);
    CHECK(t0.converged);
    CHECK(t0.value.is_zero());
}

TEST_CASE("cesaro_project: projection identities") {
    std::mt19937_64 gen(33);
    TransferOperator op = TransferOperator::build(builtin("stretched_haar", 3));
    for (int t = 0; t < 4; ++t) {
        LaurentPoly f = random_poly(gen, -3, 3);
        for (cplx lam : {cplx{1.0}, cplx{-1.0}}) {
            LaurentPoly once = cesaro_project(op, f, lam).value;
            LaurentPoly twice = cesaro_project(op, once, lam).value;
            CHECK(sup_grid_norm(twice - once) < 1e-6);
            // eigen-equation residual
            CHECK(sup_grid_norm(op.apply(once) - lam * once) < 1e-6);
        }
        LaurentPoly t1 = cesaro_project(op, f, 1.0).value;
        LaurentPoly cross = cesaro_project(op, t1, -1.0).value;
        CHECK(sup_grid_norm(cross) < 1e-6);
    }
}

TEST_CASE("cesaro_project rejects off-circle eigenvalues") {
    TransferOperator op = TransferOperator::build(builtin("haar"));
    CHECK_THROWS_AS(cesaro_project(op, LaurentPoly::monomial(1), cplx{0.5}), InvalidParam);
}

TEST_CASE("schwarz_check: equality and strict cases") {
    TransferOperator op = TransferOperator::build(builtin("haar"));
    LaurentPoly one = LaurentPoly::constant(1.0);
    CHECK(schwarz_check(op, one, one, 3));
    CHECK(schwarz_check(op, LaurentPoly::monomial(1), one, 1));

    TransferOperator sh = TransferOperator::build(builtin("stretched_haar", 3));
    std::mt19937_64 gen(41);
    for (int t = 0; t < 6; ++t) {
        LaurentPoly xi = random_poly(gen, 0, 3);
        for (int n = 1; n <= 5; ++n) CHECK(schwarz_check(sh, xi, one, n));
    }
}

TEST_CASE("schwarz_check rejects negative weights") {
    TransferOperator op = TransferOperator::build(builtin("haar"));
    LaurentPoly negative = LaurentPoly::constant(-1.0);
    CHECK_THROWS_AS(schwarz_check(op, LaurentPoly::monomial(1), negative, 1), NegativeWeight);
}
