#pragma once

// The Ruelle / wavelet-Galerkin operator R_{m0,m0'} f(z) =
// (1/N) sum_{w^N = z} conj(m0(w)) m0'(w) f(w): exact action on Laurent
// polynomials, the finite matrix on the invariant degree window, iteration
// and eigenprojections by averaged iteration.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "ruelle/errors.hpp"
#include "ruelle/filters.hpp"
#include "ruelle/lpoly.hpp"

namespace ruelle {

// sup |f(z)| over a uniform grid on the circle
inline double sup_grid_norm(const LaurentPoly& f, int grid_size = 256) {
    double s = 0;
    for (int i = 0; i < grid_size; ++i)
        s = std::max(s, std::abs(eval(f, std::polar(1.0, two_pi * i / grid_size))));
    return s;
}

class TransferOperator {
  public:
    // default window d = d_star = ceil(G/(N-1)); the window [-d, d] is
    // invariant under the action for any d >= d_star
    static TransferOperator build(const FilterSpec& m0, const FilterSpec& m0prime,
                                  int d = -1) {
        if (m0.scale_N != m0prime.scale_N)
            throw ScaleMismatch("transfer: filters have different scale N");
        TransferOperator op;
        op.scale_N_ = m0.scale_N;
        op.m0_ = m0.m0;
        op.m0prime_ = m0prime.m0;
        op.corr_ = cross_correlation(m0.m0, m0prime.m0);
        const int G = std::max(std::abs(op.corr_.degree_min()), op.corr_.degree_max());
        op.d_star_ = (G + op.scale_N_ - 2) / (op.scale_N_ - 1);  // ceil(G/(N-1))
        if (d < 0) d = op.d_star_;
        if (d < op.d_star_)
            throw WindowTooSmall("transfer: window half-width " + std::to_string(d) +
                                 " below invariant d* = " + std::to_string(op.d_star_));
        op.d_ = d;
        const int dim = 2 * d + 1;
        op.matrix_ = Eigen::MatrixXcd::Zero(dim, dim);
        for (int m = -d; m <= d; ++m)
            for (int k = -d; k <= d; ++k)
                op.matrix_(m + d, k + d) = op.corr_.coeff(op.scale_N_ * m - k);
        return op;
    }

    static TransferOperator build(const FilterSpec& m0, int d = -1) { return build(m0, m0, d); }

    int scale_N() const { return scale_N_; }
    const LaurentPoly& m0() const { return m0_; }
    const LaurentPoly& m0prime() const { return m0prime_; }
    const LaurentPoly& corr() const { return corr_; }
    int d_star() const { return d_star_; }
    int window() const { return d_; }
    int dim() const { return 2 * d_ + 1; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    // (Rf)_m = sum_k c_{N m - k} f_k
    LaurentPoly apply(const LaurentPoly& f) const {
        if (f.is_zero()) return {};
        LaurentPoly out;
        const int m_lo = static_cast<int>(
            std::floor(double(corr_.degree_min() + f.degree_min()) / scale_N_));
        const int m_hi = static_cast<int>(
            std::ceil(double(corr_.degree_max() + f.degree_max()) / scale_N_));
        for (int m = m_lo; m <= m_hi; ++m) {
            cplx s = 0;
            for (const auto& [k, fk] : f.coeffs()) s += corr_.coeff(scale_N_ * m - k) * fk;
            out.set_coeff(m, s);
        }
        return out;
    }

    LaurentPoly iterate(LaurentPoly f, int n) const {
        for (int i = 0; i < n; ++i) f = apply(f);
        return f;
    }

    LaurentPoly window_to_poly(const Eigen::VectorXcd& v) const {
        LaurentPoly out;
        for (int k = -d_; k <= d_; ++k) out.set_coeff(k, v(k + d_));
        return out;
    }

    Eigen::VectorXcd poly_to_window(const LaurentPoly& f) const {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
        for (const auto& [k, c] : f.coeffs()) {
            if (k < -d_ || k > d_)
                throw WindowTooSmall("poly_to_window: support exceeds window");
            v(k + d_) = c;
        }
        return v;
    }

  private:
    int scale_N_ = 2;
    LaurentPoly m0_, m0prime_, corr_;
    int d_star_ = 0;
    int d_ = 0;
    Eigen::MatrixXcd matrix_;
};

// ---------------------------------------------------------------------------
// Eigenprojection by averaged iteration

struct CesaroOptions {
    double tol = 1e-12;
    int n_max = 4096;
    int grid_size = 256;
    int period_cap = 64;  // largest tail period probed
};

struct CesaroResult {
    LaurentPoly value;
    bool converged = false;
    double residual = 0.0;  // sup-grid norm of R(value) - lambda value
    int iterations = 0;
};

// Projection onto the lambda-eigenspace, lim (1/n) sum lambda^{-k} R^k f.
// The iterates v_k = lambda^{-k} R^k f converge to a periodic sequence
// (period = lcm of the orders of the peripheral eigenvalue ratios), so the
// average over one detected tail period reaches the Cesaro limit at the
// geometric rate of the non-peripheral remainder; the plain running average
// only converges like 1/n and is kept as the fallback.
inline CesaroResult cesaro_project(const TransferOperator& op, const LaurentPoly& f, cplx lambda,
                                   const CesaroOptions& opt = {}) {
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12)
        throw InvalidParam("cesaro_project: |lambda| must be 1");
    CesaroResult res;
    if (f.is_zero()) {
        res.converged = true;
        return res;
    }

    const cplx lam_inv = std::conj(lambda) / std::norm(lambda);
    std::vector<LaurentPoly> tail;  // last period_cap + 1 iterates
    LaurentPoly v = f;
    LaurentPoly cesaro_sum;  // sum of v_1..v_n
    cplx lam_pow = 1.0;
    int detected_period = 0;

    for (int n = 1; n <= opt.n_max; ++n) {
        v = op.apply(v);
        lam_pow *= lam_inv;
        LaurentPoly vn = v * lam_pow;
        cesaro_sum += vn;
        tail.push_back(vn);
        if (static_cast<int>(tail.size()) > opt.period_cap + 1) tail.erase(tail.begin());

        if (n >= 8 && (n & (n - 1)) == 0) {  // probe at powers of two
            int span = static_cast<int>(tail.size());
            for (int P = 1; P <= span - 1; ++P) {
                double d = sup_grid_norm(tail[span - 1] - tail[span - 1 - P], opt.grid_size);
                if (d <= opt.tol) {
                    detected_period = P;
                    break;
                }
            }
            if (detected_period > 0) {
                LaurentPoly avg;
                int span_now = static_cast<int>(tail.size());
                for (int j = 0; j < detected_period; ++j) avg += tail[span_now - 1 - j];
                avg *= cplx{1.0 / detected_period};
                double residual = sup_grid_norm(op.apply(avg) - lambda * avg, opt.grid_size);
                if (residual <= 100 * opt.tol) {
                    res.value = avg;
                    res.converged = true;
                    res.iterations = n;
                    res.residual = residual;
                    return res;
                }
                detected_period = 0;  // spurious match, keep iterating
            }
        }
    }
    res.value = cesaro_sum * cplx{1.0 / opt.n_max};
    res.converged = false;
    res.iterations = opt.n_max;
    res.residual = sup_grid_norm(op.apply(res.value) - lambda * res.value, opt.grid_size);
    return res;
}

// ---------------------------------------------------------------------------
// Schwarz inequality probe: |R^n(xi h)|^2 <= R^n(|xi|^2 h) h pointwise

inline bool schwarz_check(const TransferOperator& op, const LaurentPoly& xi,
                          const LaurentPoly& h, int n, int grid_size = 1024) {
    LaurentPoly lhs_poly = op.iterate(xi * h, n);
    LaurentPoly rhs_poly = op.iterate(cross_correlation(xi, xi) * h, n);
    for (int i = 0; i < grid_size; ++i) {
        cplx z = std::polar(1.0, two_pi * i / grid_size);
        double hv = eval(h, z).real();
        if (hv < -1e-10) throw NegativeWeight("schwarz_check: weight h negative on grid");
        double lhs = std::norm(eval(lhs_poly, z));
        double rhs = eval(rhs_poly, z).real() * hv;
        if (lhs > rhs + 1e-9) return false;
    }
    return true;
}

}  // namespace ruelle
