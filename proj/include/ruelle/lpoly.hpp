#pragma once

// Laurent (trigonometric) polynomials with sparse integer-degree support,
// points on the unit circle with optional exact rational angles, and the
// circle geometry used throughout: evaluation, cross-correlation,
// rotation, Haar integral and unit-circle root finding.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ruelle/errors.hpp"

namespace ruelle {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// CirclePoint

struct RationalAngle {
    std::int64_t num = 0;  // angle = 2*pi*num/den, 0 <= num < den
    std::int64_t den = 1;

    friend bool operator==(const RationalAngle&, const RationalAngle&) = default;
};

struct CirclePoint {
    cplx value{1.0, 0.0};
    double angle = 0.0;  // radians in [0, 2*pi)
    std::optional<RationalAngle> rational_angle;

    static CirclePoint from_angle(double t) {
        t = std::fmod(t, two_pi);
        if (t < 0) t += two_pi;
        CirclePoint p;
        p.angle = t;
        p.value = std::polar(1.0, t);
        return p;
    }

    static CirclePoint from_rational(std::int64_t num, std::int64_t den) {
        std::int64_t g = std::gcd(std::abs(num), den);
        num /= g;
        den /= g;
        num %= den;
        if (num < 0) num += den;
        CirclePoint p = from_angle(two_pi * static_cast<double>(num) / static_cast<double>(den));
        p.rational_angle = RationalAngle{num, den};
        return p;
    }

    static CirclePoint one() { return from_rational(0, 1); }

    // z^n, exact on the rational-angle lattice when available
    CirclePoint pow(std::int64_t n) const {
        if (rational_angle) {
            // (num*n) mod den without overflow for den <= 2^20
            std::int64_t num = rational_angle->num % rational_angle->den;
            std::int64_t r = (static_cast<std::int64_t>(num) * (n % rational_angle->den)) % rational_angle->den;
            if (r < 0) r += rational_angle->den;
            return from_rational(r, rational_angle->den);
        }
        return from_angle(angle * static_cast<double>(n));
    }

    CirclePoint conj() const {
        if (rational_angle)
            return from_rational(rational_angle->den - rational_angle->num, rational_angle->den);
        return from_angle(-angle);
    }
};

// Best rational approximation a/b of angle/(2*pi) with b <= den_max,
// accepted only when |angle - 2*pi*a/b| <= tol. Continued fractions.
inline std::optional<RationalAngle> snap_rational_angle(double angle, std::int64_t den_max,
                                                        double tol) {
    double x = angle / two_pi;
    x -= std::floor(x);
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = x;
    // first convergent within tol wins, so the smallest admissible denominator
    // is chosen, not the closest large one
    for (int iter = 0; iter < 64; ++iter) {
        double a_f = std::floor(frac);
        auto a = static_cast<std::int64_t>(a_f);
        std::int64_t p2 = a * p1 + p0;
        std::int64_t q2 = a * q1 + q0;
        if (q2 > den_max || q2 <= 0) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        std::int64_t num = p1 % q1;
        if (num < 0) num += q1;
        double snapped = two_pi * static_cast<double>(num) / static_cast<double>(q1);
        if (std::abs(std::remainder(angle - snapped, two_pi)) <= tol)
            return RationalAngle{num, q1};
        double rem = frac - a_f;
        if (rem < 1e-18) break;
        frac = 1.0 / rem;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// LaurentPoly

class LaurentPoly {
  public:
    // support is kept tight: entries below the normalization threshold are dropped
    static constexpr double norm_threshold = 1e-14;

    LaurentPoly() = default;

    explicit LaurentPoly(std::map<int, cplx> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

    static LaurentPoly constant(cplx c) { return LaurentPoly({{0, c}}); }
    static LaurentPoly monomial(int degree, cplx c = 1.0) { return LaurentPoly({{degree, c}}); }
    static LaurentPoly zero() { return {}; }

    const std::map<int, cplx>& coeffs() const { return coeffs_; }

    bool is_zero() const { return coeffs_.empty(); }
    int degree_min() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }
    int degree_max() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

    cplx coeff(int k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? cplx{0.0} : it->second;
    }

    void set_coeff(int k, cplx c) {
        if (std::abs(c) <= norm_threshold)
            coeffs_.erase(k);
        else
            coeffs_[k] = c;
    }

    void add_to_coeff(int k, cplx c) { set_coeff(k, coeff(k) + c); }

    double l1_norm() const {
        double s = 0;
        for (const auto& [k, c] : coeffs_) s += std::abs(c);
        return s;
    }

    double linf_coeff_norm() const {
        double s = 0;
        for (const auto& [k, c] : coeffs_) s = std::max(s, std::abs(c));
        return s;
    }

    LaurentPoly& operator+=(const LaurentPoly& o) {
        for (const auto& [k, c] : o.coeffs_) add_to_coeff(k, c);
        return *this;
    }
    LaurentPoly& operator-=(const LaurentPoly& o) {
        for (const auto& [k, c] : o.coeffs_) add_to_coeff(k, -c);
        return *this;
    }
    LaurentPoly& operator*=(cplx s) {
        std::map<int, cplx> out;
        for (const auto& [k, c] : coeffs_)
            if (std::abs(c * s) > norm_threshold) out[k] = c * s;
        coeffs_ = std::move(out);
        return *this;
    }

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
    friend LaurentPoly operator*(LaurentPoly a, cplx s) { return a *= s; }
    friend LaurentPoly operator*(cplx s, LaurentPoly a) { return a *= s; }

    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly out;
        for (const auto& [i, ci] : a.coeffs_)
            for (const auto& [j, cj] : b.coeffs_) out.add_to_coeff(i + j, ci * cj);
        return out;
    }

    // substitution z -> z^m
    LaurentPoly compose_power(int m) const {
        std::map<int, cplx> out;
        for (const auto& [k, c] : coeffs_) out[k * m] = c;
        return LaurentPoly(std::move(out));
    }

    // conj-reflect: sum c_k z^k -> sum conj(c_k) z^{-k}; equals pointwise
    // conjugation on the circle
    LaurentPoly conj_reflect() const {
        std::map<int, cplx> out;
        for (const auto& [k, c] : coeffs_) out[-k] = std::conj(c);
        return LaurentPoly(std::move(out));
    }

  private:
    void normalize() {
        for (auto it = coeffs_.begin(); it != coeffs_.end();) {
            if (std::abs(it->second) <= norm_threshold)
                it = coeffs_.erase(it);
            else
                ++it;
        }
    }

    std::map<int, cplx> coeffs_;
};

// ---------------------------------------------------------------------------
// Operations

// Horner-style accumulation split at degree 0.
inline cplx eval(const LaurentPoly& p, cplx z) {
    cplx pos = 0, neg = 0;
    int dmax = p.degree_max();
    int dmin = p.degree_min();
    if (dmax >= 1) {
        for (int k = dmax; k >= 1; --k) pos = pos * z + p.coeff(k);
        pos *= z;
    }
    if (dmin <= -1) {
        cplx zi = 1.0 / z;
        for (int k = dmin; k <= -1; ++k) neg = neg * zi + p.coeff(k);
        neg *= zi;
    }
    return pos + p.coeff(0) + neg;
}

inline cplx eval(const LaurentPoly& p, const CirclePoint& z) { return eval(p, z.value); }

// c_j = sum_k conj(p_k) q_{k+j}; on the circle eval(result, z) = conj(p(z)) q(z)
inline LaurentPoly cross_correlation(const LaurentPoly& p, const LaurentPoly& q) {
    LaurentPoly out;
    for (const auto& [k, pk] : p.coeffs())
        for (const auto& [l, ql] : q.coeffs()) out.add_to_coeff(l - k, std::conj(pk) * ql);
    return out;
}

// coefficient k of the result is c_k * rho^k
inline LaurentPoly rotate(const LaurentPoly& p, const CirclePoint& rho) {
    std::map<int, cplx> out;
    for (const auto& [k, c] : p.coeffs()) out[k] = c * rho.pow(k).value;
    return LaurentPoly(std::move(out));
}

// integral against normalized Haar measure; exact for trigonometric polynomials
inline cplx haar_integral(const LaurentPoly& p) { return p.coeff(0); }

// ---------------------------------------------------------------------------
// Unit-circle roots

struct UnitRoot {
    CirclePoint point;
    int multiplicity = 1;
};

struct UnitRootOptions {
    double tol = 1e-8;                        // acceptance band around |root| = 1
    double cluster_tol = 1e-6;                // multiplicity clustering distance
    std::int64_t snap_den_max = (1 << 20) - 1;  // rational-angle snapping bound
    double near_tol = 1e-3;                   // near-circle report band
};

struct UnitRootResult {
    std::vector<UnitRoot> roots;       // on the circle within tol, unit-projected
    std::vector<cplx> near_circle;     // off-circle roots within near_tol, raw
};

// Roots of z^{-degree_min} p as companion-matrix eigenvalues, filtered to the
// unit circle, snapped to rational angles where possible, clustered for
// multiplicities.
inline UnitRootResult unit_circle_roots_full(const LaurentPoly& p,
                                             const UnitRootOptions& opt = {}) {
    if (p.is_zero()) throw DegenerateInput("unit_circle_roots: zero polynomial");
    const int dmin = p.degree_min();
    const int dmax = p.degree_max();
    const int n = dmax - dmin;
    UnitRootResult res;
    if (n == 0) return res;  // nonzero constant, no roots

    Eigen::VectorXcd a(n + 1);
    for (int k = 0; k <= n; ++k) a(k) = p.coeff(dmin + k);
    a /= a(n);

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -a(i);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, /*computeEigenvectors=*/false);

    // Newton polish: companion eigenvalues of an m-fold root are only
    // O(eps^{1/m}) accurate; Newton restores them (linear rate 1 - 1/m)
    auto qval = [&](cplx z) {
        cplx v = 0;
        for (int k = n; k >= 0; --k) v = v * z + a(k);
        return v;
    };
    auto qder = [&](cplx z) {
        cplx v = 0;
        for (int k = n; k >= 1; --k) v = v * z + double(k) * a(k);
        return v;
    };

    std::vector<cplx> polished;
    for (int i = 0; i < n; ++i) {
        cplx r = es.eigenvalues()(i);
        for (int it = 0; it < 60; ++it) {
            cplx d = qder(r);
            if (std::abs(d) < 1e-300) break;
            cplx step = qval(r) / d;
            r -= step;
            if (std::abs(step) < 1e-15) break;
        }
        polished.push_back(r);
    }

    // cluster for multiplicities in two stages: greedy at cluster_tol, then
    // merge clusters whose midpoint residual is at roundoff level. An m-fold
    // root scatters the eigenvalues by O(eps^{1/m}) (1e-4 for m = 4), far
    // beyond any fixed radius, but the polynomial vanishes to roundoff on the
    // whole scatter, while distinct close roots leave a large residual between
    // them.
    double coeff_scale = 0;
    for (int k = 0; k <= n; ++k) coeff_scale += std::abs(a(k));
    const double merge_residual = 1e-10 * coeff_scale;
    const double merge_distance = 1e-2;

    std::sort(polished.begin(), polished.end(),
              [](cplx x, cplx y) { return std::arg(x) < std::arg(y); });
    std::vector<std::pair<cplx, int>> clusters;  // representative, size
    for (cplx r : polished) {
        if (!clusters.empty() && std::abs(clusters.back().first - r) <= opt.cluster_tol)
            ++clusters.back().second;
        else
            clusters.emplace_back(r, 1);
    }
    for (bool merged = true; merged && clusters.size() > 1;) {
        merged = false;
        for (std::size_t i = 0; i < clusters.size() && !merged; ++i)
            for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
                cplx mid = 0.5 * (clusters[i].first + clusters[j].first);
                if (std::abs(clusters[i].first - clusters[j].first) <= merge_distance &&
                    std::abs(qval(mid)) <= merge_residual) {
                    clusters[i].first = mid;
                    clusters[i].second += clusters[j].second;
                    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
                    merged = true;
                }
            }
    }

    // an m-fold root of q is a simple root of q^{(m-1)}: polish there to
    // machine precision (plain Newton stalls at the eps^{1/m} roundoff floor)
    for (auto& [r, mult] : clusters) {
        if (mult < 2) continue;
        Eigen::VectorXcd d = a;
        int deg = n;
        for (int j = 1; j < mult; ++j) {
            for (int k = 1; k <= deg; ++k) d(k - 1) = double(k) * d(k);
            --deg;
        }
        cplx z = r;
        for (int it = 0; it < 60; ++it) {
            cplx f = 0, fp = 0;
            for (int k = deg; k >= 1; --k) {
                f = f * z + d(k);
                fp = fp * z + double(k) * d(k);
            }
            f = f * z + d(0);
            if (std::abs(fp) < 1e-300) break;
            cplx step = f / fp;
            z -= step;
            if (std::abs(step) < 1e-15) break;
        }
        if (std::abs(z - r) <= merge_distance && std::abs(qval(z)) <= merge_residual) r = z;
    }

    for (auto& [r, mult] : clusters) {
        double off = std::abs(std::abs(r) - 1.0);
        if (off > opt.tol) {
            if (off <= opt.near_tol)
                for (int j = 0; j < mult; ++j) res.near_circle.push_back(r);
            continue;
        }
        double ang = std::arg(r);
        if (ang < 0) ang += two_pi;
        CirclePoint cp = CirclePoint::from_angle(ang);
        // roots are polished to near machine precision above, so a tight snap
        // band keeps genuinely irrational angles from landing on large-
        // denominator rationals
        if (auto ra = snap_rational_angle(ang, opt.snap_den_max, 1e-9))
            cp = CirclePoint::from_rational(ra->num, ra->den);
        res.roots.push_back(UnitRoot{cp, mult});
    }
    return res;
}

inline std::vector<UnitRoot> unit_circle_roots(const LaurentPoly& p, double tol = 1e-8) {
    UnitRootOptions opt;
    opt.tol = tol;
    return unit_circle_roots_full(p, opt).roots;
}

}  // namespace ruelle
