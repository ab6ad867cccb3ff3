#pragma once

// Quadrature rules on the reference interval [-1, 1]: Gauss-Legendre,
// Gauss-Lobatto, Gauss-Radau, affine blends of two rules, and the tabulated
// optimal blends for isogeometric mass/stiffness integration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mixedspec {

/// Nodes and weights on [-1, 1] together with the highest polynomial degree
/// the rule integrates exactly (-1 when unknown or blend-dependent).
template <class Real>
struct QuadratureRule {
    std::vector<Real> nodes;    // strictly increasing
    std::vector<Real> weights;  // same length; may be signed for blends
    int exactness_degree = -1;
};

enum class BlendFamily {
    GaussGauss,    // tau * G_{p+1} + (1 - tau) * G_p
    GaussLobatto,  // tau * G_{p+1} + (1 - tau) * L_{p+1}
};

template <class Real>
struct BlendSpec {
    BlendFamily family;
    Real tau;
};

namespace detail {

constexpr int kMaxQuadraturePoints = 32;

// P_l(x) and P_l'(x) by the three-term recurrence.
template <class Real>
void legendre_eval(int l, Real x, Real& p, Real& dp) {
    Real p0(1), p1 = x;
    if (l == 0) {
        p = p0;
        dp = Real(0);
        return;
    }
    for (int k = 2; k <= l; ++k) {
        const Real p2 = ((Real(2 * k - 1)) * x * p1 - Real(k - 1) * p0) / Real(k);
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    // (x^2 - 1) P_l' = l (x P_l - P_{l-1})
    if (std::abs(x) == Real(1)) {
        dp = x * Real(l) * Real(l + 1) / Real(2);
        if (l % 2 == 0 && x < Real(0)) dp = -dp;
    } else {
        dp = Real(l) * (x * p1 - p0) / (x * x - Real(1));
    }
}

template <class Real>
Real newton_legendre_root(int l, Real x0) {
    Real x = x0;
    const Real tol = Real(10) * std::numeric_limits<Real>::epsilon();
    for (int it = 0; it < 100; ++it) {
        Real p, dp;
        legendre_eval(l, x, p, dp);
        const Real dx = p / dp;
        x -= dx;
        if (std::abs(p) < Real(1e-15) && std::abs(dx) <= tol * (Real(1) + std::abs(x))) break;
    }
    return x;
}

}  // namespace detail

/// l-point Gauss-Legendre rule; exact through degree 2l-1. Nodes are the
/// roots of P_l found by Newton iteration from Chebyshev initial guesses;
/// the rule is mirrored about 0 so symmetry holds exactly.
template <class Real>
QuadratureRule<Real> gauss_legendre(int l) {
    if (l < 1 || l > detail::kMaxQuadraturePoints)
        throw std::invalid_argument("gauss_legendre: point count out of supported range");
    QuadratureRule<Real> rule;
    rule.nodes.assign(l, Real(0));
    rule.weights.assign(l, Real(0));
    rule.exactness_degree = 2 * l - 1;

    const Real pi = Real(3.14159265358979323846264338327950288L);
    for (int i = 0; i < l / 2; ++i) {
        // Chebyshev-angle guess for the i-th root in descending order.
        const Real guess = std::cos(pi * (Real(4 * i + 3)) / (Real(4 * l + 2)));
        const Real x = detail::newton_legendre_root(l, guess);
        Real p, dp;
        detail::legendre_eval(l, x, p, dp);
        const Real w = Real(2) / ((Real(1) - x * x) * dp * dp);
        rule.nodes[l - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[l - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (l % 2 == 1) {
        Real p, dp;
        detail::legendre_eval(l, Real(0), p, dp);
        rule.nodes[l / 2] = Real(0);
        rule.weights[l / 2] = Real(2) / (dp * dp);
    }
    return rule;
}

/// l-point Gauss-Lobatto rule (endpoints included); exact through 2l-3.
/// Interior nodes are the roots of P_{l-1}', bracketed by consecutive
/// Gauss-Legendre nodes of P_{l-1} and polished by Newton.
template <class Real>
QuadratureRule<Real> gauss_lobatto(int l) {
    if (l < 2 || l > detail::kMaxQuadraturePoints)
        throw std::invalid_argument("gauss_lobatto: need at least 2 points");
    QuadratureRule<Real> rule;
    rule.nodes.assign(l, Real(0));
    rule.weights.assign(l, Real(0));
    rule.exactness_degree = 2 * l - 3;

    const int m = l - 1;  // interior nodes are extrema of P_m
    auto dP = [&](Real x) {
        Real p, dp;
        detail::legendre_eval(m, x, p, dp);
        return dp;
    };
    auto d2P = [&](Real x) {
        Real p, dp;
        detail::legendre_eval(m, x, p, dp);
        // (1 - x^2) P'' = 2 x P' - m (m + 1) P
        return (Real(2) * x * dp - Real(m) * Real(m + 1) * p) / (Real(1) - x * x);
    };

    std::vector<Real> interior;
    if (m >= 2) {
        const QuadratureRule<Real> brackets = gauss_legendre<Real>(m);
        for (int i = 0; i + 1 < m; ++i) {
            Real lo = brackets.nodes[i], hi = brackets.nodes[i + 1];
            Real x = (lo + hi) / Real(2);
            const Real tol = Real(4) * std::numeric_limits<Real>::epsilon();
            for (int it = 0; it < 200; ++it) {
                const Real f = dP(x);
                Real step = f / d2P(x);
                Real xn = x - step;
                if (!(xn > lo && xn < hi)) {  // bisection fallback
                    if ((dP(lo) < Real(0)) == (f < Real(0)))
                        lo = x;
                    else
                        hi = x;
                    xn = (lo + hi) / Real(2);
                }
                const bool done = std::abs(xn - x) <= tol * (Real(1) + std::abs(xn));
                x = xn;
                if (done) break;
            }
            interior.push_back(x);
        }
    }

    rule.nodes.front() = Real(-1);
    rule.nodes.back() = Real(1);
    const Real wend = Real(2) / (Real(l) * Real(l - 1));
    rule.weights.front() = wend;
    rule.weights.back() = wend;
    // Mirror interior nodes to keep the rule exactly symmetric.
    const int ni = static_cast<int>(interior.size());
    for (int i = 0; i < ni; ++i) {
        Real x = interior[i];
        const Real xm = -interior[ni - 1 - i];
        x = (x + xm) / Real(2);
        Real p, dp;
        detail::legendre_eval(m, x, p, dp);
        rule.nodes[1 + i] = x;
        rule.weights[1 + i] = Real(2) / (Real(l) * Real(l - 1) * p * p);
    }
    return rule;
}

/// l-point Gauss-Radau rule with a node fixed at -1; exact through 2l-2.
template <class Real>
QuadratureRule<Real> gauss_radau(int l) {
    if (l < 1 || l > detail::kMaxQuadraturePoints)
        throw std::invalid_argument("gauss_radau: point count out of supported range");
    QuadratureRule<Real> rule;
    rule.exactness_degree = 2 * l - 2;
    rule.nodes.push_back(Real(-1));
    rule.weights.push_back(Real(2) / (Real(l) * Real(l)));
    if (l == 1) {
        rule.weights[0] = Real(2);
        return rule;
    }

    // Interior nodes: roots of (P_{l-1} + P_l) / (1 + x), located by a scan
    // for sign changes followed by bisection plus Newton polishing.
    auto f = [&](Real x) {
        Real pa, dpa, pb, dpb;
        detail::legendre_eval(l - 1, x, pa, dpa);
        detail::legendre_eval(l, x, pb, dpb);
        return (pa + pb) / (Real(1) + x);
    };
    const int scan = 512 * l;
    Real xprev = Real(-1) + Real(1) / Real(scan);
    Real fprev = f(xprev);
    std::vector<Real> roots;
    for (int i = 2; i <= scan; ++i) {
        const Real x = Real(-1) + Real(2) * Real(i) / Real(scan + 1);
        const Real fx = f(x);
        if ((fprev < Real(0)) != (fx < Real(0))) {
            Real lo = xprev, hi = x, flo = fprev;
            for (int it = 0; it < 200; ++it) {
                const Real mid = (lo + hi) / Real(2);
                if (mid == lo || mid == hi) break;
                const Real fm = f(mid);
                if ((flo < Real(0)) == (fm < Real(0))) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back((lo + hi) / Real(2));
        }
        xprev = x;
        fprev = fx;
    }
    if (static_cast<int>(roots.size()) != l - 1)
        throw std::runtime_error("gauss_radau: failed to locate interior nodes");

    for (const Real& x : roots) {
        Real p, dp;
        detail::legendre_eval(l - 1, x, p, dp);
        rule.nodes.push_back(x);
        rule.weights.push_back((Real(1) - x) / (Real(l) * Real(l) * p * p));
    }
    return rule;
}

/// Affine combination tau * a + (1 - tau) * b. Nodes are concatenated and
/// sorted; abscissae closer than 1e-12 are merged with their weights summed.
template <class Real>
QuadratureRule<Real> blend_rules(const QuadratureRule<Real>& a, const QuadratureRule<Real>& b,
                                 Real tau) {
    std::vector<std::pair<Real, Real>> pts;
    pts.reserve(a.nodes.size() + b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i)
        pts.emplace_back(a.nodes[i], tau * a.weights[i]);
    for (std::size_t i = 0; i < b.nodes.size(); ++i)
        pts.emplace_back(b.nodes[i], (Real(1) - tau) * b.weights[i]);
    std::sort(pts.begin(), pts.end(),
              [](const auto& u, const auto& v) { return u.first < v.first; });

    QuadratureRule<Real> out;
    const Real merge_tol = Real(1e-12);
    for (const auto& [x, w] : pts) {
        if (!out.nodes.empty() && std::abs(x - out.nodes.back()) <= merge_tol) {
            out.weights.back() += w;
        } else {
            out.nodes.push_back(x);
            out.weights.push_back(w);
        }
    }
    out.exactness_degree = std::min(a.exactness_degree, b.exactness_degree);
    return out;
}

/// Table of optimal blending parameters, p = 1..4.
template <class Real>
Real optimal_blend_parameter(int p, BlendFamily family) {
    if (p < 1 || p > 4)
        throw std::domain_error(
            "optimal_blend: no tabulated parameter for p outside 1..4 "
            "(use find_optimal_tau)");
    static constexpr double tau_gg[] = {2.0, 2.0, 13.0 / 3.0, 22.0};
    static constexpr double tau_gl[] = {0.5, 1.0 / 3.0, -1.5, -79.0 / 5.0};
    return Real(family == BlendFamily::GaussGauss ? tau_gg[p - 1] : tau_gl[p - 1]);
}

/// Optimally-blended rule for order p with tabulated tau.
template <class Real>
QuadratureRule<Real> optimal_blend(int p, BlendFamily family) {
    const Real tau = optimal_blend_parameter<Real>(p, family);
    const QuadratureRule<Real> a = gauss_legendre<Real>(p + 1);
    const QuadratureRule<Real> b = (family == BlendFamily::GaussGauss)
                                       ? gauss_legendre<Real>(p)
                                       : gauss_lobatto<Real>(p + 1);
    return blend_rules(a, b, tau);
}

/// Integrates f over [x_lo, x_hi] with the affinely mapped rule.
template <class Real, class F>
Real integrate(const QuadratureRule<Real>& rule, F&& f, Real x_lo, Real x_hi) {
    if (!(x_lo < x_hi)) throw std::invalid_argument("integrate: need x_lo < x_hi");
    const Real h = x_hi - x_lo;
    Real s(0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * (h / Real(2)) * f(x_lo + (rule.nodes[i] + Real(1)) * h / Real(2));
    return s;
}

}  // namespace mixedspec
