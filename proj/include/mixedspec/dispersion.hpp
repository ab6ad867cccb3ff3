#pragma once

// Dispersion analysis of the interior Toeplitz symbol: the ratio R(L) of the
// stiffness and mass symbols, extraction of its leading Taylor-error
// exponent and coefficient, the optimal-blend parameter search, and the
// leading eigenvalue error prediction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mixedspec/assembly.hpp"
#include "mixedspec/operators.hpp"
#include "mixedspec/quadrature.hpp"

namespace mixedspec {

/// Sampled symbol ratio R(L) over L = omega h in (0, pi).
template <class Real>
struct SymbolProfile {
    int p = 0;
    Stencil<Real> stencil;
    std::vector<std::pair<Real, Real>> samples;  // (L, R(L))
};

/// Leading-term fit of R(L) - L^2 ~ coefficient * L^exponent.
template <class Real>
struct ExpansionFit {
    Real exponent = 0;      // least-squares slope of log|R - L^2| vs log L
    Real coefficient = 0;   // Richardson estimate at the hinted order
    Real fit_residual = 0;  // max abs log-space residual of the slope fit
    bool ladder_truncated = false;  // cancellation floor removed small-L rungs
};

/// R(L) = (A_0 + 2 sum A_k cos kL) / (B_0 + 2 sum B_k cos kL).
template <class Real>
Real symbol_ratio(const Stencil<Real>& st, Real L) {
    const Real pi = std::numbers::pi_v<Real>;
    if (!(L > Real(0) && L < pi))
        throw std::invalid_argument("symbol_ratio: L must lie in (0, pi)");
    Real num = st.A[0], den = st.B[0];
    for (int k = 1; k <= st.p; ++k) {
        const Real c = std::cos(Real(k) * L);
        num += Real(2) * st.A[k] * c;
        den += Real(2) * st.B[k] * c;
    }
    if (std::abs(den) < Real(1e-14)) throw std::domain_error("symbol_ratio: singular symbol");
    return num / den;
}

template <class Real>
SymbolProfile<Real> sample_symbol(const Stencil<Real>& st, int count) {
    SymbolProfile<Real> prof;
    prof.p = st.p;
    prof.stencil = st;
    const Real pi = std::numbers::pi_v<Real>;
    for (int i = 1; i <= count; ++i) {
        const Real L = pi * Real(i) / Real(count + 1);
        prof.samples.emplace_back(L, symbol_ratio(st, L));
    }
    return prof;
}

namespace detail {

// Neville extrapolation to zero of the even series c(L) sampled on a
// geometric ladder, with abscissae L^2.
template <class Real>
Real richardson_to_zero(const std::vector<Real>& ladder, const std::vector<Real>& c) {
    const int n = static_cast<int>(ladder.size());
    std::vector<Real> x(n), tab(c.begin(), c.end());
    for (int i = 0; i < n; ++i) x[i] = ladder[i] * ladder[i];
    for (int k = 1; k < n; ++k)
        for (int i = n - 1; i >= k; --i)
            tab[i] = tab[i] + (tab[i] - tab[i - 1]) * x[i] / (x[i - k] - x[i]);
    return tab[n - 1];
}

// Exact Taylor coefficient of the symbol-error numerator
// A(L) - L^2 B(L) at order 2m. Because the mass symbol is 1 + O(L^2), this
// equals the leading nonzero coefficient of R(L) - L^2.
template <class Real>
Real symbol_numerator_coefficient(const Stencil<Real>& st, int m) {
    Real sum(0);
    for (int k = 1; k <= st.p; ++k) {
        Real pow_a(1), pow_b(1);
        Real fact_a(1), fact_b(1);
        for (int i = 1; i <= 2 * m; ++i) {
            pow_a *= Real(k);
            fact_a *= Real(i);
        }
        for (int i = 1; i <= 2 * m - 2; ++i) {
            pow_b *= Real(k);
            fact_b *= Real(i);
        }
        sum += st.A[k] * pow_a / fact_a + st.B[k] * pow_b / fact_b;
    }
    const Real sign = (m % 2 == 0) ? Real(1) : Real(-1);
    return Real(2) * sign * sum;
}

template <class Real>
Stencil<Real> blended_stencil(int p, BlendFamily family, Real tau) {
    const QuadratureRule<Real> a = gauss_legendre<Real>(p + 1);
    const QuadratureRule<Real> b = (family == BlendFamily::GaussGauss)
                                       ? gauss_legendre<Real>(p)
                                       : gauss_lobatto<Real>(p + 1);
    BasisSpec spec{BasisKind::BsplineMaxContinuity, p, std::max(2 * p + 2, 8),
                   BoundaryCondition::Periodic};
    return interior_stencil(spec, same_rule(blend_rules(a, b, tau)));
}

}  // namespace detail

/// Measures the leading error term of R(L) - L^2 on the geometric ladder
/// L in {0.8, 0.4, 0.2, 0.1, 0.05}. Rungs where the difference sits below
/// the cancellation floor (1e3 eps |R|) are dropped from below. The exponent
/// comes from a least-squares log-log slope, the coefficient from Richardson
/// extrapolation at the hinted order.
template <class Real>
ExpansionFit<Real> error_expansion(const Stencil<Real>& st, int expected_order_hint) {
    const Real eps = std::numeric_limits<Real>::epsilon();
    std::vector<Real> ladder = {Real(0.8), Real(0.4), Real(0.2), Real(0.1), Real(0.05)};
    std::vector<Real> diff(ladder.size());

    // Rounding scale of the stencil sums; R - L^2 is meaningless below it.
    Real stencil_scale = std::abs(st.A[0]) + std::abs(st.B[0]);
    for (int k = 1; k <= st.p; ++k)
        stencil_scale += Real(2) * (std::abs(st.A[k]) + std::abs(st.B[k]));

    ExpansionFit<Real> fit;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const Real R = symbol_ratio(st, ladder[i]);
        diff[i] = R - ladder[i] * ladder[i];
        if (std::abs(diff[i]) < Real(1e3) * eps * (std::abs(R) + stencil_scale)) {
            ladder.resize(i);  // cancellation floor: shrink from below
            diff.resize(i);
            fit.ladder_truncated = true;
            break;
        }
    }
    if (ladder.size() < 2) throw std::domain_error("error_expansion: ladder collapsed");

    // Slope of log|R - L^2| against log L. Consecutive-rung slopes carry a
    // deviation linear in (L_i^2 - L_{i+1}^2) / log(L_i / L_{i+1}) from the
    // next series term, so extrapolating them to zero removes the curvature
    // bias a plain least-squares fit keeps.
    const int n = static_cast<int>(ladder.size());
    std::vector<Real> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        lx[i] = std::log(ladder[i]);
        ly[i] = std::log(std::abs(diff[i]));
    }
    if (n == 2) {
        fit.exponent = (ly[1] - ly[0]) / (lx[1] - lx[0]);
    } else {
        std::vector<Real> s(n - 1), x(n - 1);
        for (int i = 0; i + 1 < n; ++i) {
            s[i] = (ly[i + 1] - ly[i]) / (lx[i + 1] - lx[i]);
            x[i] = (ladder[i] * ladder[i] - ladder[i + 1] * ladder[i + 1]) / (lx[i] - lx[i + 1]);
        }
        for (int k = 1; k < n - 1; ++k)
            for (int i = n - 2; i >= k; --i)
                s[i] = s[i] + (s[i] - s[i - 1]) * x[i] / (x[i - k] - x[i]);
        fit.exponent = s[n - 2];
    }
    {
        Real sx(0), sy(0), sxx(0), sxy(0);
        for (int i = 0; i < n; ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const Real slope = (Real(n) * sxy - sx * sy) / (Real(n) * sxx - sx * sx);
        const Real intercept = (sy - slope * sx) / Real(n);
        for (int i = 0; i < n; ++i)
            fit.fit_residual = std::max(fit.fit_residual,
                                        std::abs(ly[i] - slope * lx[i] - intercept));
    }

    std::vector<Real> c(n);
    for (int i = 0; i < n; ++i)
        c[i] = diff[i] / std::pow(ladder[i], Real(expected_order_hint));
    fit.coefficient = detail::richardson_to_zero(ladder, c);
    return fit;
}

/// Finds the blending parameter annihilating the order-(2p+2) error
/// coefficient. The coefficient is evaluated through the exact finite-sum
/// form of the symbol-error numerator (affine in tau), and the root is
/// located by secant iteration from tau in {0, 1} to 1e-10.
template <class Real>
Real find_optimal_tau(int p, BlendFamily family) {
    if (p < 1) throw std::invalid_argument("find_optimal_tau: p must be >= 1");
    const int m = p + 1;  // coefficient order 2p+2
    auto c_of_tau = [&](Real tau) {
        return detail::symbol_numerator_coefficient(detail::blended_stencil(p, family, tau), m);
    };

    Real t0(0), t1(1);
    Real c0 = c_of_tau(t0), c1 = c_of_tau(t1);
    Real tau = t1;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        if (c1 == c0) break;
        tau = t1 - c1 * (t1 - t0) / (c1 - c0);
        if (std::abs(tau - t1) < Real(1e-10)) {
            converged = true;
            break;
        }
        t0 = t1;
        c0 = c1;
        t1 = tau;
        c1 = c_of_tau(t1);
    }
    if (!converged) throw std::runtime_error("find_optimal_tau: secant did not converge");

    // The coefficient must change sign across the root.
    const Real delta = Real(1e-3) * (Real(1) + std::abs(tau));
    const Real below = c_of_tau(tau - delta), above = c_of_tau(tau + delta);
    if (!(below == Real(0) || above == Real(0) || (below < Real(0)) != (above < Real(0))))
        throw std::runtime_error("find_optimal_tau: no sign change across the root");
    return tau;
}

/// Theorem-1 leading eigenvalue error term,
/// (C sum_{k>=1} a_k omega^{2k}) (omega h)^{q-2}, with (q, C) fitted from
/// the stencil's measured symbol error.
template <class Real>
Real eigenvalue_error_prediction(const OperatorSpec<Real>& op, const Stencil<Real>& st,
                                 Real omega, Real h) {
    if (!(omega * h < Real(1)))
        throw std::invalid_argument("eigenvalue_error_prediction: need omega h < 1");
    ExpansionFit<Real> probe = error_expansion(st, 4);
    const int q = 2 * static_cast<int>(std::round(probe.exponent / Real(2)));
    const ExpansionFit<Real> fit = error_expansion(st, q);

    Real sum(0), w2k(1);
    const Real w2 = omega * omega;
    for (int k = 1; k <= op.n; ++k) {
        w2k *= w2;
        sum += op.coefficients[k] * w2k;
    }
    return fit.coefficient * sum * std::pow(omega * h, Real(q - 2));
}

}  // namespace mixedspec
