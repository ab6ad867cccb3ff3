#pragma once

// Discrete approximation spaces: maximum-continuity B-splines on uniform
// knot vectors (Cox-de Boor evaluation) and C0 Lagrange elements on
// equispaced nodes. Evaluation only; index bookkeeping lives in assembly.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mixedspec {

enum class BasisKind { BsplineMaxContinuity, LagrangeC0 };
enum class BoundaryCondition { DirichletHomogeneous, Periodic };

struct BasisSpec {
    BasisKind kind = BasisKind::BsplineMaxContinuity;
    int p = 1;  // polynomial order >= 1
    int N = 2;  // uniform elements >= 2
    BoundaryCondition bc = BoundaryCondition::DirichletHomogeneous;
};

inline void validate(const BasisSpec& spec) {
    if (spec.p < 1) throw std::invalid_argument("basis: order p must be >= 1");
    if (spec.N < 2) throw std::invalid_argument("basis: need at least 2 elements");
    if (spec.kind == BasisKind::LagrangeC0 && spec.p > 4)
        throw std::invalid_argument("basis: Lagrange elements supported for p <= 4");
}

/// Number of global degrees of freedom after boundary treatment.
inline int dof_count(const BasisSpec& spec) {
    validate(spec);
    const bool dirichlet = spec.bc == BoundaryCondition::DirichletHomogeneous;
    if (spec.kind == BasisKind::BsplineMaxContinuity)
        return dirichlet ? spec.N + spec.p - 2 : spec.N;
    return dirichlet ? spec.N * spec.p - 1 : spec.N * spec.p;
}

template <class Real>
struct KnotVector {
    std::vector<Real> values;  // nondecreasing
    int degree = 0;
    int elements = 0;

    // Index into `values` of the knot span covering element e.
    int span_of_element(int e) const { return degree + e; }
};

/// Uniform knot vector on [0,1]. Dirichlet: open (end knots repeated p+1
/// times). Periodic: uniform knots extended by p ghost knots on each side;
/// basis functions are identified modulo N by the assembly.
template <class Real>
KnotVector<Real> uniform_knots(int p, int N, BoundaryCondition bc) {
    if (p < 1 || N < 2) throw std::invalid_argument("uniform_knots: invalid p or N");
    KnotVector<Real> kv;
    kv.degree = p;
    kv.elements = N;
    if (bc == BoundaryCondition::DirichletHomogeneous) {
        kv.values.reserve(2 * (p + 1) + N - 1);
        for (int i = 0; i <= p; ++i) kv.values.push_back(Real(0));
        for (int i = 1; i < N; ++i) kv.values.push_back(Real(i) / Real(N));
        for (int i = 0; i <= p; ++i) kv.values.push_back(Real(1));
    } else {
        kv.values.reserve(N + 2 * p + 1);
        for (int i = -p; i <= N + p; ++i) kv.values.push_back(Real(i) / Real(N));
    }
    return kv;
}

/// Values and first derivatives of the p+1 basis functions that may be
/// nonzero at a point; first_index is the index of the first one among all
/// functions of the knot vector (before any boundary removal).
template <class Real>
struct BasisEvaluation {
    int first_index = 0;
    std::vector<Real> values;
    std::vector<Real> derivatives;
};

namespace detail {

// Cox-de Boor on one knot span (values plus first derivatives); the span is
// given explicitly so callers can force evaluation from within a particular
// element even when x sits on its boundary.
template <class Real>
BasisEvaluation<Real> bspline_span_eval(const KnotVector<Real>& kv, int span, Real x) {
    const int p = kv.degree;
    const std::vector<Real>& t = kv.values;
    std::vector<Real> left(p + 1, Real(0)), right(p + 1, Real(0));
    std::vector<std::vector<Real>> ndu(p + 1, std::vector<Real>(p + 1, Real(0)));
    ndu[0][0] = Real(1);
    for (int j = 1; j <= p; ++j) {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        Real saved(0);
        for (int r = 0; r < j; ++r) {
            // 0/0 never occurs here: ndu[j][r] is a span length, positive for
            // the non-degenerate spans this library constructs.
            ndu[j][r] = right[r + 1] + left[j - r];
            const Real temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    BasisEvaluation<Real> out;
    out.first_index = span - p;
    out.values.resize(p + 1);
    out.derivatives.assign(p + 1, Real(0));
    for (int r = 0; r <= p; ++r) out.values[r] = ndu[r][p];
    if (p >= 1) {
        for (int r = 0; r <= p; ++r) {
            Real d(0);
            if (r >= 1) d += ndu[r - 1][p - 1] / ndu[p][r - 1];
            if (r <= p - 1) d -= ndu[r][p - 1] / ndu[p][r];
            out.derivatives[r] = Real(p) * d;
        }
    }
    return out;
}

}  // namespace detail

/// Evaluation at x in [0,1] with the half-open span convention; x = 1 is
/// assigned to the last element so the endpoint is not dropped.
template <class Real>
BasisEvaluation<Real> eval_bspline(const KnotVector<Real>& kv, Real x) {
    if (x < Real(0) || x > Real(1))
        throw std::invalid_argument("eval_bspline: x outside [0,1]");
    const int N = kv.elements;
    int e = static_cast<int>(std::floor(x * Real(N)));
    if (e >= N) e = N - 1;
    // Guard against floor landing one element off at representable knots.
    const Real lo = Real(e) / Real(N);
    if (x < lo && e > 0) --e;
    return detail::bspline_span_eval(kv, kv.span_of_element(e), x);
}

/// Evaluation pinned to element e; used by assembly so that quadrature nodes
/// on element boundaries (Lobatto, Radau) see the polynomial piece of the
/// element being integrated.
template <class Real>
BasisEvaluation<Real> eval_bspline_on_element(const KnotVector<Real>& kv, int element, Real x) {
    if (element < 0 || element >= kv.elements)
        throw std::invalid_argument("eval_bspline_on_element: element out of range");
    return detail::bspline_span_eval(kv, kv.span_of_element(element), x);
}

/// Nodal Lagrange basis of order p on [0,1] with p+1 equispaced nodes;
/// returns values and first derivatives (with respect to the reference
/// coordinate) at local coordinate xi.
template <class Real>
BasisEvaluation<Real> eval_lagrange(int p, Real xi) {
    if (p < 1 || p > 4) throw std::invalid_argument("eval_lagrange: p outside 1..4");
    BasisEvaluation<Real> out;
    out.values.assign(p + 1, Real(1));
    out.derivatives.assign(p + 1, Real(0));
    auto node = [p](int i) { return Real(i) / Real(p); };
    for (int i = 0; i <= p; ++i) {
        Real v(1);
        for (int k = 0; k <= p; ++k)
            if (k != i) v *= (xi - node(k)) / (node(i) - node(k));
        out.values[i] = v;
        Real d(0);
        for (int m = 0; m <= p; ++m) {
            if (m == i) continue;
            Real term = Real(1) / (node(i) - node(m));
            for (int k = 0; k <= p; ++k)
                if (k != i && k != m) term *= (xi - node(k)) / (node(i) - node(k));
            d += term;
        }
        out.derivatives[i] = d;
    }
    return out;
}

}  // namespace mixedspec
