#pragma once

// Assembly of the 1D stiffness/mass pencil (K, M) under a configurable
// quadrature pair, plus the interior Toeplitz stencil used by the dispersion
// analysis and a Kronecker composition used as a small-instance oracle.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mixedspec/basis.hpp"
#include "mixedspec/linalg.hpp"
#include "mixedspec/quadrature.hpp"

namespace mixedspec {

template <class Real>
struct QuadraturePair {
    QuadratureRule<Real> rule_stiffness;
    QuadratureRule<Real> rule_mass;
};

template <class Real>
QuadraturePair<Real> same_rule(const QuadratureRule<Real>& rule) {
    return {rule, rule};
}

/// The assembled pencil. K and M are symmetric with half-bandwidth p
/// (plus periodic wrap entries); stored dense since every problem here is
/// desk scale.
template <class Real>
struct Pencil {
    Matrix<Real> K;
    Matrix<Real> M;
    Real h = 0;
    int dof = 0;
    BasisSpec spec;
    QuadraturePair<Real> qpair;
};

/// Dimensionless interior row: A_k = h * K_row, B_k = M_row / h for offsets
/// k = 0..p; the symmetric extension A_{-k} = A_k is implied.
template <class Real>
struct Stencil {
    int p = 0;
    std::vector<Real> A;
    std::vector<Real> B;
};

namespace detail {

// Raw (pre-boundary-removal) function count for the 1D basis.
inline int raw_function_count(const BasisSpec& spec) {
    if (spec.kind == BasisKind::BsplineMaxContinuity) return spec.N + spec.p;
    return spec.N * spec.p + 1;
}

// Maps a raw function index to its global dof, or -1 if removed by the
// homogeneous Dirichlet condition.
inline int raw_to_dof(const BasisSpec& spec, int raw) {
    const int dof = dof_count(spec);
    if (spec.bc == BoundaryCondition::Periodic) {
        int r = raw % dof;
        return r < 0 ? r + dof : r;
    }
    const int last = raw_function_count(spec) - 1;
    if (raw == 0 || raw == last) return -1;
    return raw - 1;
}

inline int first_raw_on_element(const BasisSpec& spec, int element) {
    return spec.kind == BasisKind::BsplineMaxContinuity ? element : element * spec.p;
}

}  // namespace detail

/// Assembles the 1D pencil. Element loops accumulate w * theta_a' theta_b'
/// into K (rule_stiffness) and w * theta_a theta_b into M (rule_mass);
/// Dirichlet removes the first and last basis function, Periodic wraps
/// indices modulo dof.
template <class Real>
Pencil<Real> assemble_1d(const BasisSpec& spec, const QuadraturePair<Real>& qpair) {
    validate(spec);
    if (qpair.rule_stiffness.nodes.empty() || qpair.rule_mass.nodes.empty())
        throw std::invalid_argument("assemble_1d: empty quadrature rule");

    const int dof = dof_count(spec);
    const Real h = Real(1) / Real(spec.N);
    Pencil<Real> pencil;
    pencil.K = Matrix<Real>(dof, dof);
    pencil.M = Matrix<Real>(dof, dof);
    pencil.h = h;
    pencil.dof = dof;
    pencil.spec = spec;
    pencil.qpair = qpair;

    KnotVector<Real> knots;
    if (spec.kind == BasisKind::BsplineMaxContinuity)
        knots = uniform_knots<Real>(spec.p, spec.N, spec.bc);

    const int nloc = spec.p + 1;
    std::vector<int> gdof(nloc);

    auto accumulate = [&](Matrix<Real>& target, const QuadratureRule<Real>& rule,
                          bool use_derivatives) {
        for (int e = 0; e < spec.N; ++e) {
            const Real x0 = Real(e) * h;
            const int raw0 = detail::first_raw_on_element(spec, e);
            for (int a = 0; a < nloc; ++a) gdof[a] = detail::raw_to_dof(spec, raw0 + a);
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const Real w = rule.weights[q] * h / Real(2);
                const Real x = x0 + (rule.nodes[q] + Real(1)) * h / Real(2);
                BasisEvaluation<Real> be;
                if (spec.kind == BasisKind::BsplineMaxContinuity) {
                    be = eval_bspline_on_element(knots, e, x);
                } else {
                    be = eval_lagrange<Real>(spec.p, (x - x0) / h);
                    for (Real& d : be.derivatives) d /= h;  // map to physical
                }
                const std::vector<Real>& f = use_derivatives ? be.derivatives : be.values;
                for (int a = 0; a < nloc; ++a) {
                    if (gdof[a] < 0) continue;
                    for (int b = 0; b < nloc; ++b) {
                        if (gdof[b] < 0) continue;
                        target(gdof[a], gdof[b]) += w * f[a] * f[b];
                    }
                }
            }
        }
    };

    accumulate(pencil.K, qpair.rule_stiffness, true);
    accumulate(pencil.M, qpair.rule_mass, false);
    // Symmetrize exactly: copy the upper triangle onto the lower one.
    pencil.K.mirror_upper();
    pencil.M.mirror_upper();
    return pencil;
}

/// Extracts the interior Toeplitz stencil from a row far from both
/// boundaries (any row for Periodic). B-spline bases only; the C0 Lagrange
/// interior rows are not single-row Toeplitz.
template <class Real>
Stencil<Real> interior_stencil(const BasisSpec& spec, const QuadraturePair<Real>& qpair) {
    if (spec.kind != BasisKind::BsplineMaxContinuity)
        throw std::invalid_argument("interior_stencil: B-spline basis required");
    const int p = spec.p;
    if (spec.N < 2 * p + 2)
        throw std::invalid_argument("interior_stencil: N too small for an interior row");
    const Pencil<Real> pencil = assemble_1d(spec, qpair);

    Stencil<Real> st;
    st.p = p;
    st.A.assign(p + 1, Real(0));
    st.B.assign(p + 1, Real(0));
    if (spec.bc == BoundaryCondition::Periodic) {
        for (int k = 0; k <= p; ++k) {
            st.A[k] = pencil.h * pencil.K(0, k);
            st.B[k] = pencil.M(0, k) / pencil.h;
        }
        return st;
    }
    // Raw functions p .. N-1 are interior cardinal splines. Pick the most
    // central raw row whose entries (row, row+k) stay cardinal on both ends.
    const int lo = p, hi = spec.N - 1 - p;
    int raw = (spec.N + p - 1) / 2;
    raw = std::max(lo, std::min(raw, hi));
    const int r = raw - 1;  // dof index after Dirichlet removal
    for (int k = 0; k <= p; ++k) {
        st.A[k] = pencil.h * pencil.K(r, r + k);
        st.B[k] = pencil.M(r, r + k) / pencil.h;
    }
    return st;
}

/// Tensor-product pencil in dimension 2 or 3 by Kronecker composition;
/// a small-instance oracle for the separable spectra.
template <class Real>
std::pair<Matrix<Real>, Matrix<Real>> assemble_kron(const Pencil<Real>& pencil, int dim) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("assemble_kron: dim must be 2 or 3");
    double total = 1;
    for (int d = 0; d < dim; ++d) total *= pencil.dof;
    if (total > 10000) throw std::invalid_argument("assemble_kron: size cap exceeded");

    const Matrix<Real>& K = pencil.K;
    const Matrix<Real>& M = pencil.M;
    if (dim == 2) {
        Matrix<Real> K2 = kron(K, M) + kron(M, K);
        Matrix<Real> M2 = kron(M, M);
        return {std::move(K2), std::move(M2)};
    }
    Matrix<Real> K3 = kron(kron(K, M), M) + kron(kron(M, K), M) + kron(kron(M, M), K);
    Matrix<Real> M3 = kron(kron(M, M), M);
    return {std::move(K3), std::move(M3)};
}

}  // namespace mixedspec
