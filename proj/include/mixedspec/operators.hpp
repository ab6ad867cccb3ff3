#pragma once

// Operator presets (polynomials in the negative Laplacian) and the analytic
// eigenvalue/eigenfunction oracle on the unit box used for error reporting.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mixedspec {

/// L = sum_{m=0}^n a_m (-Laplacian)^m with constant coefficients, a_n != 0.
template <class Real>
struct OperatorSpec {
    int n = 1;
    std::vector<Real> coefficients;  // a_0 .. a_n
    std::string name;

    /// Evaluates sum a_m s^m with s = |omega|^2 (the operator symbol).
    Real evaluate(Real s) const {
        Real acc = coefficients.back();
        for (int m = n - 1; m >= 0; --m) acc = acc * s + coefficients[m];
        return acc;
    }
};

template <class Real>
OperatorSpec<Real> make_operator(std::vector<Real> coefficients, std::string name = {}) {
    if (coefficients.size() < 2)
        throw std::invalid_argument("operator: need order n >= 1 (coefficients a_0..a_n)");
    if (coefficients.back() == Real(0))
        throw std::invalid_argument("operator: leading coefficient a_n must be nonzero");
    OperatorSpec<Real> op;
    op.n = static_cast<int>(coefficients.size()) - 1;
    op.coefficients = std::move(coefficients);
    op.name = std::move(name);
    return op;
}

/// Named presets: laplace, biharmonic, cahn_hilliard4, swift_hohenberg,
/// cahn_hilliard6, phase_field_crystal.
template <class Real>
OperatorSpec<Real> preset(std::string_view name) {
    if (name == "laplace") return make_operator<Real>({0, 1}, "laplace");
    if (name == "biharmonic") return make_operator<Real>({0, 0, 1}, "biharmonic");
    if (name == "cahn_hilliard4") return make_operator<Real>({0, 1, 1}, "cahn_hilliard4");
    if (name == "swift_hohenberg") return make_operator<Real>({1, -2, 1}, "swift_hohenberg");
    if (name == "cahn_hilliard6") return make_operator<Real>({0, 0, 1, 1}, "cahn_hilliard6");
    if (name == "phase_field_crystal")
        return make_operator<Real>({0, 1, -2, 1}, "phase_field_crystal");
    throw std::invalid_argument("unknown operator preset: " + std::string(name));
}

inline const std::array<std::string_view, 6>& preset_names() {
    static const std::array<std::string_view, 6> names = {
        "laplace",        "biharmonic",      "cahn_hilliard4",
        "swift_hohenberg", "cahn_hilliard6", "phase_field_crystal"};
    return names;
}

/// SineModes: omega = j*pi, j >= 1 per direction (homogeneous Dirichlet).
/// FourierModes: omega = 2*pi*j, j >= 0, nonzero modes duplicated (periodic).
enum class ModeConvention { SineModes, FourierModes };

template <class Real>
struct ExactMode {
    std::array<int, 3> index{0, 0, 0};  // per-direction mode numbers
    Real lambda = 0;
};

template <class Real>
struct ExactSpectrum {
    std::vector<ExactMode<Real>> entries;  // ascending by lambda
    ModeConvention convention = ModeConvention::SineModes;
    int dim = 1;
};

/// The `count` smallest exact eigenvalues of the operator on [0,1]^dim.
template <class Real>
ExactSpectrum<Real> exact_eigenvalues(const OperatorSpec<Real>& op, int dim,
                                      ModeConvention convention, int count) {
    if (count < 1) throw std::invalid_argument("exact_eigenvalues: count must be >= 1");
    if (dim < 1 || dim > 3) throw std::invalid_argument("exact_eigenvalues: dim must be 1..3");
    const Real pi = std::numbers::pi_v<Real>;

    // Per-direction frequency ladder with a margin so that truncation to
    // `count` after sorting cannot lose a smaller mode.
    const int per_dir = static_cast<int>(std::ceil(std::pow(double(count), 1.0 / dim))) + 3;
    std::vector<std::pair<int, Real>> freq;  // (mode number, omega)
    if (convention == ModeConvention::SineModes) {
        for (int j = 1; j <= per_dir; ++j) freq.emplace_back(j, Real(j) * pi);
    } else {
        freq.emplace_back(0, Real(0));
        for (int j = 1; j <= per_dir; ++j) {
            freq.emplace_back(j, Real(2 * j) * pi);
            freq.emplace_back(j, Real(2 * j) * pi);  // sine and cosine pair
        }
    }

    ExactSpectrum<Real> spec;
    spec.convention = convention;
    spec.dim = dim;
    const std::size_t nf = freq.size();
    const std::size_t n2 = dim >= 2 ? nf : 1;
    const std::size_t n3 = dim >= 3 ? nf : 1;
    spec.entries.reserve(nf * n2 * n3);
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            for (std::size_t k = 0; k < n3; ++k) {
                Real s = freq[i].second * freq[i].second;
                if (dim >= 2) s += freq[j].second * freq[j].second;
                if (dim >= 3) s += freq[k].second * freq[k].second;
                ExactMode<Real> mode;
                mode.index = {freq[i].first, dim >= 2 ? freq[j].first : 0,
                              dim >= 3 ? freq[k].first : 0};
                mode.lambda = (s == Real(0)) ? op.coefficients[0] : op.evaluate(s);
                spec.entries.push_back(mode);
            }
    std::stable_sort(spec.entries.begin(), spec.entries.end(),
                     [](const ExactMode<Real>& a, const ExactMode<Real>& b) {
                         if (a.lambda != b.lambda) return a.lambda < b.lambda;
                         return a.index < b.index;
                     });
    if (static_cast<int>(spec.entries.size()) < count)
        throw std::invalid_argument("exact_eigenvalues: count exceeds enumerated modes");

    // Truncation safety: the cheapest mode forced to use the last ladder
    // rung must not undercut the kept range (guards non-monotone operators).
    {
        Real s_edge = freq.back().second * freq.back().second;
        for (int d = 1; d < dim; ++d) s_edge += freq.front().second * freq.front().second;
        const Real edge = (s_edge == Real(0)) ? op.coefficients[0] : op.evaluate(s_edge);
        if (edge < spec.entries[count - 1].lambda)
            throw std::runtime_error("exact_eigenvalues: enumeration margin too small");
    }
    spec.entries.resize(count);
    return spec;
}

/// Unit-L2-norm exact eigenfunction value at a point. For FourierModes the
/// cosine member of each nonzero pair is selected with `cosine`; the zero
/// mode is the constant 1.
template <class Real>
Real exact_eigenfunction(const std::array<int, 3>& indices, int dim, ModeConvention convention,
                         const std::array<Real, 3>& point, bool cosine = false) {
    const Real pi = std::numbers::pi_v<Real>;
    const Real sqrt2 = std::sqrt(Real(2));
    Real v(1);
    for (int d = 0; d < dim; ++d) {
        const int j = indices[d];
        const Real x = point[d];
        if (convention == ModeConvention::SineModes) {
            v *= sqrt2 * std::sin(Real(j) * pi * x);
        } else if (j == 0) {
            // constant mode
        } else if (cosine) {
            v *= sqrt2 * std::cos(Real(2 * j) * pi * x);
        } else {
            v *= sqrt2 * std::sin(Real(2 * j) * pi * x);
        }
    }
    return v;
}

/// Relative error of the j-th (1-based) approximate eigenvalue against the
/// exact spectrum, matching by sorted position. Exact zero eigenvalues (the
/// periodic zero mode) are skipped in both lists.
template <class Real>
Real relative_error(const std::vector<Real>& approx, const ExactSpectrum<Real>& exact, int j) {
    std::size_t skip = 0;
    while (skip < exact.entries.size() && exact.entries[skip].lambda == Real(0)) ++skip;
    const std::size_t ia = skip + j - 1;
    if (j < 1 || ia >= approx.size() || ia >= exact.entries.size())
        throw std::invalid_argument("relative_error: index out of range");
    const Real lam = exact.entries[ia].lambda;
    if (lam == Real(0))
        throw std::domain_error("relative_error: exact eigenvalue is zero at requested index");
    return std::abs(approx[ia] - lam) / std::abs(lam);
}

}  // namespace mixedspec
