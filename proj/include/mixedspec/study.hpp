#pragma once

// Study runner: sweep configuration, spectrum and convergence studies,
// eigenfunction errors, dispersion and blend-search orchestration. The
// numerical pipelines run in long double; reports carry doubles.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixedspec/assembly.hpp"
#include "mixedspec/basis.hpp"
#include "mixedspec/dispersion.hpp"
#include "mixedspec/eigensolve.hpp"
#include "mixedspec/operators.hpp"
#include "mixedspec/quadrature.hpp"
#include "mixedspec/report.hpp"

namespace mixedspec {

using StudyReal = long double;

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RuleKind { Gauss, ReducedGauss, Lobatto, Blend, Optimal };

struct RuleChoice {
    RuleKind kind = RuleKind::Gauss;
    BlendFamily family = BlendFamily::GaussLobatto;  // for Blend / Optimal
    double tau = 0.5;                                // for Blend

    std::string label() const {
        switch (kind) {
            case RuleKind::Gauss: return "gauss";
            case RuleKind::ReducedGauss: return "reduced_gauss";
            case RuleKind::Lobatto: return "lobatto";
            case RuleKind::Optimal: return "optimal";
            case RuleKind::Blend: {
                char buf[48];
                std::snprintf(buf, sizeof(buf), "blend-%s-%g",
                              family == BlendFamily::GaussGauss ? "gg" : "gl", tau);
                return buf;
            }
        }
        return "?";
    }

    // Accepts gauss | reduced_gauss | lobatto | optimal | blend-<gg|gl>-<tau>.
    static RuleChoice parse(const std::string& text) {
        RuleChoice rc;
        if (text == "gauss") return rc;
        if (text == "reduced_gauss") {
            rc.kind = RuleKind::ReducedGauss;
            return rc;
        }
        if (text == "lobatto") {
            rc.kind = RuleKind::Lobatto;
            return rc;
        }
        if (text == "optimal") {
            rc.kind = RuleKind::Optimal;
            return rc;
        }
        if (text.rfind("blend-", 0) == 0) {
            const std::string rest = text.substr(6);
            const auto dash = rest.find('-');
            if (dash != std::string::npos) {
                const std::string fam = rest.substr(0, dash);
                rc.kind = RuleKind::Blend;
                if (fam == "gg")
                    rc.family = BlendFamily::GaussGauss;
                else if (fam == "gl")
                    rc.family = BlendFamily::GaussLobatto;
                else
                    throw config_error("rule: unknown blend family '" + fam + "'");
                try {
                    rc.tau = std::stod(rest.substr(dash + 1));
                } catch (const std::exception&) {
                    throw config_error("rule: cannot parse blend parameter in '" + text + "'");
                }
                return rc;
            }
        }
        throw config_error("rule: unknown rule '" + text + "'");
    }
};

template <class Real>
QuadratureRule<Real> make_rule(const RuleChoice& rc, int p) {
    switch (rc.kind) {
        case RuleKind::Gauss: return gauss_legendre<Real>(p + 1);
        case RuleKind::ReducedGauss: return gauss_legendre<Real>(std::max(p, 1));
        case RuleKind::Lobatto: return gauss_lobatto<Real>(p + 1);
        case RuleKind::Optimal: return optimal_blend<Real>(p, rc.family);
        case RuleKind::Blend: {
            const auto a = gauss_legendre<Real>(p + 1);
            const auto b = rc.family == BlendFamily::GaussGauss ? gauss_legendre<Real>(p)
                                                                : gauss_lobatto<Real>(p + 1);
            return blend_rules(a, b, Real(rc.tau));
        }
    }
    throw config_error("rule: invalid kind");
}

struct StudyConfig {
    std::string operator_name = "biharmonic";
    std::vector<double> coefficients;  // explicit a_0..a_n; overrides the preset
    int dim = 2;
    std::vector<int> p_list = {1, 2, 3};
    std::vector<int> N_list = {4, 8, 16, 32};
    std::vector<RuleChoice> rules = {RuleChoice{}};
    BasisKind basis = BasisKind::BsplineMaxContinuity;
    BoundaryCondition bc = BoundaryCondition::DirichletHomogeneous;
    ModeConvention convention = ModeConvention::SineModes;
    std::vector<int> eigen_indices = {1, 2, 4, 8};
    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json", "svg"};

    template <class Real>
    OperatorSpec<Real> op() const {
        if (!coefficients.empty()) {
            std::vector<Real> c(coefficients.begin(), coefficients.end());
            return make_operator<Real>(std::move(c), "custom");
        }
        return preset<Real>(operator_name);
    }

    nlohmann::json echo() const {
        nlohmann::json rules_json = nlohmann::json::array();
        for (const auto& r : rules) rules_json.push_back(r.label());
        return nlohmann::json{
            {"operator", coefficients.empty() ? operator_name : "custom"},
            {"coefficients", coefficients},
            {"dim", dim},
            {"p", p_list},
            {"N", N_list},
            {"rules", rules_json},
            {"basis", basis == BasisKind::BsplineMaxContinuity ? "iga" : "fem"},
            {"bc", bc == BoundaryCondition::DirichletHomogeneous ? "dirichlet" : "periodic"},
            {"convention", convention == ModeConvention::SineModes ? "sine" : "fourier"},
            {"indices", eigen_indices},
            {"out_dir", out_dir}};
    }

    void validate_or_throw() const {
        std::vector<std::string> problems;
        if (coefficients.empty()) {
            const auto& names = preset_names();
            if (std::find(names.begin(), names.end(), operator_name) == names.end())
                problems.push_back("operator: unknown preset '" + operator_name + "'");
        } else if (coefficients.size() < 2 || coefficients.back() == 0.0) {
            problems.push_back("coefficients: need a_0..a_n with nonzero a_n");
        }
        if (dim < 1 || dim > 3) problems.push_back("dim: must be 1, 2, or 3");
        if (p_list.empty()) problems.push_back("p: list is empty");
        for (int p : p_list)
            if (p < 1 || p > 8) problems.push_back("p: order " + std::to_string(p) + " unsupported");
        if (N_list.empty()) problems.push_back("N: list is empty");
        if (!std::is_sorted(N_list.begin(), N_list.end()))
            problems.push_back("N: list must be ascending");
        for (int n : N_list)
            if (n < 2) problems.push_back("N: need at least 2 elements");
        for (const auto& rc : rules)
            if (rc.kind == RuleKind::Optimal)
                for (int p : p_list)
                    if (p > 4) problems.push_back("rule: optimal blend tabulated for p <= 4 only");
        if (basis == BasisKind::LagrangeC0)
            for (int p : p_list)
                if (p > 4) problems.push_back("p: Lagrange elements support p <= 4");
        if (eigen_indices.empty()) problems.push_back("indices: list is empty");
        for (int j : eigen_indices)
            if (j < 1) problems.push_back("indices: must be 1-based positive");
        if (!problems.empty()) {
            std::string msg = "invalid study configuration:";
            for (const auto& p : problems) msg += "\n  " + p;
            throw config_error(msg);
        }
    }
};

namespace detail {

// Leading exact zero eigenvalues to skip in position matching.
template <class Real>
int zero_mode_count(const ExactSpectrum<Real>& exact) {
    int skip = 0;
    while (skip < static_cast<int>(exact.entries.size()) &&
           exact.entries[skip].lambda == Real(0))
        ++skip;
    return skip;
}

// Full sorted operator spectrum of the discretization in `dim` dimensions.
template <class Real>
std::vector<Real> discrete_operator_spectrum(const OperatorSpec<Real>& op, const BasisSpec& spec,
                                             const QuadratureRule<Real>& rule, int dim) {
    const auto pencil = assemble_1d(spec, same_rule(rule));
    const auto nu1d = generalized_sym_eig(pencil.K, pencil.M, false);
    std::vector<Real> nus;
    if (dim == 1) {
        nus = nu1d.values;
    } else {
        double total = 1;
        for (int d = 0; d < dim; ++d) total *= pencil.dof;
        const auto modes = tensor_spectrum(nu1d, dim, static_cast<int>(total));
        nus.reserve(modes.size());
        for (const auto& m : modes) nus.push_back(m.nu);
    }
    return compose_operator_spectrum(nus, op);
}

}  // namespace detail

/// Full-spectrum study for a single (p, N) cell: one row per discrete mode,
/// matched against the exact spectrum by sorted position.
inline ErrorReport run_spectrum(const StudyConfig& config) {
    config.validate_or_throw();
    if (config.p_list.size() != 1 || config.N_list.size() != 1)
        throw config_error("spectrum: exactly one p and one N expected");
    const auto op = config.op<StudyReal>();
    const std::string op_label = config.coefficients.empty() ? config.operator_name : "custom";

    ErrorReport report;
    for (const auto& rc : config.rules) {
        const int p = config.p_list.front(), N = config.N_list.front();
        const BasisSpec spec{config.basis, p, N, config.bc};
        const auto lam = detail::discrete_operator_spectrum(
            op, spec, make_rule<StudyReal>(rc, p), config.dim);
        const auto exact =
            exact_eigenvalues(op, config.dim, config.convention, static_cast<int>(lam.size()));
        const int skip = detail::zero_mode_count(exact);
        const int usable = static_cast<int>(lam.size()) - skip;
        for (int j = 1; j <= usable; ++j) {
            const std::size_t idx = skip + j - 1;
            ErrorRow row;
            row.p = p;
            row.N = N;
            row.rule = rc.label();
            row.dim = config.dim;
            row.op = op_label;
            row.j = j;
            row.lambda_h = static_cast<double>(lam[idx]);
            row.lambda_exact = static_cast<double>(exact.entries[idx].lambda);
            row.rel_error = static_cast<double>(relative_error(lam, exact, j));
            report.rows.push_back(std::move(row));
        }
    }
    report.sort_rows();
    return report;
}

/// Convergence study across the (p, rule, N) grid with rate rows
/// log2(e(N) / e(2N)) attached to the finer-mesh entry.
inline ErrorReport run_convergence(const StudyConfig& config) {
    config.validate_or_throw();
    if (config.N_list.size() < 2) throw config_error("converge: need at least two N values");
    const auto op = config.op<StudyReal>();
    const std::string op_label = config.coefficients.empty() ? config.operator_name : "custom";
    const int max_j = *std::max_element(config.eigen_indices.begin(), config.eigen_indices.end());

    ErrorReport report;
    for (int p : config.p_list) {
        for (const auto& rc : config.rules) {
            const auto rule = make_rule<StudyReal>(rc, p);
            for (int N : config.N_list) {
                const BasisSpec spec{config.basis, p, N, config.bc};
                const auto lam =
                    detail::discrete_operator_spectrum(op, spec, rule, config.dim);
                const auto exact = exact_eigenvalues(op, config.dim, config.convention,
                                                     max_j + 4);
                const int skip = detail::zero_mode_count(exact);
                for (int j : config.eigen_indices) {
                    if (skip + j > static_cast<int>(lam.size()))
                        throw config_error("indices: j=" + std::to_string(j) +
                                           " exceeds the discrete mode count at N=" +
                                           std::to_string(N));
                    ErrorRow row;
                    row.p = p;
                    row.N = N;
                    row.rule = rc.label();
                    row.dim = config.dim;
                    row.op = op_label;
                    row.j = j;
                    row.lambda_h = static_cast<double>(lam[skip + j - 1]);
                    row.lambda_exact = static_cast<double>(exact.entries[skip + j - 1].lambda);
                    row.rel_error = static_cast<double>(relative_error(lam, exact, j));
                    report.rows.push_back(std::move(row));
                }
            }
        }
    }
    // Rates per (p, rule, j) series over successive mesh halvings.
    for (auto& row : report.rows) {
        if (row.N % 2 != 0) continue;
        for (const auto& prev : report.rows) {
            if (prev.p == row.p && prev.rule == row.rule && prev.j == row.j &&
                prev.N * 2 == row.N && prev.rel_error > 0 && row.rel_error > 0) {
                row.rate = std::log2(prev.rel_error / row.rel_error);
                break;
            }
        }
    }
    report.sort_rows();
    return report;
}

/// Branch indicator of a spectrum curve: max/median relative error over the
/// normalized index window [lo, hi].
inline double branch_indicator(const ErrorReport& report, double lo = 0.3, double hi = 0.7) {
    int count = 0;
    for (const auto& r : report.rows) count = std::max(count, r.j);
    if (count == 0) throw std::invalid_argument("branch_indicator: empty report");
    std::vector<double> mid;
    for (const auto& r : report.rows) {
        const double t = double(r.j) / count;
        if (t >= lo && t <= hi) mid.push_back(r.rel_error);
    }
    if (mid.empty()) throw std::invalid_argument("branch_indicator: empty window");
    std::sort(mid.begin(), mid.end());
    const double median = mid[mid.size() / 2];
    return mid.back() / median;
}

/// Normalized, sign-aligned L2 error of the discrete function with
/// coefficients U against the exact 1D mode (20-point Gauss per element).
template <class Real>
Real eigenfunction_l2_error(const BasisSpec& spec, const std::vector<Real>& U,
                            const std::array<int, 3>& mode, ModeConvention convention) {
    const int p = spec.p, N = spec.N;
    KnotVector<Real> knots;
    if (spec.kind == BasisKind::BsplineMaxContinuity)
        knots = uniform_knots<Real>(p, N, spec.bc);
    const auto g20 = gauss_legendre<Real>(20);
    const Real h = Real(1) / Real(N);

    auto u_h_at = [&](int e, Real x) {
        BasisEvaluation<Real> be;
        if (spec.kind == BasisKind::BsplineMaxContinuity) {
            be = eval_bspline_on_element(knots, e, x);
        } else {
            be = eval_lagrange<Real>(p, (x - Real(e) * h) / h);
        }
        const int raw0 = detail::first_raw_on_element(spec, e);
        Real u(0);
        for (int a = 0; a <= p; ++a) {
            const int dof = detail::raw_to_dof(spec, raw0 + a);
            if (dof >= 0) u += U[dof] * be.values[a];
        }
        return u;
    };

    Real norm_h2(0), norm_exact2(0), inner(0);
    for (int e = 0; e < N; ++e) {
        for (std::size_t q = 0; q < g20.nodes.size(); ++q) {
            const Real w = g20.weights[q] * h / Real(2);
            const Real x = Real(e) * h + (g20.nodes[q] + Real(1)) * h / Real(2);
            const Real uh = u_h_at(e, x);
            const Real ue = exact_eigenfunction<Real>(mode, 1, convention, {x, 0, 0});
            norm_h2 += w * uh * uh;
            norm_exact2 += w * ue * ue;
            inner += w * uh * ue;
        }
    }
    const Real scale = std::sqrt(norm_h2);
    const Real sign = inner >= Real(0) ? Real(1) : Real(-1);
    Real err2(0);
    for (int e = 0; e < N; ++e) {
        for (std::size_t q = 0; q < g20.nodes.size(); ++q) {
            const Real w = g20.weights[q] * h / Real(2);
            const Real x = Real(e) * h + (g20.nodes[q] + Real(1)) * h / Real(2);
            const Real d = sign * u_h_at(e, x) / scale -
                           exact_eigenfunction<Real>(mode, 1, convention, {x, 0, 0});
            err2 += w * d * d;
        }
    }
    return std::sqrt(err2) / std::sqrt(norm_exact2);
}

/// L2 eigenfunction error of mode j (1-based, zero modes skipped), dim 1.
inline double eigenfunction_error(const StudyConfig& config, int j) {
    config.validate_or_throw();
    if (config.dim != 1) throw config_error("eigenfunction_error: dim must be 1");
    if (config.p_list.size() != 1 || config.N_list.size() != 1 || config.rules.size() != 1)
        throw config_error("eigenfunction_error: exactly one p, N, and rule expected");
    using Real = StudyReal;
    const int p = config.p_list.front(), N = config.N_list.front();
    const BasisSpec spec{config.basis, p, N, config.bc};
    const auto op = config.op<Real>();
    const auto pencil =
        assemble_1d(spec, same_rule(make_rule<Real>(config.rules.front(), p)));
    const auto nu = generalized_sym_eig(pencil.K, pencil.M, true);
    const auto exact = exact_eigenvalues(op, 1, config.convention, j + 4);
    const int skip = detail::zero_mode_count(exact);
    const int idx = skip + j - 1;
    if (idx >= pencil.dof) throw config_error("eigenfunction_error: mode index out of range");

    // Refuse degenerate modes; the eigenvector is then only one member of a
    // rotation family and the comparison is ill-posed.
    const Real lam_j = op.evaluate(nu.values[idx]);
    for (int k = 0; k < pencil.dof; ++k) {
        if (k == idx) continue;
        const Real lam_k = op.evaluate(nu.values[k]);
        if (std::abs(lam_k - lam_j) <= Real(1e-8) * std::abs(lam_j))
            throw std::domain_error("eigenfunction_error: mode " + std::to_string(j) +
                                    " is degenerate within 1e-8");
    }
    return static_cast<double>(eigenfunction_l2_error(
        spec, nu.vector(idx), exact.entries[idx].index, config.convention));
}

struct BlendSearchRow {
    int p;
    BlendFamily family;
    double tau;
};

/// Optimal blending parameters for the requested orders and families.
inline std::vector<BlendSearchRow> run_blend_search(const std::vector<int>& p_list,
                                                    const std::vector<BlendFamily>& families) {
    std::vector<BlendSearchRow> rows;
    for (int p : p_list)
        for (BlendFamily fam : families)
            rows.push_back({p, fam, static_cast<double>(find_optimal_tau<StudyReal>(p, fam))});
    return rows;
}

inline std::string blend_search_csv(const std::vector<BlendSearchRow>& rows) {
    std::string out = "p,family,tau\n";
    for (const auto& r : rows)
        out += std::to_string(r.p) + ',' +
               (r.family == BlendFamily::GaussGauss ? "gg" : "gl") + ',' +
               format_float(r.tau) + '\n';
    return out;
}

struct DispersionRow {
    int p;
    std::string rule;
    double exponent;
    double coefficient;
    double fit_residual;
};

/// Symbol-error expansions for the requested orders and rules.
inline std::vector<DispersionRow> run_dispersion(const std::vector<int>& p_list,
                                                 const std::vector<RuleChoice>& rules) {
    std::vector<DispersionRow> out;
    for (int p : p_list) {
        for (const auto& rc : rules) {
            const BasisSpec spec{BasisKind::BsplineMaxContinuity, p, std::max(2 * p + 2, 8),
                                 BoundaryCondition::Periodic};
            const auto st = interior_stencil(spec, same_rule(make_rule<StudyReal>(rc, p)));
            const int q_hint = (rc.kind == RuleKind::Optimal) ? 2 * p + 4 : 2 * p + 2;
            const auto fit = error_expansion(st, q_hint);
            out.push_back({p, rc.label(), static_cast<double>(fit.exponent),
                           static_cast<double>(fit.coefficient),
                           static_cast<double>(fit.fit_residual)});
        }
    }
    return out;
}

inline std::string dispersion_csv(const std::vector<DispersionRow>& rows) {
    std::string out = "p,rule,exponent,coefficient,fit_residual\n";
    for (const auto& r : rows)
        out += std::to_string(r.p) + ',' + r.rule + ',' + format_float(r.exponent) + ',' +
               format_float(r.coefficient) + ',' + format_float(r.fit_residual) + '\n';
    return out;
}

/// Audits sorted-position matching: within the first `count` modes, groups
/// of equal exact eigenvalues must pair with equally sized clusters of
/// discrete eigenvalues.
template <class Real>
bool multiplicity_pairing_consistent(const std::vector<Real>& approx,
                                     const ExactSpectrum<Real>& exact, int count,
                                     Real cluster_tol = Real(1e-6)) {
    const int skip = detail::zero_mode_count(exact);
    int i = skip;
    const int limit = skip + count;
    if (limit > static_cast<int>(approx.size()) ||
        limit > static_cast<int>(exact.entries.size()))
        throw std::invalid_argument("multiplicity audit: count out of range");
    while (i < limit) {
        int gex = 1;
        while (i + gex < limit && exact.entries[i + gex].lambda == exact.entries[i].lambda) ++gex;
        int gap = 1;
        while (i + gap < limit &&
               std::abs(approx[i + gap] - approx[i]) <=
                   cluster_tol * std::max(std::abs(approx[i]), Real(1)))
            ++gap;
        if (gex != gap) return false;
        i += gex;
    }
    return true;
}

}  // namespace mixedspec
