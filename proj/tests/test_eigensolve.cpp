#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "mixedspec/eigensolve.hpp"

using namespace mixedspec;

namespace {

BasisSpec iga(int p, int N, BoundaryCondition bc = BoundaryCondition::DirichletHomogeneous) {
    return {BasisKind::BsplineMaxContinuity, p, N, bc};
}

// Closed-form generalized eigenvalues of the consistent-mass hat pencil.
double hat_pencil_eigenvalue(int k, int N) {
    const double h = 1.0 / N;
    const double c = std::cos(k * std::numbers::pi * h);
    return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
}

Matrix<double> random_symmetric(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix<double> a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a(i, j) = a(j, i) = unif(rng);
    return a;
}

}  // namespace

TEST_CASE("diagonal pencil against the identity") {
    Matrix<double> K(3, 3), M = Matrix<double>::identity(3);
    K(0, 0) = 2;
    K(1, 1) = 1;
    K(2, 2) = 3;
    const auto spec = generalized_sym_eig(K, M);
    CHECK(spec.values[0] == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(spec.values[1] == Catch::Approx(2.0).epsilon(1e-15));
    CHECK(spec.values[2] == Catch::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("hat pencil eigenvalues match the closed form") {
    const auto pencil = assemble_1d(iga(1, 4), same_rule(gauss_legendre<double>(2)));
    const auto spec = generalized_sym_eig(pencil.K, pencil.M);
    REQUIRE(spec.values.size() == 3);
    CHECK(spec.values[0] == Catch::Approx(hat_pencil_eigenvalue(1, 4)).epsilon(1e-10));
    CHECK(spec.values[0] == Catch::Approx(10.3866).epsilon(1e-4));
    CHECK(spec.values[1] == Catch::Approx(48.0).epsilon(1e-10));
    CHECK(spec.values[2] == Catch::Approx(hat_pencil_eigenvalue(3, 4)).epsilon(1e-10));
}

TEST_CASE("residuals and M-orthonormality of returned pairs") {
    for (int p : {1, 2, 3}) {
        const auto pencil = assemble_1d(iga(p, 12), same_rule(gauss_legendre<double>(p + 1)));
        const auto spec = generalized_sym_eig(pencil.K, pencil.M);
        const double knorm = pencil.K.max_abs(), mnorm = pencil.M.max_abs();
        for (int i = 0; i < spec.dof; ++i) {
            const auto v = spec.vector(i);
            const auto kv = pencil.K.apply(v);
            const auto mv = pencil.M.apply(v);
            double r = 0;
            for (int row = 0; row < spec.dof; ++row) {
                const double t = kv[row] - spec.values[i] * mv[row];
                r += t * t;
            }
            CHECK(std::sqrt(r) <=
                  1e-10 * (knorm + std::abs(spec.values[i]) * mnorm) * norm2(v));
            for (int j = i; j < spec.dof; ++j) {
                const double mij = dot_compensated(mv, spec.vector(j));
                CHECK(std::abs(mij - (i == j ? 1.0 : 0.0)) < 1e-10);
            }
        }
    }
}

TEST_CASE("QL path agrees with Jacobi on a 100x100 matrix") {
    const auto a = random_symmetric(100, 11);  // n > 64 triggers Householder + QL
    const auto ql = sym_eig(a, true);
    const auto jac = detail::jacobi_eig(a, true);
    for (int i = 0; i < 100; ++i)
        CHECK(ql.values[i] == Catch::Approx(jac.values[i]).margin(1e-12));
    // Orthonormal vectors with small residuals.
    for (int i = 0; i < 100; i += 13) {
        std::vector<double> v(100);
        for (int r = 0; r < 100; ++r) v[r] = ql.vectors(r, i);
        const auto av = a.apply(v);
        double res = 0;
        for (int r = 0; r < 100; ++r) {
            const double t = av[r] - ql.values[i] * v[r];
            res += t * t;
        }
        CHECK(std::sqrt(res) < 1e-12 * a.frobenius_norm());
        CHECK(norm2(v) == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("cholesky failure reports the pivot") {
    Matrix<double> M = Matrix<double>::identity(4);
    M(2, 2) = -1.0;
    try {
        cholesky_lower(M);
        FAIL("expected not_spd_error");
    } catch (const not_spd_error& e) {
        CHECK(e.pivot_index == 2);
    }
}

TEST_CASE("compose_operator_spectrum applies the operator polynomial") {
    const double nu1 = hat_pencil_eigenvalue(1, 4);
    Spectrum<double> spec;
    spec.values = {nu1, hat_pencil_eigenvalue(2, 4), hat_pencil_eigenvalue(3, 4)};
    spec.dof = 3;

    const auto biharmonic = compose_operator_spectrum(spec.values, preset<double>("biharmonic"));
    CHECK(biharmonic[0] == Catch::Approx(nu1 * nu1).epsilon(1e-14));

    const auto ch4 = compose_operator_spectrum(spec.values, preset<double>("cahn_hilliard4"));
    CHECK(ch4[0] == Catch::Approx(nu1 * nu1 + nu1).epsilon(1e-14));
    CHECK(ch4[0] == Catch::Approx(118.269).epsilon(1e-4));

    // Phase-field crystal on the first 2D tensor eigenvalue 2 nu1.
    const double nu2d = 2 * nu1;
    const auto pfc = compose_operator_spectrum({nu2d}, preset<double>("phase_field_crystal"));
    CHECK(pfc[0] == Catch::Approx(nu2d * (nu2d - 1) * (nu2d - 1)).epsilon(1e-14));
    CHECK(pfc[0] == Catch::Approx(8122.0).epsilon(1e-4));

    // Non-monotone composition is re-sorted (swift_hohenberg near nu = 1).
    const auto sh = compose_operator_spectrum({0.2, 0.9, 1.8}, preset<double>("swift_hohenberg"));
    CHECK(std::is_sorted(sh.begin(), sh.end()));
    CHECK(sh[0] == Catch::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("tensor_spectrum enumerates sorted sums with multi-indices") {
    Spectrum<double> nu;
    nu.values = {1.0, 5.0};
    nu.dof = 2;
    const auto modes = tensor_spectrum(nu, 2, 4);
    REQUIRE(modes.size() == 4);
    CHECK(modes[0].nu == 2.0);
    CHECK(modes[1].nu == 6.0);
    CHECK(modes[2].nu == 6.0);
    CHECK(modes[3].nu == 10.0);
    CHECK(modes[0].index == std::array<int, 3>{0, 0, 0});

    CHECK_THROWS_AS(tensor_spectrum(nu, 2, 5), std::invalid_argument);

    // First four 2D tensor eigenvalues of the N=4 hat pencil.
    const auto pencil = assemble_1d(iga(1, 4), same_rule(gauss_legendre<double>(2)));
    const auto spec1d = generalized_sym_eig(pencil.K, pencil.M);
    const auto t2 = tensor_spectrum(spec1d, 2, 4);
    CHECK(t2[0].nu == Catch::Approx(20.7733).epsilon(1e-4));
    CHECK(t2[1].nu == Catch::Approx(58.3866).epsilon(1e-4));
    CHECK(t2[2].nu == Catch::Approx(t2[1].nu).epsilon(1e-15));
    CHECK(t2[3].nu == Catch::Approx(96.0).epsilon(1e-10));
}

TEST_CASE("tensor spectrum agrees with the Kronecker oracle") {
    for (int p : {1, 2}) {
        for (int N : {4, 8}) {
            const auto pencil = assemble_1d(iga(p, N), same_rule(gauss_legendre<double>(p + 1)));
            const auto spec1d = generalized_sym_eig(pencil.K, pencil.M);
            const auto modes = tensor_spectrum(spec1d, 2, pencil.dof * pencil.dof);
            const auto [K2, M2] = assemble_kron(pencil, 2);
            const auto spec2d = generalized_sym_eig(K2, M2, false);
            for (std::size_t i = 0; i < modes.size(); ++i)
                CHECK(std::abs(modes[i].nu - spec2d.values[i]) < 1e-10 * spec2d.values[i]);
        }
    }
}

TEST_CASE("mixed block systems have the published block pattern") {
    const auto pencil = assemble_1d(iga(1, 4), same_rule(gauss_legendre<double>(2)));
    const int b = pencil.dof;

    SECTION("biharmonic, symmetrized: [[K, -M], [-M, K]], shift 1") {
        const auto sys = build_mixed_block(preset<double>("biharmonic"), pencil, true);
        CHECK(sys.symmetrized_shift == 1.0);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j) {
                CHECK(sys.lhs(i, j) == pencil.K(i, j));
                CHECK(sys.lhs(i, b + j) == -pencil.M(i, j));
                CHECK(sys.lhs(b + i, j) == -pencil.M(i, j));
                CHECK(sys.lhs(b + i, b + j) == pencil.K(i, j));
                CHECK(sys.rhs(b + i, j) == pencil.M(i, j));
                CHECK(sys.rhs(i, j) == 0.0);
                CHECK(sys.rhs(i, b + j) == 0.0);
                CHECK(sys.rhs(b + i, b + j) == 0.0);
            }
        CHECK(sys.lhs.is_symmetric());
    }
    SECTION("swift_hohenberg, symmetrized: [[K, -M], [-M, K - 2M]], shift 2") {
        const auto sys = build_mixed_block(preset<double>("swift_hohenberg"), pencil, true);
        CHECK(sys.symmetrized_shift == 2.0);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j)
                CHECK(sys.lhs(b + i, b + j) ==
                      Catch::Approx(pencil.K(i, j) - 2 * pencil.M(i, j)).margin(1e-16));
        CHECK(sys.lhs.is_symmetric());
    }
    SECTION("cahn_hilliard4, unsymmetrized: zero lower-left block") {
        const auto sys = build_mixed_block(preset<double>("cahn_hilliard4"), pencil, false);
        CHECK(sys.symmetrized_shift == 0.0);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j) {
                CHECK(sys.lhs(b + i, j) == 0.0);  // a_0 = 0
                CHECK(sys.lhs(b + i, b + j) ==
                      Catch::Approx(pencil.K(i, j) + pencil.M(i, j)).margin(1e-16));
            }
    }
    SECTION("phase_field_crystal, unsymmetrized 3x3 block pattern") {
        const auto sys = build_mixed_block(preset<double>("phase_field_crystal"), pencil, false);
        REQUIRE(sys.lhs.rows() == 3 * b);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j) {
                CHECK(sys.lhs(i, j) == pencil.K(i, j));
                CHECK(sys.lhs(i, b + j) == -pencil.M(i, j));
                CHECK(sys.lhs(i, 2 * b + j) == 0.0);
                CHECK(sys.lhs(b + i, j) == 0.0);
                CHECK(sys.lhs(b + i, b + j) == pencil.K(i, j));
                CHECK(sys.lhs(b + i, 2 * b + j) == -pencil.M(i, j));
                CHECK(sys.lhs(2 * b + i, j) == 0.0);  // a_0 = 0
                CHECK(sys.lhs(2 * b + i, b + j) == pencil.M(i, j));  // a_1 = 1
                CHECK(sys.lhs(2 * b + i, 2 * b + j) ==
                      Catch::Approx(pencil.K(i, j) - 2 * pencil.M(i, j)).margin(1e-16));
                CHECK(sys.rhs(2 * b + i, j) == pencil.M(i, j));
            }
    }
    SECTION("symmetrize is limited to n = 2") {
        CHECK_THROWS_AS(build_mixed_block(preset<double>("phase_field_crystal"), pencil, true),
                        std::invalid_argument);
    }
}

TEST_CASE("reconstruct_mixed_vector recovers the auxiliary fields") {
    const auto pencil = assemble_1d(iga(2, 8), same_rule(gauss_legendre<double>(3)));
    const auto spec = generalized_sym_eig(pencil.K, pencil.M);
    const auto v = spec.vector(2);
    const double nu = spec.values[2];

    SECTION("n = 1 leaves Psi empty") {
        const auto pair = reconstruct_mixed_vector(v, pencil, 1);
        CHECK(pair.Psi.empty());
    }
    SECTION("pencil eigenvector gives Psi^m = nu^m v") {
        const auto pair = reconstruct_mixed_vector(v, pencil, 3);
        REQUIRE(pair.Psi.size() == 2);
        for (int i = 0; i < pencil.dof; ++i) {
            CHECK(pair.Psi[0][i] == Catch::Approx(nu * v[i]).margin(1e-10 * nu));
            CHECK(pair.Psi[1][i] == Catch::Approx(nu * nu * v[i]).margin(1e-10 * nu * nu));
        }
    }
}

TEST_CASE("block residuals: reduction identity, sanity, and guards") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (const auto& name : preset_names()) {
        const auto op = preset<double>(name);
        const auto pencil = assemble_1d(iga(2, 8), same_rule(gauss_legendre<double>(3)));
        const auto spec = generalized_sym_eig(pencil.K, pencil.M);
        const auto sys = build_mixed_block(op, pencil, false);
        for (int i = 0; i < spec.dof; ++i) {
            const double nu = spec.values[i];
            auto pair = reconstruct_mixed_vector(spec.vector(i), pencil, op.n, op.evaluate(nu));
            const double res = block_residual(sys, pair);
            CHECK(res <= 1e-8 * block_residual_scale(sys, pair.lambda));
        }
        // A random vector with a random eigenvalue is far from solving it.
        MixedEigenpair<double> junk;
        junk.lambda = 3.7;
        junk.U.resize(pencil.dof);
        for (auto& u : junk.U) u = unif(rng);
        for (int m = 1; m < op.n; ++m) {
            junk.Psi.emplace_back(pencil.dof);
            for (auto& u : junk.Psi.back()) u = unif(rng);
        }
        CHECK(block_residual(sys, junk) > 1e-3 * block_residual_scale(sys, junk.lambda));

        MixedEigenpair<double> zero;
        zero.U.assign(pencil.dof, 0.0);
        for (int m = 1; m < op.n; ++m) zero.Psi.emplace_back(pencil.dof, 0.0);
        CHECK_THROWS_AS(block_residual(sys, zero), std::invalid_argument);
    }
}

TEST_CASE("symmetrized n=2 systems agree with the unsymmetrized forms") {
    for (const char* name : {"biharmonic", "cahn_hilliard4", "swift_hohenberg"}) {
        const auto op = preset<double>(name);
        const auto pencil = assemble_1d(iga(2, 8), same_rule(gauss_legendre<double>(3)));
        const auto spec = generalized_sym_eig(pencil.K, pencil.M);
        const auto plain = build_mixed_block(op, pencil, false);
        const auto sym = build_mixed_block(op, pencil, true);
        for (int i = 0; i < spec.dof; ++i) {
            auto pair =
                reconstruct_mixed_vector(spec.vector(i), pencil, op.n, op.evaluate(spec.values[i]));
            CHECK(block_residual(plain, pair) <= 1e-9 * block_residual_scale(plain, pair.lambda));
            CHECK(block_residual(sym, pair) <= 1e-9 * block_residual_scale(sym, pair.lambda));
        }
    }
}

TEST_CASE("spectrum count matches dof^dim") {
    const auto pencil = assemble_1d(iga(2, 6), same_rule(gauss_legendre<double>(3)));
    const auto spec = generalized_sym_eig(pencil.K, pencil.M);
    CHECK(static_cast<int>(spec.values.size()) == pencil.dof);
    const auto modes = tensor_spectrum(spec, 3, pencil.dof * pencil.dof * pencil.dof);
    CHECK(modes.size() == static_cast<std::size_t>(pencil.dof) * pencil.dof * pencil.dof);
}
