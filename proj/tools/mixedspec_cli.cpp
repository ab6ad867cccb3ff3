// Study-runner CLI: spectrum and convergence studies, dispersion analysis,
// optimal-blend search, and one-shot reproduction of the published tables.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixedspec/mixedspec.hpp"

namespace {

using namespace mixedspec;

struct CommonOpts {
    std::string op = "biharmonic";
    std::vector<double> coefficients;
    int dim = 2;
    std::vector<int> p_list = {1, 2, 3};
    std::vector<int> N_list = {4, 8, 16, 32};
    std::vector<std::string> rules = {"gauss"};
    std::string basis = "iga";
    std::string bc = "dirichlet";
    std::string convention = "sine";
    std::vector<int> indices = {1, 2, 4, 8};
    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json", "svg"};
};

void add_common_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--operator", o.op,
                    "Operator preset (laplace, biharmonic, cahn_hilliard4, swift_hohenberg, "
                    "cahn_hilliard6, phase_field_crystal)");
    cmd->add_option("--coefficients", o.coefficients,
                    "Explicit operator coefficients a_0..a_n (overrides --operator)")
        ->delimiter(',');
    cmd->add_option("--dim", o.dim, "Spatial dimension (1, 2, or 3)");
    cmd->add_option("--p", o.p_list, "Polynomial orders")->delimiter(',');
    cmd->add_option("--N", o.N_list, "Mesh sizes (elements per direction), ascending")
        ->delimiter(',');
    cmd->add_option("--rule", o.rules,
                    "Quadrature rules: gauss, reduced_gauss, lobatto, optimal, "
                    "blend-<gg|gl>-<tau>")
        ->delimiter(',');
    cmd->add_option("--basis", o.basis, "Discretization: iga (B-splines) or fem (Lagrange)")
        ->check(CLI::IsMember({"iga", "fem"}));
    cmd->add_option("--bc", o.bc, "Boundary condition: dirichlet or periodic")
        ->check(CLI::IsMember({"dirichlet", "periodic"}));
    cmd->add_option("--convention", o.convention, "Exact-mode convention: sine or fourier")
        ->check(CLI::IsMember({"sine", "fourier"}));
    cmd->add_option("--indices", o.indices, "1-based eigenvalue indices to report")
        ->delimiter(',');
    cmd->add_option("--out-dir", o.out_dir, "Output directory")
        ->envname("MIXEDSPEC_OUTDIR");
    cmd->add_option("--formats", o.formats, "Outputs to emit: csv, json, svg")
        ->delimiter(',');
    cmd->set_config("--config", "", "Flat key=value configuration file; flags override");
}

StudyConfig to_study_config(const CommonOpts& o) {
    StudyConfig c;
    c.operator_name = o.op;
    c.coefficients = o.coefficients;
    c.dim = o.dim;
    c.p_list = o.p_list;
    c.N_list = o.N_list;
    c.rules.clear();
    for (const auto& r : o.rules) c.rules.push_back(RuleChoice::parse(r));
    c.basis = o.basis == "fem" ? BasisKind::LagrangeC0 : BasisKind::BsplineMaxContinuity;
    c.bc = o.bc == "periodic" ? BoundaryCondition::Periodic
                              : BoundaryCondition::DirichletHomogeneous;
    c.convention = o.convention == "fourier" ? ModeConvention::FourierModes
                                             : ModeConvention::SineModes;
    c.eigen_indices = o.indices;
    c.out_dir = o.out_dir;
    c.formats = o.formats;
    return c;
}

bool wants(const StudyConfig& c, const std::string& fmt) {
    return std::find(c.formats.begin(), c.formats.end(), fmt) != c.formats.end();
}

void emit_report(const ErrorReport& report, const StudyConfig& config, const std::string& stem,
                 bool spectrum_plot) {
    namespace fs = std::filesystem;
    const fs::path dir(config.out_dir);
    if (wants(config, "csv")) {
        write_file(dir / (stem + ".csv"), to_csv(report));
        std::cout << "wrote " << (dir / (stem + ".csv")).string() << "\n";
    }
    if (wants(config, "json")) {
        write_file(dir / (stem + ".json"), report_json(report, config.echo()).dump(2) + "\n");
        std::cout << "wrote " << (dir / (stem + ".json")).string() << "\n";
    }
    if (wants(config, "svg")) {
        const std::string svg = spectrum_plot ? svg_spectrum(report, stem)
                                              : svg_convergence(report, stem);
        write_file(dir / (stem + ".svg"), svg);
        std::cout << "wrote " << (dir / (stem + ".svg")).string() << "\n";
    }
}

int run_spectrum_cmd(const CommonOpts& opts) {
    StudyConfig config = to_study_config(opts);
    const auto report = run_spectrum(config);
    emit_report(report, config, "spectrum", true);
    double worst = 0;
    for (const auto& r : report.rows) worst = std::max(worst, r.rel_error);
    std::printf("%zu modes, max relative error %.3e\n", report.rows.size(), worst);
    return 0;
}

int run_converge_cmd(const CommonOpts& opts) {
    StudyConfig config = to_study_config(opts);
    const auto report = run_convergence(config);
    emit_report(report, config, "convergence", false);
    for (const auto& r : report.rows)
        if (r.N == config.N_list.back() && r.j == config.eigen_indices.front() && r.rate)
            std::printf("p=%d %-12s j=%d  e=%.3e  rate=%.2f\n", r.p, r.rule.c_str(), r.j,
                        r.rel_error, *r.rate);
    return 0;
}

int run_dispersion_cmd(const CommonOpts& opts) {
    StudyConfig config = to_study_config(opts);
    config.validate_or_throw();
    const auto rows = run_dispersion(config.p_list, config.rules);
    if (wants(config, "csv")) {
        write_file(std::filesystem::path(config.out_dir) / "dispersion.csv",
                   dispersion_csv(rows));
        std::cout << "wrote " << (std::filesystem::path(config.out_dir) / "dispersion.csv").string()
                  << "\n";
    }
    for (const auto& r : rows)
        std::printf("p=%d %-12s exponent=%.3f coefficient=%.6e\n", r.p, r.rule.c_str(),
                    r.exponent, r.coefficient);
    return 0;
}

int run_blend_search_cmd(const std::vector<int>& p_list, const std::string& family,
                         const std::string& out_dir) {
    std::vector<BlendFamily> fams;
    if (family == "gg" || family == "both") fams.push_back(BlendFamily::GaussGauss);
    if (family == "gl" || family == "both") fams.push_back(BlendFamily::GaussLobatto);
    if (fams.empty()) throw config_error("family: expected gg, gl, or both");
    const auto rows = run_blend_search(p_list, fams);
    write_file(std::filesystem::path(out_dir) / "blend_search.csv", blend_search_csv(rows));
    std::cout << "wrote " << (std::filesystem::path(out_dir) / "blend_search.csv").string()
              << "\n";
    for (const auto& r : rows)
        std::printf("p=%d %s  tau=%.12g\n", r.p,
                    r.family == BlendFamily::GaussGauss ? "gg" : "gl", r.tau);
    return 0;
}

int run_tables_cmd(const std::string& out_dir) {
    run_blend_search_cmd({1, 2, 3, 4}, "both", out_dir);
    std::filesystem::rename(std::filesystem::path(out_dir) / "blend_search.csv",
                            std::filesystem::path(out_dir) / "table1.csv");
    std::cout << "table1: optimal blending parameters -> table1.csv\n";

    const std::vector<std::pair<std::string, std::string>> tables = {
        {"table2", "biharmonic"},
        {"table3", "cahn_hilliard4"},
        {"table4", "swift_hohenberg"},
        {"table5", "phase_field_crystal"},
    };
    for (const auto& [stem, op] : tables) {
        StudyConfig config;
        config.operator_name = op;
        config.dim = 2;
        config.p_list = {1, 2, 3};
        config.N_list = {4, 8, 16, 32};
        config.rules = {RuleChoice::parse("gauss"), RuleChoice::parse("optimal")};
        config.bc = BoundaryCondition::DirichletHomogeneous;
        config.convention = ModeConvention::SineModes;
        config.eigen_indices = {1, 2, 4, 8};
        config.out_dir = out_dir;
        const auto report = run_convergence(config);
        emit_report(report, config, stem, false);
        std::printf("%s: %s eigenvalue errors -> %s.csv\n", stem.c_str(), op.c_str(),
                    stem.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral approximation studies for 2n-order operators in mixed form"};
    app.require_subcommand(1);
    app.set_version_flag("--version", mixedspec::kVersion);

    CommonOpts spectrum_opts, converge_opts, dispersion_opts;
    spectrum_opts.p_list = {2};
    spectrum_opts.N_list = {64};
    spectrum_opts.dim = 1;
    dispersion_opts.p_list = {1, 2, 3, 4};
    dispersion_opts.rules = {"gauss", "optimal"};

    auto* spectrum_cmd =
        app.add_subcommand("spectrum", "Full discrete spectrum errors for one (p, N) cell");
    add_common_options(spectrum_cmd, spectrum_opts);

    auto* converge_cmd =
        app.add_subcommand("converge", "Eigenvalue errors and rates over a (p, N, rule) grid");
    add_common_options(converge_cmd, converge_opts);

    auto* dispersion_cmd =
        app.add_subcommand("dispersion", "Symbol-error exponents and coefficients");
    add_common_options(dispersion_cmd, dispersion_opts);

    std::vector<int> bs_p = {1, 2, 3, 4};
    std::string bs_family = "both";
    std::string bs_out = "out";
    auto* blend_cmd = app.add_subcommand("blend-search",
                                         "Locate optimal blending parameters by dispersion");
    blend_cmd->add_option("--p", bs_p, "Polynomial orders")->delimiter(',');
    blend_cmd->add_option("--family", bs_family, "Blend family: gg, gl, or both")
        ->check(CLI::IsMember({"gg", "gl", "both"}));
    blend_cmd->add_option("--out-dir", bs_out, "Output directory")->envname("MIXEDSPEC_OUTDIR");
    blend_cmd->set_config("--config", "", "Flat key=value configuration file; flags override");

    std::string tables_out = "out";
    auto* tables_cmd =
        app.add_subcommand("tables", "One-shot reproduction of the published tables 1-5");
    tables_cmd->add_option("--out-dir", tables_out, "Output directory")
        ->envname("MIXEDSPEC_OUTDIR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (spectrum_cmd->parsed()) return run_spectrum_cmd(spectrum_opts);
        if (converge_cmd->parsed()) return run_converge_cmd(converge_opts);
        if (dispersion_cmd->parsed()) return run_dispersion_cmd(dispersion_opts);
        if (blend_cmd->parsed()) return run_blend_search_cmd(bs_p, bs_family, bs_out);
        if (tables_cmd->parsed()) return run_tables_cmd(tables_out);
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
