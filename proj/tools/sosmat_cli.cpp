// Command-line front end: analyze/build/solve/export/verify problem bundles and
// run the built-in example families.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sosmat/io.hpp"
#include "sosmat/sdp.hpp"

using namespace sosmat;

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;

struct GlobalOpts {
    double tol = 1e-8;
    int max_iter = 200;
    unsigned seed = 1;
    bool as_json = false;
    int jobs = 0;
    std::string export_sdpa_path;
};

SolveOptions solver_opts(const GlobalOpts& g) { return {g.tol, g.max_iter}; }

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open " + path);
    return json::parse(in);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw CLI::ValidationError("cannot write " + path);
    out << text;
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        auto dot = s.find('.');
        if (dot != std::string::npos) { // decimal literal, e.g. 1.9
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            BigInt den = 1;
            for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
            return Rational(BigInt(digits), den);
        }
        return Rational(BigInt(s));
    }
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

struct RunReport {
    std::string name;
    std::string params;
    std::string status;
    double bound = std::nan("");
    double residual = std::nan("");
    double seconds = 0.0;
    int exit_code = kExitSolved;
};

void print_report(const RunReport& r, bool as_json) {
    if (as_json) {
        json j = {{"name", r.name},   {"params", r.params}, {"status", r.status},
                  {"time_s", r.seconds}};
        if (!std::isnan(r.bound)) j["bound"] = r.bound;
        if (!std::isnan(r.residual)) j["residual"] = r.residual;
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::printf("%-14s %-24s %-18s", r.name.c_str(), r.params.c_str(), r.status.c_str());
    if (!std::isnan(r.bound)) std::printf(" %10.4f", r.bound);
    else std::printf(" %10s", "-");
    std::printf(" %8.2fs", r.seconds);
    if (!std::isnan(r.residual)) std::printf("  resid %.2e", r.residual);
    std::printf("\n");
}

int status_exit(SdpStatus s, bool infeasible_documented) {
    switch (s) {
        case SdpStatus::Optimal: return kExitSolved;
        case SdpStatus::PrimalInfeasible:
        case SdpStatus::DualInfeasible:
            return infeasible_documented ? kExitSolved : kExitInfeasible;
        case SdpStatus::MaxIterations:
        case SdpStatus::NumericalFailure: return kExitNumerical;
    }
    return kExitNumerical;
}

double sos_bound(const SosProgram& prog, const SdpSolution& sol) {
    if (prog.params == 0 || sol.status != SdpStatus::Optimal) return std::nan("");
    return prog.objective.dot(sol.free_duals);
}

void maybe_export(const GlobalOpts& g, const SdpProblem& p) {
    if (!g.export_sdpa_path.empty()) write_file(g.export_sdpa_path, export_sdpa(p));
}

int cmd_analyze(const GlobalOpts& g, const std::string& input) {
    auto bundle = bundle_from_json(load_json(input));
    SparsityGraph graph = bundle.pm.base.sparsity_graph();
    for (const auto& D : bundle.pm.directions)
        for (const auto& e : D.sparsity_graph().edges()) graph.add_edge(e.first, e.second);
    auto peo = is_chordal(graph);
    auto [ext, ext_peo] = chordal_extension(graph);
    auto cliques = maximal_cliques(ext, ext_peo);
    int max_clique = 0;
    for (const auto& c : cliques) max_clique = std::max(max_clique, c.size());
    if (g.as_json) {
        json jc = json::array();
        for (const auto& c : cliques) jc.push_back(c.vertices);
        json out = {{"m", graph.vertex_count()},
                    {"edges", graph.edge_count()},
                    {"chordal", peo.has_value()},
                    {"fill_edges", ext.edge_count() - graph.edge_count()},
                    {"cliques", jc},
                    {"max_clique", max_clique}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("vertices      %d\n", graph.vertex_count());
        std::printf("edges         %zu\n", graph.edge_count());
        std::printf("chordal       %s\n", peo ? "yes" : "no");
        std::printf("fill edges    %zu\n", ext.edge_count() - graph.edge_count());
        std::printf("cliques       %zu (largest %d)\n", cliques.size(), max_clique);
    }
    return kExitSolved;
}

int cmd_build(const GlobalOpts& g, const std::string& input, const std::string& sdpa_out) {
    auto bundle = bundle_from_json(load_json(input));
    auto prog = build_from_bundle(bundle);
    if (prog.structurally_infeasible) {
        std::cerr << "structurally infeasible: " << prog.infeasibility_note << "\n";
        return kExitInfeasible;
    }
    if (!sdpa_out.empty()) write_file(sdpa_out, export_sdpa(prog.sdp));
    maybe_export(g, prog.sdp);
    int psd = 0, lp = 0;
    for (int b : prog.sdp.blocks) (b > 0 ? psd : lp)++;
    if (g.as_json) {
        json out = {{"constraints", prog.sdp.var_count()},
                    {"psd_blocks", psd},
                    {"lp_blocks", lp},
                    {"free_vars", prog.sdp.free_vars},
                    {"gram_blocks", prog.gram_blocks.size()}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("constraints   %d\n", prog.sdp.var_count());
        std::printf("psd blocks    %d\n", psd);
        std::printf("lp blocks     %d\n", lp);
        std::printf("free vars     %d\n", prog.sdp.free_vars);
        std::printf("gram blocks   %zu\n", prog.gram_blocks.size());
    }
    return kExitSolved;
}

int cmd_solve(const GlobalOpts& g, const std::string& input, const std::string& cert_out) {
    auto bundle = bundle_from_json(load_json(input));
    auto t0 = std::chrono::steady_clock::now();
    auto prog = build_from_bundle(bundle);
    RunReport rep;
    rep.name = input;
    rep.params = bundle.hierarchy;
    if (prog.structurally_infeasible) {
        rep.status = "StructurallyInfeasible";
        rep.exit_code = kExitInfeasible;
        print_report(rep, g.as_json);
        return rep.exit_code;
    }
    maybe_export(g, prog.sdp);
    auto sol = solve(prog.sdp, solver_opts(g));
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.status = to_string(sol.status);
    rep.bound = sos_bound(prog, sol);
    rep.exit_code = status_exit(sol.status, false);
    if (sol.status == SdpStatus::Optimal) {
        auto cert = recover_certificate(prog, sol);
        auto res = verify_certificate(bundle.pm, cert, 1e-6);
        rep.residual = res.max_coeff_residual;
        if (!res.pass) rep.exit_code = kExitNumerical;
        if (!cert_out.empty()) write_file(cert_out, certificate_to_json(cert).dump(2));
    }
    print_report(rep, g.as_json);
    return rep.exit_code;
}

int cmd_export(const GlobalOpts& g, const std::string& input, const std::string& output) {
    auto bundle = bundle_from_json(load_json(input));
    auto prog = build_from_bundle(bundle);
    if (prog.structurally_infeasible) {
        std::cerr << "structurally infeasible: " << prog.infeasibility_note << "\n";
        return kExitInfeasible;
    }
    std::string text = export_sdpa(prog.sdp);
    if (output.empty()) std::cout << text;
    else write_file(output, text);
    (void)g;
    return kExitSolved;
}

int cmd_verify(const GlobalOpts& g, const std::string& input, const std::string& cert_path) {
    auto bundle = bundle_from_json(load_json(input));
    auto cert = certificate_from_json(load_json(cert_path));
    auto rep = verify_certificate(bundle.pm, cert, g.tol > 1e-6 ? g.tol : 1e-6);
    if (g.as_json) std::cout << residual_to_json(rep).dump(2) << "\n";
    else {
        std::printf("coefficient residual  %.3e\n", rep.max_coeff_residual);
        std::printf("min gram eigenvalue   %.3e\n", rep.min_gram_eig);
        if (!rep.worst.empty()) std::printf("worst offender        %s\n", rep.worst.c_str());
        std::printf("verdict               %s\n", rep.pass ? "PASS" : "FAIL");
    }
    return rep.pass ? kExitSolved : kExitInfeasible;
}

int run_ex31(const GlobalOpts& g, const std::string& k_str, const std::string& hierarchy, int d) {
    Rational k = parse_rational(k_str);
    auto inst = examples::ex31(k);
    RunReport rep;
    rep.name = inst.name;
    rep.params = "k=" + k_str + " " + hierarchy + " d=" + std::to_string(d);
    auto t0 = std::chrono::steady_clock::now();
    SosProgram prog;
    if (hierarchy == "weighted") {
        Polynomial sigma(1);
        sigma.add_term(MultiIndex({0u}), k + 1);
        sigma.add_term(MultiIndex({2u}), 1);
        prog = build_weighted_sparse(inst.pm, sigma, inst.cliques, d);
    } else {
        prog = build_basic_sparse(inst.pm, inst.cliques, d);
    }
    bool documented_infeasible = hierarchy == "basic" && k < 2;
    if (prog.structurally_infeasible) {
        rep.status = "StructurallyInfeasible";
        rep.exit_code = documented_infeasible ? kExitSolved : kExitInfeasible;
        print_report(rep, g.as_json);
        return rep.exit_code;
    }
    maybe_export(g, prog.sdp);
    auto sol = solve(prog.sdp, solver_opts(g));
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.status = to_string(sol.status);
    if (sol.status == SdpStatus::Optimal) {
        auto res = verify_certificate(inst.pm.base, recover_certificate(prog, sol), 1e-6);
        rep.residual = res.max_coeff_residual;
    }
    rep.exit_code = status_exit(sol.status, documented_infeasible);
    print_report(rep, g.as_json);
    return rep.exit_code;
}

int run_solve_verify(const GlobalOpts& g, const examples::Instance& inst, SosProgram prog,
                     const std::string& params, bool documented_infeasible) {
    RunReport rep;
    rep.name = inst.name;
    rep.params = params;
    auto t0 = std::chrono::steady_clock::now();
    if (prog.structurally_infeasible) {
        rep.status = "StructurallyInfeasible";
        rep.exit_code = documented_infeasible ? kExitSolved : kExitInfeasible;
        print_report(rep, g.as_json);
        return rep.exit_code;
    }
    maybe_export(g, prog.sdp);
    auto sol = solve(prog.sdp, solver_opts(g));
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.status = to_string(sol.status);
    rep.bound = sos_bound(prog, sol);
    if (sol.status == SdpStatus::Optimal && prog.params == 0) {
        auto res = verify_certificate(inst.pm.base, recover_certificate(prog, sol), 1e-6);
        rep.residual = res.max_coeff_residual;
    }
    rep.exit_code = status_exit(sol.status, documented_infeasible);
    print_report(rep, g.as_json);
    return rep.exit_code;
}

int run_polya(const GlobalOpts& g, const std::string& name, const PolyMatrix& P, unsigned nu_max,
              bool documented_none) {
    RunReport rep;
    rep.name = name;
    rep.params = "polya nu_max=" + std::to_string(nu_max);
    auto t0 = std::chrono::steady_clock::now();
    auto found = polya_exponent_search(P, nu_max);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (found) {
        auto cert = certificate_from_polya(P, *found);
        auto res = verify_certificate(P, cert, 1e-6);
        rep.status = "nu=" + std::to_string(found->nu);
        rep.residual = res.max_coeff_residual;
        rep.exit_code = res.pass ? kExitSolved : kExitNumerical;
    } else {
        rep.status = "no exponent";
        rep.exit_code = documented_none ? kExitSolved : kExitInfeasible;
    }
    print_report(rep, g.as_json);
    return rep.exit_code;
}

int cmd_example(const GlobalOpts& g, const std::string& name, const std::string& k_str,
                const std::string& hierarchy, int d, unsigned nu, int omega, int msize,
                int oracle_samples) {
    if (name == "ex3.1") return run_ex31(g, k_str, hierarchy.empty() ? "basic" : hierarchy, d);
    if (name == "ex3.2") {
        auto inst = examples::ex32();
        Polynomial sigma(3);
        sigma.add_term(MultiIndex({2u, 0u, 0u}), 1);
        sigma.add_term(MultiIndex({0u, 2u, 0u}), 1);
        return run_solve_verify(g, inst, build_weighted_sparse(inst.pm, sigma, inst.cliques, d),
                                "weighted sigma=x1^2+x2^2 d=" + std::to_string(d), false);
    }
    if (name == "ex3.3")
        return run_polya(g, "ex3.3", examples::ex33().pm.base, nu ? nu : 3, false);
    if (name == "ex3.4") {
        auto inst = examples::ex34();
        return run_solve_verify(g, inst,
                                build_sparse_putinar(inst.pm, inst.weights, inst.cliques, d),
                                "putinar d=" + std::to_string(d), false);
    }
    if (name == "ex3.5") {
        auto inst = examples::ex35(omega);
        SosProgram prog;
        std::string params = "omega=" + std::to_string(omega) + " nu=" + std::to_string(nu);
        if (hierarchy == "dense") {
            Clique full;
            for (int v = 1; v <= inst.pm.size(); ++v) full.vertices.push_back(v);
            prog = build_even_hierarchy(inst.pm, nu, {full});
            params += " dense";
        } else {
            prog = build_even_hierarchy(inst.pm, nu, inst.cliques);
            params += " sparse";
        }
        return run_solve_verify(g, inst, std::move(prog), params, false);
    }
    if (name == "ex3.6") {
        auto inst = examples::ex36(msize);
        int code = run_solve_verify(
            g, inst, build_sparse_putinar(inst.pm, inst.weights, inst.cliques, d),
            "m=" + std::to_string(msize) + " d=" + std::to_string(d), false);
        if (oracle_samples > 0) {
            auto oracle = sample_min_eig(inst.pm.base, inst.box, inst.weights, oracle_samples,
                                         g.seed);
            std::printf("oracle min eigenvalue %.4f\n", oracle.min_eig);
        }
        return code;
    }
    if (name == "appendixA") {
        auto inst = examples::ex32();
        auto eig = psd_check(examples::forced_dense_gram());
        std::printf("forced gram min eigenvalue %.9f\n", eig.min_eig);
        return run_solve_verify(g, inst, build_dense(inst.pm, {}, 1), "dense degree-1 basis",
                                true);
    }
    if (name == "remark-polya")
        return run_polya(g, "remark-polya", examples::remark_polya_matrix(), nu ? nu : 10, true);
    std::cerr << "unknown example: " << name << "\n";
    return kExitNumerical;
}

int cmd_region(const GlobalOpts& g, int omega, unsigned nu, const std::string& hierarchy,
               int directions, const std::string& output) {
    auto inst = examples::ex35(omega);
    std::vector<Clique> cliques = inst.cliques;
    if (hierarchy == "dense") {
        Clique full;
        for (int v = 1; v <= inst.pm.size(); ++v) full.vertices.push_back(v);
        cliques = {full};
    }
    struct Point {
        double theta, l1, l2;
        std::string status;
    };
    std::vector<Point> points(static_cast<std::size_t>(directions));

#ifdef _OPENMP
    if (g.jobs > 0) omp_set_num_threads(g.jobs);
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < directions; ++i) {
        double theta = (directions == 1) ? 0.0
                                         : (M_PI / 2.0) * static_cast<double>(i) /
                                               static_cast<double>(directions - 1);
        ParamPolyMatrix pm = inst.pm;
        // maximize lambda1*cos + lambda2*sin  ==  minimize the negated objective
        pm.objective = Eigen::Vector2d(-std::cos(theta), -std::sin(theta));
        Point pt{theta, std::nan(""), std::nan(""), "NumericalFailure"};
        try {
            auto prog = build_even_hierarchy(pm, nu, cliques);
            auto sol = solve(prog.sdp, solver_opts(g));
            pt.status = to_string(sol.status);
            if (sol.status == SdpStatus::Optimal) {
                pt.l1 = sol.free_duals(0);
                pt.l2 = sol.free_duals(1);
            }
        } catch (const std::exception&) {
            // recorded as a failure point; the scan continues
        }
        points[static_cast<std::size_t>(i)] = pt;
    }

    std::ostringstream csv;
    csv << "theta,lambda1,lambda2,status\n";
    auto emit = [&](double theta, double l1, double l2, const std::string& st) {
        char line[160];
        std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%s\n", theta, l1, l2, st.c_str());
        csv << line;
    };
    for (const auto& p : points) emit(p.theta, p.l1, p.l2, p.status);
    // the feasible set is symmetric under lambda1 -> -lambda1
    for (const auto& p : points) emit(M_PI - p.theta, -p.l1, p.l2, p.status);

    if (output.empty()) std::cout << csv.str();
    else write_file(output, csv.str());
    return kExitSolved;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chordal SOS decomposition of sparse polynomial matrices"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--tol", g.tol, "solver tolerance");
    app.add_option("--max-iter", g.max_iter, "solver iteration cap");
    app.add_option("--seed", g.seed, "sampling seed");
    app.add_flag("--json", g.as_json, "JSON output");
    app.add_option("--jobs", g.jobs, "parallel jobs for scans");
    app.add_option("--export-sdpa", g.export_sdpa_path, "also write the built SDP in SDPA format");

    std::string input, output, cert_path;

    auto* analyze = app.add_subcommand("analyze", "sparsity graph statistics of a problem bundle");
    analyze->add_option("input", input)->required();

    auto* build = app.add_subcommand("build", "build the SDP and report its shape");
    build->add_option("input", input)->required();
    std::string build_sdpa;
    build->add_option("-o,--output", build_sdpa, "write SDPA file");

    auto* solve_cmd = app.add_subcommand("solve", "build, solve, verify");
    solve_cmd->add_option("input", input)->required();
    solve_cmd->add_option("--cert", cert_path, "write certificate JSON");

    auto* export_cmd = app.add_subcommand("export", "write the SDP in SDPA sparse format");
    export_cmd->add_option("input", input)->required();
    export_cmd->add_option("-o,--output", output);

    auto* verify = app.add_subcommand("verify", "check a certificate against a problem bundle");
    verify->add_option("input", input)->required();
    verify->add_option("certificate", cert_path)->required();

    auto* example = app.add_subcommand("example", "run a built-in example");
    std::string name, k_str = "1", hierarchy;
    int d = 2, omega = 5, msize = 10, oracle_samples = 0;
    unsigned nu = 0;
    example->add_option("name", name, "ex3.1..ex3.6, appendixA, remark-polya")->required();
    example->add_option("--k", k_str, "parameter k for ex3.1 (rational or decimal)");
    example->add_option("--hierarchy", hierarchy, "basic|weighted|sparse|dense");
    example->add_option("--degree,-d", d, "SOS degree parameter");
    example->add_option("--nu", nu, "even-hierarchy / polya exponent");
    example->add_option("--omega", omega, "block count for ex3.5");
    example->add_option("--m", msize, "matrix size for ex3.6");
    example->add_option("--oracle", oracle_samples, "sampling-oracle sample count for ex3.6");

    auto* region = app.add_subcommand("region", "boundary scan of the ex3.5 feasible set");
    int directions = 16;
    unsigned rnu = 2;
    int romega = 2;
    std::string rh = "sparse";
    region->add_option("--omega", romega);
    region->add_option("--nu", rnu);
    region->add_option("--hierarchy", rh, "sparse|dense");
    region->add_option("--directions", directions)->check(CLI::Range(4, 1 << 20));
    region->add_option("-o,--output", output, "CSV path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) return cmd_analyze(g, input);
        if (*build) return cmd_build(g, input, build_sdpa);
        if (*solve_cmd) return cmd_solve(g, input, cert_path);
        if (*export_cmd) return cmd_export(g, input, output);
        if (*verify) return cmd_verify(g, input, cert_path);
        if (*example)
            return cmd_example(g, name, k_str, hierarchy, d, nu, omega, msize, oracle_samples);
        if (*region) return cmd_region(g, romega, rnu, rh, directions, output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitNumerical;
}
