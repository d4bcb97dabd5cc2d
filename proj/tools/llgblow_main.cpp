#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "llgblow/evolve.hpp"
#include "llgblow/io.hpp"
#include "llgblow/nonlocal.hpp"
#include "llgblow/reduced.hpp"
#include "llgblow/spectral.hpp"
#include "llgblow/verify.hpp"

namespace {

using namespace llgblow;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(io::resolve_output_path(path));
    if (!out) throw domain_error("cannot open output file " + path);
    return out;
}

int cmd_verify(unsigned seed) {
    const auto rep = verify::run_all(seed);
    std::cout << rep.text;
    std::cout << (rep.failures == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(rep.failures)) << "\n";
    return rep.failures == 0 ? 0 : 1;
}

int cmd_moments(const std::string& out_path) {
    std::ostringstream csv;
    csv << "name,computed,expected,abs_error\n";
    bool ok = true;
    for (const auto& row : reduced::moment_table()) {
        const double err = std::abs(row.computed - row.expected);
        ok = ok && err <= 1e-8;
        csv << row.name << "," << io::format_double(row.computed) << ","
            << io::format_double(row.expected) << "," << io::format_double(err) << "\n";
    }
    if (out_path.empty())
        std::cout << csv.str();
    else
        open_output(out_path) << csv.str();
    return ok ? 0 : 1;
}

int cmd_spectrum(const std::vector<int>& modes, const std::vector<double>& radii,
                 const std::string& out_path) {
    std::ostringstream csv;
    csv << "k,R,lambda,residual\n";
    bool ok = true;
    std::map<int, std::vector<std::pair<double, double>>> series;
    for (int k : modes)
        for (double R : radii) {
            spectral::SpectralProblem prob;
            prob.k = k;
            prob.R = R;
            const auto e = spectral::principal_eigenvalue(prob);
            ok = ok && e.lambda_min >= 0.0;
            series[k].push_back({R, e.lambda_min});
            csv << k << "," << io::format_double(R) << "," << io::format_double(e.lambda_min) << ","
                << io::format_double(e.residual) << "\n";
        }
    for (const auto& [k, pts] : series) {
        if (pts.size() < 2) continue;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [R, lam] : pts) {
            const double x = std::log(R), y = std::log(std::max(lam, 1e-300));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double n = static_cast<double>(pts.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        csv << "# mode " << k << " loglog slope " << io::format_double(slope);
        if (k == 0) {
            double lo = 1e300, hi = 0.0;
            for (const auto& [R, lam] : pts) {
                const double c = lam * R * R * std::log(R);
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            csv << " ; lambda*R^2*lnR in [" << io::format_double(lo) << ", " << io::format_double(hi)
                << "]";
        }
        csv << "\n";
    }
    if (out_path.empty())
        std::cout << csv.str();
    else
        open_output(out_path) << csv.str();
    return ok ? 0 : 1;
}

int cmd_correction(const std::string& history_path, const std::string& out_path) {
    const auto hist = nonlocal::ParamHistory::load_csv(history_path);
    const PhysParams pp(1.0, 0.0);
    const double t = 0.5 * (hist.t_min() + hist.t_max());
    std::ostringstream csv;
    csv << "z,t,re_Phi0,im_Phi0,re_dz,im_dz,re_dzz,im_dzz\n";
    for (int i = 0; i < 24; ++i) {
        const double z = std::pow(10.0, -4.0 + 4.0 * i / 23.0) * std::sqrt(t);
        const auto s = nonlocal::phi0_eval(z, t, hist, pp);
        csv << io::format_double(z) << "," << io::format_double(t) << ","
            << io::format_double(s.Phi0.real()) << "," << io::format_double(s.Phi0.imag()) << ","
            << io::format_double(s.dz.real()) << "," << io::format_double(s.dz.imag()) << ","
            << io::format_double(s.dzz.real()) << "," << io::format_double(s.dzz.imag()) << "\n";
    }
    if (out_path.empty())
        std::cout << csv.str();
    else
        open_output(out_path) << csv.str();
    return 0;
}

int cmd_reduce(double T, double kappa, const std::string& out_path) {
    std::ostringstream csv;
    csv << "t,p0,p0dot,B0_at_t,target\n";
    for (double frac : {0.9, 0.99, 0.999}) {
        const double t = frac * T;
        const double lnT = std::abs(std::log(T));
        const double L = std::log(T - t);
        const double lam = lnT * (T - t) / (L * L);
        auto p0hist = nonlocal::ParamHistory::analytic(
            [&](double s) { return complexd{reduced::p0_value(T, kappa, s), 0.0}; },
            [&](double s) { return complexd{reduced::p0_dot(T, kappa, s), 0.0}; },
            [](double) { return Vec2{0.0, 0.0}; }, [](double) { return Vec2{0.0, 0.0}; }, 0.0, T);
        const complexd b0 = reduced::b0_apply(p0hist, t, lam);
        csv << io::format_double(t) << "," << io::format_double(reduced::p0_value(T, kappa, t)) << ","
            << io::format_double(reduced::p0_dot(T, kappa, t)) << "," << io::format_double(b0.real())
            << "," << io::format_double(-kappa) << "\n";
    }
    if (out_path.empty())
        std::cout << csv.str();
    else
        open_output(out_path) << csv.str();
    return 0;
}

evolve::SimConfig config_from_map(const std::map<std::string, std::string>& cfg) {
    evolve::SimConfig sim;
    sim.pp = PhysParams(io::get_double(cfg, "phys.a", 1.0), io::get_double(cfg, "phys.b", 0.0));
    sim.r_outer = io::get_double(cfg, "mesh.r_outer", 1.0);
    sim.n_nodes = static_cast<std::size_t>(io::get_int(cfg, "mesh.n_nodes", 500));
    sim.cfl = io::get_double(cfg, "time.cfl", 0.25);
    sim.dt_policy = io::get_string(cfg, "time.policy", "fixed") == "self_similar"
                        ? evolve::DtPolicy::self_similar
                        : evolve::DtPolicy::fixed;
    sim.dt_self_similar = io::get_double(cfg, "time.c_self_similar", 0.0);
    sim.renormalize = io::get_bool(cfg, "time.renormalize", true);
    sim.t_max = io::get_double(cfg, "time.t_max", 1.0);
    sim.lambda_stop = io::get_double(cfg, "stop.lambda_threshold", 0.0);
    sim.diag_stride = static_cast<std::size_t>(io::get_int(cfg, "diag.stride", 64));
    return sim;
}

int cmd_evolve(const std::string& config_path, const std::string& out_path,
               const std::string& fit_path) {
    const auto cfg = io::load_config(config_path);
    evolve::SimConfig sim = config_from_map(cfg);
    const double lambda0 = io::get_double(cfg, "init.lambda0", 0.05);
    const double twist = io::get_double(cfg, "init.twist", 0.25);
    const double delta = io::get_double(cfg, "init.delta", 0.0);
    evolve::SimState st = (twist != 0.0 || delta != 0.0)
                              ? evolve::initial_twisted_bubble(sim, lambda0, twist, delta)
                              : evolve::initial_bubble(sim, lambda0);
    const auto diag = evolve::run_and_fit(sim, std::move(st));
    std::ostringstream csv;
    csv << "t,lambda_est,energy,max_grad\n";
    for (const auto& s : diag.samples)
        csv << io::format_double(s.t) << "," << io::format_double(s.lambda_est) << ","
            << io::format_double(s.energy) << "," << io::format_double(s.max_grad) << "\n";
    if (out_path.empty())
        std::cout << csv.str();
    else
        open_output(out_path) << csv.str();
    nlohmann::json j;
    if (diag.fit) {
        j = {{"T_est", diag.fit->T_est},
             {"exponent", diag.fit->exponent},
             {"prefactor", diag.fit->prefactor},
             {"window", {diag.fit->window_lo, diag.fit->window_hi}}};
    } else {
        j = {{"fit", "absent"}};
    }
    if (fit_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        open_output(fit_path) << j.dump(2) << "\n";
    return 0;
}

int cmd_fit(const std::string& series_path, const std::string& out_path) {
    std::ifstream in(series_path);
    if (!in) throw domain_error("cannot open series file " + series_path);
    std::string line;
    std::getline(in, line); // header
    std::vector<evolve::DiagnosticsSample> samples;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() >= 2) samples.push_back({row[0], row[1], row.size() > 2 ? row[2] : 0.0,
                                                row.size() > 3 ? row[3] : 0.0});
    }
    const auto fit = evolve::fit_rate(samples);
    nlohmann::json j;
    if (fit)
        j = {{"T_est", fit->T_est},
             {"exponent", fit->exponent},
             {"prefactor", fit->prefactor},
             {"window", {fit->window_lo, fit->window_hi}}};
    else
        j = {{"fit", "absent"}};
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        open_output(out_path) << j.dump(2) << "\n";
    return 0;
}

int cmd_params_check(const std::string& path) {
    const auto cfg = io::load_config(path);
    reduced::GluingParams g{};
    g.Theta = io::get_double(cfg, "Theta", 0.0);
    g.beta = io::get_double(cfg, "beta", 0.0);
    g.sigma0 = io::get_double(cfg, "sigma0", 0.0);
    g.delta0 = io::get_double(cfg, "delta0", 0.0);
    g.nu = io::get_double(cfg, "nu", 0.0);
    g.l = io::get_double(cfg, "l", 0.0);
    g.alpha = io::get_double(cfg, "alpha", 0.0);
    g.alpha0 = io::get_double(cfg, "alpha0", 0.0);
    const auto res = reduced::param_feasible(g);
    if (res.feasible) {
        std::cout << "feasible (m = " << io::format_double(g.m()) << ")\n";
        return 0;
    }
    std::cout << "infeasible:\n";
    for (const auto& v : res.violations) std::cout << "  violates: " << v << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for equivariant LLG bubble dynamics and type-II blow-up"};
    app.require_subcommand(1);

    unsigned seed = 1;
    std::string out_path, fit_path, history_path, config_path, series_path, params_path;
    std::vector<int> modes{0, 1};
    std::vector<double> radii{50, 100, 200, 400};
    double T = 1e-3, kappa = 1.0;

    auto* verify_cmd = app.add_subcommand("verify", "run the deterministic invariant battery");
    verify_cmd->add_option("--seed", seed, "RNG seed");

    auto* moments_cmd = app.add_subcommand("moments", "orthogonality moment table as CSV");
    moments_cmd->add_option("-o,--out", out_path, "output file (default stdout)");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "principal eigenvalues of Q_{R,k}");
    spectrum_cmd->add_option("--modes", modes, "mode indices")->delimiter(',');
    spectrum_cmd->add_option("--radii", radii, "ball radii")->delimiter(',');
    spectrum_cmd->add_option("-o,--out", out_path, "output file (default stdout)");

    auto* correction_cmd = app.add_subcommand("correction", "non-local correction samples from a history");
    correction_cmd->add_option("--history", history_path, "history CSV")->required();
    correction_cmd->add_option("-o,--out", out_path, "output file (default stdout)");

    auto* reduce_cmd = app.add_subcommand("reduce", "reduced operator on the leading rate profile");
    reduce_cmd->add_option("--T", T, "blow-up time");
    reduce_cmd->add_option("--kappa", kappa, "rate prefactor");
    reduce_cmd->add_option("-o,--out", out_path, "output file (default stdout)");

    auto* evolve_cmd = app.add_subcommand("evolve", "run the 1-equivariant simulator");
    evolve_cmd->add_option("--config", config_path, "key=value or JSON config")->required();
    evolve_cmd->add_option("-o,--out", out_path, "time-series CSV (default stdout)");
    evolve_cmd->add_option("--fit-out", fit_path, "fit JSON (default stdout)");

    auto* fit_cmd = app.add_subcommand("fit", "fit a blow-up rate to a recorded series");
    fit_cmd->add_option("--series", series_path, "CSV with t,lambda_est columns")->required();
    fit_cmd->add_option("-o,--out", out_path, "output JSON (default stdout)");

    auto* params_cmd = app.add_subcommand("params", "gluing parameter utilities");
    auto* check_cmd = params_cmd->add_subcommand("check", "feasibility of a key=value parameter file");
    check_cmd->add_option("file", params_path, "parameter file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*verify_cmd) return cmd_verify(seed);
        if (*moments_cmd) return cmd_moments(out_path);
        if (*spectrum_cmd) return cmd_spectrum(modes, radii, out_path);
        if (*correction_cmd) return cmd_correction(history_path, out_path);
        if (*reduce_cmd) return cmd_reduce(T, kappa, out_path);
        if (*evolve_cmd) return cmd_evolve(config_path, out_path, fit_path);
        if (*fit_cmd) return cmd_fit(series_path, out_path);
        if (*params_cmd) {
            if (*check_cmd) return cmd_params_check(params_path);
            std::cerr << "params: missing subcommand\n";
            return 2;
        }
    } catch (const llgblow::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
