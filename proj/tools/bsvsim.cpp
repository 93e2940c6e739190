// bsvsim — angular Schmidt-mode structure and photon statistics of
// high-gain parametric down-conversion, driven by TOML scenario files.

#include "bsv/config.hpp"
#include "bsv/csv.hpp"
#include "bsv/errors.hpp"
#include "bsv/fock_oracle.hpp"
#include "bsv/gain.hpp"
#include "bsv/joint.hpp"
#include "bsv/observables.hpp"
#include "bsv/schmidt.hpp"
#include "bsv/tpa.hpp"
#include "bsv/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace bsv;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<double> gain_override;
    std::optional<int> grid_points;
    std::optional<int> n_max;
};

struct Scenario {
    ConfigDoc doc;
    Setup setup;
    std::string snapshot;
    std::string hash_hex;
};

Scenario load_scenario(const CommonOpts& opts) {
    Scenario sc;
    sc.doc = parse_config_file(opts.config_path);
    if (opts.gain_override) {
        ConfigValue v;
        v.kind = ConfigValue::Kind::number;
        v.num = *opts.gain_override;
        sc.doc.root["gain"] = v;
    }
    auto set_grid = [&sc](const std::string& key, double value) {
        ConfigValue v;
        v.kind = ConfigValue::Kind::number;
        v.num = value;
        sc.doc.tables["grid"][key] = v;
    };
    if (opts.grid_points) set_grid("n_points", *opts.grid_points);
    if (opts.n_max) set_grid("n_max", *opts.n_max);
    sc.setup = build_setup(sc.doc);
    sc.snapshot = canonical_config_text(sc.doc);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(sc.snapshot)));
    sc.hash_hex = buf;
    return sc;
}

std::vector<std::string> csv_meta(const Scenario& sc, const RadialGrid& grid,
                                  const std::string& normalization) {
    std::ostringstream g;
    g << "grid: n_points=" << grid.n_points << " n_max=" << grid.n_harmonics
      << " q_max=" << format_double(grid.q_max) << " rad/um";
    return {std::string("bsvsim ") + kVersion, "config_hash=" + sc.hash_hex, g.str(),
            "normalization=" + normalization};
}

struct Manifest {
    std::string subcommand;
    const Scenario* scenario = nullptr;
    std::vector<std::string> files;
    std::vector<std::string> notes;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void add(const fs::path& p) { files.push_back(p.string()); }
    void write(const fs::path& dir) const {
        std::ofstream out(dir / "manifest.txt");
        out << "tool: bsvsim " << kVersion << "\n";
        out << "subcommand: " << subcommand << "\n";
        if (scenario) out << "config_hash: " << scenario->hash_hex << "\n";
        const double dt = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0).count();
        out << "wall_time_s: " << format_double(dt) << "\n";
        for (const auto& n : notes) out << "note: " << n << "\n";
        for (const auto& f : files) out << "file: " << f << "\n";
        if (scenario) {
            out << "config_snapshot:\n";
            std::istringstream snap(scenario->snapshot);
            std::string line;
            while (std::getline(snap, line)) out << "  " << line << "\n";
        }
    }
};

struct Pipeline {
    RadialGrid grid;
    TpaKernel kernel;
    SchmidtModes modes;
};

Pipeline run_pipeline(const Setup& setup) {
    Pipeline p;
    p.grid = default_grid(setup);
    p.kernel = sample_kernel(setup, p.grid);
    p.modes = radial_schmidt(p.kernel);
    return p;
}

int cmd_spectrum(const CommonOpts& opts, bool two_d) {
    Scenario sc = load_scenario(opts);
    fs::create_directories(opts.out_dir);
    Manifest man;
    man.subcommand = two_d ? "spectrum --two-d" : "spectrum";
    man.scenario = &sc;
    const double gain = sc.setup.gain;
    if (gain == 0.0)
        std::cerr << "warning: gain is 0, the spectrum is identically zero\n";

    if (two_d || sc.setup.has_walkoff()) {
        PolarRaster raster = make_raster(sc.setup);
        JointKernelOperator op(sc.setup, raster);
        JointModes jm = joint_schmidt(op, sc.setup.raster.top_modes,
                                      sc.setup.raster.iterations);
        Map2d map = joint_spectrum(sc.setup, op, jm, gain);
        fs::path file = fs::path(opts.out_dir) / "spectrum_2d.csv";
        {
            std::ostringstream extra;
            extra << "joint solver: n_phi=" << raster.n_phi
                  << " top_modes=" << jm.lambda.size()
                  << " captured_weight=" << format_double(jm.captured_weight);
            auto meta = csv_meta(sc, raster.radial, "raw");
            meta.push_back(extra.str());
            CsvWriter csv(file.string(), {"theta_x_mrad", "theta_y_mrad", "intensity"}, meta);
            for (size_t j = 0; j < map.q.size(); ++j) {
                const double th = map.q[j] / map.k_s * 1e3;
                for (size_t a = 0; a < map.phi.size(); ++a)
                    csv.row({th * std::cos(map.phi[a]), th * std::sin(map.phi[a]),
                             map.intensity(j, a)});
            }
        }
        man.add(file);
        man.write(opts.out_dir);
        return 0;
    }

    Pipeline p = run_pipeline(sc.setup);
    const double theta_max = p.grid.q_max / sc.setup.signal_wavenumber * 1e3;
    AngularSpectrum spec =
        mean_photon_spectrum(sc.setup, p.kernel, p.modes, gain, theta_max,
                             sc.setup.pixels.width_mrad, AngularSpectrum::Norm::max1);
    fs::path file = fs::path(opts.out_dir) / "spectrum.csv";
    {
        CsvWriter csv(file.string(), {"theta_mrad", "intensity"},
                      csv_meta(sc, p.grid, "max1"));
        for (size_t i = 0; i < spec.theta_mrad.size(); ++i)
            csv.row({spec.theta_mrad[i], spec.intensity[i]});
    }
    man.add(file);
    man.write(opts.out_dir);
    return 0;
}

int cmd_modes(const CommonOpts& opts, int n_profiles) {
    Scenario sc = load_scenario(opts);
    fs::create_directories(opts.out_dir);
    Manifest man;
    man.subcommand = "modes";
    man.scenario = &sc;
    Pipeline p = run_pipeline(sc.setup);

    fs::path efile = fs::path(opts.out_dir) / "eigenvalues.csv";
    {
        CsvWriter csv(efile.string(), {"m", "n", "lambda"}, csv_meta(sc, p.grid, "sum=1"));
        for (const SchmidtMode& e : p.modes.entries)
            csv.row({double(e.m), double(e.n), e.lambda});
    }
    man.add(efile);

    const int nprof = std::min<int>(n_profiles, p.modes.entries.size());
    fs::path pfile = fs::path(opts.out_dir) / "profiles.csv";
    {
        std::vector<std::string> cols = {"q_rad_per_um"};
        std::vector<ModeProfile> profiles;
        for (int i = 0; i < nprof; ++i) {
            const SchmidtMode& e = p.modes.entries[i];
            std::string tag = "m" + std::to_string(e.m) + "_n" + std::to_string(e.n);
            cols.push_back("re_u_" + tag);
            cols.push_back("im_u_" + tag);
            profiles.push_back(mode_profile(p.modes, e.m, e.n));
        }
        CsvWriter csv(pfile.string(), cols, csv_meta(sc, p.grid, "L2(dq) orthonormal"));
        for (int k = 0; k < p.grid.n_points; ++k) {
            std::vector<double> row = {p.grid.nodes[k]};
            for (const ModeProfile& mp : profiles) {
                row.push_back(mp.u(k).real());
                row.push_back(mp.u(k).imag());
            }
            csv.row(row);
        }
    }
    man.add(pfile);

    std::vector<double> lambda;
    for (const SchmidtMode& e : p.modes.entries) lambda.push_back(e.lambda);
    const double k0 = schmidt_number(renormalized_eigenvalues(lambda, 0.0));
    const double kg = schmidt_number(renormalized_eigenvalues(lambda, sc.setup.gain));
    double lsum = 0.0;
    for (double l : lambda) lsum += l;
    std::cout << "modes: " << p.modes.entries.size() << " retained, sum lambda = "
              << format_double(lsum)
              << ", truncation loss = " << format_double(p.modes.truncation_loss) << "\n";
    std::cout << "K(G=0) = " << format_double(k0) << "\n";
    std::cout << "K(G=" << format_double(sc.setup.gain) << ") = " << format_double(kg)
              << "\n";
    man.write(opts.out_dir);
    return 0;
}

int cmd_variance_diff(const CommonOpts& opts, std::vector<double> theta0_list) {
    Scenario sc = load_scenario(opts);
    fs::create_directories(opts.out_dir);
    Manifest man;
    man.subcommand = "variance-diff";
    man.scenario = &sc;
    Pipeline p = run_pipeline(sc.setup);

    PixelCut cut = make_pixel_cut(sc.setup, sc.setup.pixels.theta_max_mrad,
                                  sc.setup.pixels.width_mrad, std::numbers::pi / 2);
    ModeOverlaps ov = pixel_mode_overlaps(sc.setup, p.kernel, p.modes, cut);
    MomentTables tables = correlators(ov, sc.setup.gain);

    for (double th0 : theta0_list) {
        AngularSpectrum curve = variance_difference(tables, th0);
        std::ostringstream name;
        name << "variance_diff_theta0_" << th0 << ".csv";
        fs::path file = fs::path(opts.out_dir) / name.str();
        {
            auto meta = csv_meta(sc, p.grid, "max1");
            meta.push_back("theta0_mrad=" + format_double(th0));
            CsvWriter csv(file.string(), {"theta_mrad", "variance_norm"}, meta);
            for (size_t i = 0; i < curve.theta_mrad.size(); ++i)
                csv.row({curve.theta_mrad[i], curve.intensity[i]});
        }
        man.add(file);
    }
    man.write(opts.out_dir);
    return 0;
}

int cmd_gain_scan(const CommonOpts& opts, double g_min, double g_max, int steps) {
    if (g_min > g_max) throw ConfigError("gain-scan: --g-min exceeds --g-max");
    Scenario sc = load_scenario(opts);
    fs::create_directories(opts.out_dir);
    Manifest man;
    man.subcommand = "gain-scan";
    man.scenario = &sc;
    Pipeline p = run_pipeline(sc.setup);

    std::vector<double> gains;
    if (steps <= 1) {
        gains.push_back(g_min);
    } else if (g_min > 0.0) {
        const double ratio = std::pow(g_max / g_min, 1.0 / (steps - 1));
        double g = g_min;
        for (int i = 0; i < steps; ++i, g *= ratio) gains.push_back(g);
    } else {
        const double step = (g_max - g_min) / (steps - 1);
        for (int i = 0; i < steps; ++i) gains.push_back(g_min + i * step);
    }

    PixelCut cut = make_pixel_cut(sc.setup, sc.setup.pixels.theta_max_mrad,
                                  sc.setup.pixels.width_mrad, std::numbers::pi / 2);
    ModeOverlaps ov = pixel_mode_overlaps(sc.setup, p.kernel, p.modes, cut);
    std::vector<GainScanRow> rows = gain_scan(p.modes, gains);

    fs::path file = fs::path(opts.out_dir) / "gain_scan.csv";
    {
        CsvWriter csv(file.string(), {"G", "K", "covariance_fwhm_mrad", "total_photons"},
                      csv_meta(sc, p.grid, "raw"));
        for (const GainScanRow& r : rows)
            csv.row({r.gain, r.schmidt_number, covariance_fwhm(ov, r.gain),
                     r.total_photons});
    }
    man.add(file);
    man.write(opts.out_dir);
    return 0;
}

int cmd_oracle_check(const std::string& out_dir, std::vector<double> r_list, int cutoff) {
    fs::create_directories(out_dir);
    Manifest man;
    man.subcommand = "oracle-check";
    std::printf("oracle-check: cutoff=%d pairs with r in {", cutoff);
    for (size_t i = 0; i < r_list.size(); ++i)
        std::printf("%s%g", i ? ", " : "", r_list[i]);
    std::printf("}\n");
    std::printf("%-28s %16s %16s %12s\n", "moment", "wick", "oracle", "rel_error");

    bool all_pass = true;
    for (double r : r_list) {
        // one +-n pair plus one n=0 mode, probed by aligned and mixed pixels
        TruncatedState st = evolve_blocks(
            {{SqueezeSpec::Kind::pair, r}, {SqueezeSpec::Kind::single, 0.6 * r}}, cutoff,
            1e-3);
        TruncatedState st_hi = evolve_blocks(
            {{SqueezeSpec::Kind::pair, r}, {SqueezeSpec::Kind::single, 0.6 * r}},
            cutoff + 10, 1e-3);

        std::vector<PixelOperator> pixels(3);
        pixels[0].coeff = Eigen::Vector3cd(1.0, 0.0, 0.0);
        pixels[1].coeff = Eigen::Vector3cd(0.0, 1.0, 0.0);
        pixels[2].coeff =
            Eigen::Vector3cd(Complex(0.6, 0.0), Complex(0.0, 0.48), Complex(0.64, 0.0));

        OracleMoments om = oracle_moments(st, pixels);
        OracleMoments om_hi = oracle_moments(st_hi, pixels);
        const double sens = moment_sensitivity(om, om_hi);
        const double tol = std::max(1e-6, 3.0 * sens);

        // the same pixels through the production Wick engine
        ModeOverlaps ov;
        ov.c.resize(3, 3);
        for (int p = 0; p < 3; ++p)
            for (int i = 0; i < 3; ++i) ov.c(p, i) = pixels[p].coeff(i);
        ov.partner = {1, 0, 2};
        ov.lambda = {r * r, r * r, 0.36 * r * r};
        MomentTables t = correlators(ov, 1.0);

        auto check = [&](const std::string& name, double wick, double oracle) {
            const double scale = std::max({std::abs(wick), std::abs(oracle), 1e-30});
            const double err = std::abs(wick - oracle) / scale;
            const bool hard_zero = std::abs(wick) < 1e-12 && std::abs(oracle) < 1e-12;
            const bool ok = hard_zero || err <= tol;
            all_pass = all_pass && ok;
            std::printf("%-28s %16.9e %16.9e %12.3e %s\n", name.c_str(), wick, oracle,
                        err, ok ? "" : "FAIL");
        };
        std::printf("r = %g (norm deficit %.3e, cutoff sensitivity %.3e, tol %.1e)\n", r,
                    st.norm_deficit, sens, tol);
        for (int p = 0; p < 3; ++p) {
            check("N[" + std::to_string(p) + "]", t.n(p), om.n(p));
            check("VarN[" + std::to_string(p) + "]", variance(t, p), om.var(p));
        }
        check("Cov[0,1]", covariance(t, 0, 1), om.cov(0, 1));
        check("Cov[0,2]", covariance(t, 0, 2), om.cov(0, 2));
        check("VarDiff[0,1]",
              variance(t, 0) + variance(t, 1) - 2.0 * covariance(t, 0, 1),
              om.var_diff(0, 1));
        if (r > 0.0) {
            check("g2[0,1]", g2(t, 0, 1), om.g2(0, 1));
            check("g2[0,0]", g2(t, 0, 0), om.g2(0, 0));
        }
    }
    man.notes.push_back(all_pass ? "all moments within tolerance"
                                 : "tolerance failure");
    man.write(out_dir);
    if (!all_pass) throw NumericalError("oracle-check: moment mismatch beyond tolerance");
    std::printf("oracle-check: PASS\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schmidt-mode structure and angular photon statistics of "
                 "high-gain parametric down-conversion"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool two_d = false;
    int n_profiles = 8;
    std::vector<double> theta0_list;
    double g_min = 0.01, g_max = 10.0;
    int steps = 30;
    std::vector<double> r_list = {0.5, 1.0, 1.5};
    int cutoff = 60;

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* copt = sub->add_option("--config", opts.config_path, "scenario file (TOML)");
        if (needs_config) copt->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--gain", opts.gain_override, "override the configured gain");
        sub->add_option("--grid-points", opts.grid_points, "override grid.n_points");
        sub->add_option("--n-max", opts.n_max, "override grid.n_max");
    };

    CLI::App* sp = app.add_subcommand("spectrum", "angular intensity spectrum");
    add_common(sp);
    sp->add_flag("--two-d", two_d, "2D map over (theta_x, theta_y)");

    CLI::App* md = app.add_subcommand("modes", "Schmidt eigenvalues and radial profiles");
    add_common(md);
    md->add_option("--profiles", n_profiles, "number of exported radial profiles");

    CLI::App* vd = app.add_subcommand("variance-diff",
                                      "variance of the photon-number difference");
    add_common(vd);
    vd->add_option("--theta0", theta0_list, "reference angle(s), mrad")->required();

    CLI::App* gs = app.add_subcommand("gain-scan",
                                      "Schmidt number and covariance width vs gain");
    add_common(gs);
    gs->add_option("--g-min", g_min, "lowest gain");
    gs->add_option("--g-max", g_max, "highest gain");
    gs->add_option("--steps", steps, "number of scan points");

    CLI::App* oc = app.add_subcommand("oracle-check",
                                      "Wick engine vs truncated Fock oracle");
    oc->add_option("--out", opts.out_dir, "output directory");
    oc->add_option("--r", r_list, "squeeze parameters");
    oc->add_option("--cutoff", cutoff, "Fock-space occupancy cutoff");

    try {
        app.parse(argc, argv);
        if (sp->parsed()) return cmd_spectrum(opts, two_d);
        if (md->parsed()) return cmd_modes(opts, n_profiles);
        if (vd->parsed()) return cmd_variance_diff(opts, theta0_list);
        if (gs->parsed()) return cmd_gain_scan(opts, g_min, g_max, steps);
        if (oc->parsed()) return cmd_oracle_check(opts.out_dir, r_list, cutoff);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
