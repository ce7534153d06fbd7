// Command-line surface: ground-state solves, single simulations, parameter
// sweeps, verification suites, and sweep-report reshaping. All artifacts land
// under the chosen output directory together with a hashed manifest.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fnls/fnls.hpp"

namespace fs = std::filesystem;
using fnls::json;

namespace {

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void log_info(const std::string& msg) {
    if (g_log_level >= 1) std::cerr << "[fnls] " << msg << '\n';
}

std::uint64_t fnv1a64_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

// manifest.json: every file under out_dir with size and content hash
void write_manifest(const fs::path& out_dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(out_dir))
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
            files.push_back(fs::relative(entry.path(), out_dir));
    std::sort(files.begin(), files.end());
    json m;
    m["files"] = json::array();
    for (const auto& rel : files) {
        char hex[32];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(out_dir / rel)));
        m["files"].push_back({{"path", rel.generic_string()},
                              {"bytes", fs::file_size(out_dir / rel)},
                              {"fnv1a64", hex}});
    }
    std::ofstream of(out_dir / "manifest.json");
    of << m.dump(2) << '\n';
}

// ---- ground-state file cache (opt-in via FNLS_CACHE_DIR) -------------------

std::string cache_key(const fnls::Grid& g) {
    std::ostringstream os;
    os << "gs_d" << g.dim();
    os << "_n";
    for (int a = 0; a < g.dim(); ++a) os << (a ? "x" : "") << g.points(a);
    os << "_L";
    for (int a = 0; a < g.dim(); ++a) os << (a ? "x" : "") << g.half_period(a);
    return os.str();
}

void load_groundstate_cache() {
    const char* dir = std::getenv("FNLS_CACHE_DIR");
    if (!dir || !fs::is_directory(dir)) return;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const fs::path p = entry.path();
        if (p.extension() != ".fnls" || p.stem().string().rfind("gs_", 0) != 0) continue;
        const fs::path sidecar = fs::path(p).replace_extension(".json");
        if (!fs::exists(sidecar)) continue;
        try {
            auto [field, header] = fnls::read_checkpoint(p.string());
            std::ifstream sf(sidecar);
            const json meta = json::parse(sf);
            auto gs = std::make_shared<fnls::GroundState>(fnls::GroundState{
                std::move(field), meta.at("mass_sq").get<double>(),
                meta.at("grad_norm_sq").get<double>(), meta.at("energy").get<double>(),
                meta.at("residual").get<double>()});
            fnls::GroundStateTable::instance().preload(gs);
            log_info("ground-state cache hit: " + p.filename().string());
        } catch (const std::exception& e) {
            log_info("ignoring unreadable cache entry " + p.string() + ": " + e.what());
        }
    }
}

json groundstate_sidecar(const fnls::GroundState& gs) {
    return json{{"mass_sq", gs.mass_sq},
                {"grad_norm_sq", gs.grad_norm_sq},
                {"energy", gs.energy},
                {"residual", gs.residual}};
}

void save_groundstate_cache() {
    const char* dir = std::getenv("FNLS_CACHE_DIR");
    if (!dir) return;
    fs::create_directories(dir);
    for (const auto& gs : fnls::GroundStateTable::instance().snapshot()) {
        const fs::path base = fs::path(dir) / cache_key(gs->Q.grid());
        const fs::path ckpt = fs::path(base).replace_extension(".fnls");
        if (fs::exists(ckpt)) continue;
        fnls::write_checkpoint(ckpt.string(), gs->Q, 0.0, 0.0, 0.0);
        std::ofstream sf(fs::path(base).replace_extension(".json"));
        sf << groundstate_sidecar(*gs).dump(2) << '\n';
    }
}

json load_spec_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CLI::ValidationError("--spec", "cannot open spec file " + path);
    return json::parse(is);  // json::parse_error carries byte/line diagnostics
}

void print_expectations(const fnls::ExperimentResult& res) {
    for (const auto& x : res.expectations) {
        std::printf("  %-28s %-6s observed=%- .6g limit=%- .6g %s\n", x.label.c_str(),
                    x.pass ? "pass" : "FAIL", x.observed, x.limit, x.detail.c_str());
    }
}

int run_verify_suite(const std::string& suite, const std::string& out_dir, int workers) {
    std::vector<std::string> names;
    if (suite == "identities")
        names = {"mass-identity", "boosted-momentum"};
    else if (suite == "conservative")
        names = {"soliton-conservative", "pseudo-conformal-rate"};
    else if (suite == "global")
        names = {"global-s1-d2", "global-s15-d1"};
    else if (suite == "smallmass")
        names = {"small-mass-c01", "small-mass-c02", "small-mass-c03"};
    else if (suite == "blowup")
        names = {"loglog-blowup"};
    else if (suite == "all")
        names = {"soliton-conservative", "pseudo-conformal-rate", "mass-identity",
                 "boosted-momentum",     "global-s1-d2",          "global-s15-d1",
                 "small-mass-c01",       "small-mass-c02",        "small-mass-c03",
                 "loglog-blowup"};
    else
        throw CLI::ValidationError(
            "--suite", "unknown suite '" + suite +
                           "' (identities|conservative|global|smallmass|blowup|all)");
    (void)workers;

    fnls::RunArtifacts art;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        art.out_dir = out_dir;
    }
    bool all_pass = true;
    std::printf("suite %s\n", suite.c_str());
    for (const auto& name : names) {
        const auto spec = fnls::builtin_experiment(name);
        log_info("running " + name);
        const auto res = fnls::run_experiment(spec, art);
        std::printf("%s  [%s]  mass=%.3g energy=%.3g momentum=%.3g\n", name.c_str(),
                    to_string(res.outcome), res.mass_residual, res.energy_residual,
                    res.momentum_residual);
        print_expectations(res);
        all_pass = all_pass && res.all_pass();
    }
    if (!out_dir.empty()) write_manifest(out_dir);
    return all_pass ? 0 : 1;
}

int run_report(const std::string& in_csv, const std::string& out_csv) {
    std::ifstream is(in_csv);
    if (!is) throw CLI::ValidationError("--in", "cannot open " + in_csv);
    std::string header;
    std::getline(is, header);
    if (header != fnls::sweep_csv_header())
        throw CLI::ValidationError("--in", in_csv + " is not a sweep table");
    std::ofstream os(out_csv);
    os << "s,a,delta,metric,value\n";
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (cols.size() != 8) continue;
        static const char* metrics[] = {"outcome", "t_star", "alpha_fit", "loglog_gain",
                                        "max_identity_residual"};
        for (int m = 0; m < 5; ++m)
            os << cols[0] << ',' << cols[1] << ',' << cols[2] << ',' << metrics[m] << ','
               << cols[3 + m] << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral lab for the L2-critical NLS with fractional dissipation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string log_level = "info";
    app.add_option("--log-level", log_level, "quiet|info|debug")->capture_default_str();

    // groundstate
    auto* gs_cmd = app.add_subcommand("groundstate", "solve the ground state profile");
    gs_cmd->fallthrough();
    int gs_dim = 1;
    std::size_t gs_n = 2048;
    double gs_box = 16.0, gs_tol = 1e-10;
    std::string gs_out = "groundstate.fnls";
    gs_cmd->add_option("--dim", gs_dim, "dimension (1..4)")->capture_default_str();
    gs_cmd->add_option("--n", gs_n, "points per axis (power of two)")->capture_default_str();
    gs_cmd->add_option("--box", gs_box, "box half-period L")->capture_default_str();
    gs_cmd->add_option("--tol", gs_tol, "residual tolerance")->capture_default_str();
    gs_cmd->add_option("--out", gs_out, "output checkpoint path")->capture_default_str();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run one experiment from a JSON spec");
    sim_cmd->fallthrough();
    std::string sim_spec, sim_out = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    sim_cmd->add_option("--spec", sim_spec, "experiment spec (JSON)")->required();
    sim_cmd->add_option("--out", sim_out, "output directory")->capture_default_str();
    sim_cmd->add_option("--seed", seed, "noise seed override")->each([&](const std::string&) {
        seed_given = true;
    });

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run an (s, a, delta) sweep from a JSON spec");
    sweep_cmd->fallthrough();
    std::string sweep_spec, sweep_out = "out";
    int workers = 1;
    sweep_cmd->add_option("--spec", sweep_spec, "sweep spec (JSON with axes)")->required();
    sweep_cmd->add_option("--out", sweep_out, "output directory")->capture_default_str();
    sweep_cmd->add_option("--workers", workers, "parallel experiments")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--seed", seed, "noise seed override")->each([&](const std::string&) {
        seed_given = true;
    });

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run a named verification suite");
    verify_cmd->fallthrough();
    std::string suite = "identities", verify_out;
    verify_cmd->add_option("--suite", suite, "identities|conservative|global|smallmass|blowup|all")
        ->capture_default_str();
    verify_cmd->add_option("--out", verify_out, "optional artifact directory");

    // report
    auto* report_cmd = app.add_subcommand("report", "reshape a sweep CSV into long format");
    report_cmd->fallthrough();
    std::string rep_in, rep_out = "sweep_long.csv";
    report_cmd->add_option("--in", rep_in, "sweep CSV")->required();
    report_cmd->add_option("--out", rep_out, "long-format CSV")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    g_log_level = log_level == "quiet" ? 0 : log_level == "debug" ? 2 : 1;

    try {
        load_groundstate_cache();

        if (*gs_cmd) {
            auto grid = fnls::make_grid(gs_dim, gs_n, gs_box);
            const auto gs = fnls::GroundStateTable::instance().get_or_solve(grid, gs_tol);
            const fs::path out = gs_out;
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            fnls::write_checkpoint(out.string(), gs->Q, 0.0, 0.0, 0.0);
            std::ofstream sf(fs::path(out).string() + ".json");
            sf << groundstate_sidecar(*gs).dump(2) << '\n';
            std::printf("ground state d=%d n=%zu L=%g: residual=%.3g mass_sq=%.17g\n", gs_dim,
                        gs_n, gs_box, gs->residual, gs->mass_sq);
            save_groundstate_cache();
            return 0;
        }

        if (*sim_cmd) {
            const json j = load_spec_file(sim_spec);
            fnls::ExperimentSpec spec = fnls::experiment_from_json(j);
            if (seed_given) spec.initial.noise_seed = seed;
            fs::create_directories(sim_out);
            fnls::RunArtifacts art;
            art.out_dir = sim_out;
            art.checkpoints = true;
            const auto res = fnls::run_experiment(spec, art);
            std::printf("%s: %s (%s), t=%.6g\n", res.name.c_str(), to_string(res.outcome),
                        res.reason.c_str(), res.final_t);
            print_expectations(res);
            save_groundstate_cache();
            write_manifest(sim_out);
            return res.all_pass() ? 0 : 1;
        }

        if (*sweep_cmd) {
            const json j = load_spec_file(sweep_spec);
            fnls::SweepSpec sw = fnls::sweep_from_json(j);
            if (seed_given) sw.base.initial.noise_seed = seed;
            fs::create_directories(sweep_out);
            const std::string csv = (fs::path(sweep_out) / "sweep.csv").string();
            const auto rows = fnls::run_sweep(sw, workers, csv);
            bool ok = true;
            for (const auto& r : rows) {
                std::printf("s=%-5g a=%-5g delta=%-5g -> %s\n", r.s, r.a, r.delta,
                            r.outcome.c_str());
                ok = ok && r.outcome.rfind("error:", 0) != 0;
            }
            save_groundstate_cache();
            write_manifest(sweep_out);
            return ok ? 0 : 1;
        }

        if (*verify_cmd) {
            const int rc = run_verify_suite(suite, verify_out, workers);
            save_groundstate_cache();
            return rc;
        }

        if (*report_cmd) return run_report(rep_in, rep_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::parse_error& e) {
        std::cerr << "error: malformed spec: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: bad spec field: " << e.what() << '\n';
        return 2;
    } catch (const fnls::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
