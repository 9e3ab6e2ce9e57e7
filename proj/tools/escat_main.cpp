#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "escat/generate.hpp"
#include "escat/io.hpp"
#include "escat/mie.hpp"
#include "escat/smatrix.hpp"
#include "escat/verify.hpp"

namespace {

using namespace escat;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CommonArgs {
    std::string config_path;
    std::string output_path;
    std::string solution_path;
    std::string suite = "default";
    long long seed = -1;
    int threads = 1;
    double tol = 0.0;
};

void require_path(const std::string& p, const char* what) {
    if (p.empty()) throw ValidationError(std::string("missing required option --") + what);
}

// --seed / --tol override the config values when given
void apply_overrides(SceneConfiguration& scene, const CommonArgs& a) {
    if (a.seed >= 0) scene.seed = static_cast<std::uint64_t>(a.seed);
    if (a.tol > 0.0) scene.gmres_tol = a.tol;
}

void ensure_particles(Config& cfg) {
    if (cfg.scene.particles.empty() && cfg.generate)
        cfg.scene.particles = generate_particles(*cfg.generate, cfg.scene.seed);
}

bool source_engulfed(const SceneConfiguration& scene) {
    if (scene.incident.kind != IncidentField::Kind::point_source) return false;
    for (const auto& p : scene.particles)
        if (point_in_particle(p, scene.incident.source)) return true;
    return false;
}

std::vector<const ScatteringMatrix*> as_pointers(const std::vector<ScatteringMatrix>& v) {
    std::vector<const ScatteringMatrix*> p;
    p.reserve(v.size());
    for (const auto& s : v) p.push_back(&s);
    return p;
}

int cmd_smatrix(const CommonArgs& a) {
    require_path(a.config_path, "config");
    require_path(a.output_path, "output");
    Config cfg = load_config(a.config_path);
    Shape shape;
    if (cfg.smatrix_shape)
        shape = *cfg.smatrix_shape;
    else if (!cfg.scene.particles.empty())
        shape = cfg.scene.particles[0].shape;
    else
        throw ValidationError("config needs a 'shape' key (or particles) for smatrix");
    ParticleGeometry geom;
    geom.shape = shape;
    auto [S, rep] = build_scattering_matrix(geom, cfg.scene.wave, cfg.scene.n_term,
                                            cfg.scene.n_pts, a.threads);
    write_scattering_matrix(a.output_path, S, cfg.scene.n_pts);
    double max_res = 0.0;
    for (double r : rep.column_residuals) max_res = std::max(max_res, r);
    std::cout << "smatrix: dim " << S.entries.rows() << ", n_pts " << rep.n_pts
              << ", condition estimate " << format_g17(rep.condition_estimate)
              << ", max column residual " << format_g17(max_res) << ", "
              << format_g17(rep.elapsed_seconds) << " s -> " << a.output_path << "\n";
    if (rep.condition_estimate > 1e12)
        std::cerr << "warning: boundary system is nearly singular (condition estimate "
                  << format_g17(rep.condition_estimate) << ")\n";
    return 0;
}

int cmd_generate(const CommonArgs& a) {
    require_path(a.config_path, "config");
    require_path(a.output_path, "output");
    Config cfg = load_config(a.config_path);
    if (!cfg.generate) throw ValidationError("config has no 'generate' section");
    apply_overrides(cfg.scene, a);
    cfg.scene.particles = generate_particles(*cfg.generate, cfg.scene.seed);
    validate_scene(cfg.scene);
    atomic_write(a.output_path, config_with_particles_json(cfg));
    std::cout << "generate: " << cfg.scene.particles.size() << " particles, seed "
              << cfg.scene.seed << " -> " << a.output_path << "\n";
    return 0;
}

int cmd_solve(const CommonArgs& a) {
    require_path(a.config_path, "config");
    require_path(a.output_path, "output");
    Config cfg = load_config(a.config_path);
    apply_overrides(cfg.scene, a);

    auto t0 = Clock::now();
    ensure_particles(cfg);
    validate_scene(cfg.scene);
    double t_assembly = seconds_since(t0);

    t0 = Clock::now();
    std::vector<ScatteringMatrix> mats = build_scene_matrices(cfg.scene, a.threads);
    double t_smatrix = seconds_since(t0);

    t0 = Clock::now();
    SceneSolution sol = solve_scene(cfg.scene, as_pointers(mats), a.threads);
    double t_solve = seconds_since(t0);

    write_solution(a.output_path, cfg.scene, sol);

    RunManifest man;
    man.config_echo = cfg.raw_json;
    man.threads = a.threads;
    man.tol = cfg.scene.gmres_tol;
    man.seed = cfg.scene.seed;
    man.iterations = sol.iterations;
    man.residual = sol.residual;
    man.t_assembly = t_assembly;
    man.t_smatrix = t_smatrix;
    man.t_solve = t_solve;
    if (source_engulfed(cfg.scene)) {
        t0 = Clock::now();
        man.field_error = reference_scene_error(cfg.scene, sol);
        man.t_field = seconds_since(t0);
    }
    std::string manifest_path = a.output_path + ".manifest.json";
    man.artifact_paths = {a.output_path, manifest_path};
    atomic_write(manifest_path, manifest_to_json(man));

    std::cout << "solve: " << cfg.scene.particles.size() << " particles, " << sol.iterations
              << " iterations, residual " << format_g17(sol.residual);
    if (man.field_error) std::cout << ", field error " << format_g17(*man.field_error);
    std::cout << " -> " << a.output_path << "\n";
    return 0;
}

int cmd_field(const CommonArgs& a) {
    require_path(a.config_path, "config");
    require_path(a.solution_path, "solution");
    require_path(a.output_path, "output");
    Config cfg = load_config(a.config_path);
    if (!cfg.grid) throw ValidationError("config has no 'grid' section");
    apply_overrides(cfg.scene, a);
    ensure_particles(cfg);
    validate_scene(cfg.scene);
    SceneSolution sol =
        read_solution(a.solution_path, static_cast<int>(cfg.scene.particles.size()));
    if (!sol.outgoing.empty() && sol.outgoing[0].n_term != cfg.scene.n_term)
        throw ValidationError("solution truncation does not match the config");
    FieldGrid grid = evaluate_grid(cfg.scene, sol, *cfg.grid, a.threads);
    write_field_csv(a.output_path, grid);
    size_t live = 0;
    for (auto m : grid.mask)
        if (!m) ++live;
    std::cout << "field: " << grid.points.size() << " grid points, " << live
              << " evaluated -> " << a.output_path << "\n";
    return 0;
}

int cmd_verify(const CommonArgs& a) {
    std::vector<CheckResult> checks = run_suite(a.suite, a.threads);
    size_t passed = 0;
    for (const auto& c : checks) {
        char val[64], tol[64];
        std::snprintf(val, sizeof(val), "%.6g", c.value);
        std::snprintf(tol, sizeof(tol), "%.6g", c.tol);
        std::cout << (c.pass ? "PASS" : "FAIL") << " " << c.name << " value=" << val
                  << " tol=" << tol;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
        if (c.pass) ++passed;
    }
    std::cout << passed << "/" << checks.size() << " checks passed\n";
    return passed == checks.size() ? 0 : 1;
}

int cmd_bench(const CommonArgs& a) {
    require_path(a.config_path, "config");
    require_path(a.output_path, "output");
    Config cfg = load_config(a.config_path);
    apply_overrides(cfg.scene, a);

    std::vector<double> omegas;
    std::vector<int> counts;
    if (cfg.sweep) {
        omegas = cfg.sweep->omega_values;
        counts = cfg.sweep->count_values;
    }
    if (omegas.empty()) omegas = {cfg.scene.wave.omega};
    if (counts.empty()) counts = {0};  // 0 = particles as configured

    std::vector<BenchRow> rows;
    for (double omega : omegas) {
        for (int count : counts) {
            SceneConfiguration scene = cfg.scene;
            scene.wave = compute_wavenumbers(omega, cfg.scene.wave.lambda, cfg.scene.wave.mu);
            if (count > 0) {
                if (!cfg.generate)
                    throw ValidationError("count sweep needs a 'generate' section");
                GenerateSpec gs = *cfg.generate;
                gs.count = count;
                scene.particles = generate_particles(gs, scene.seed);
            } else if (scene.particles.empty() && cfg.generate) {
                scene.particles = generate_particles(*cfg.generate, scene.seed);
            }
            validate_scene(scene);

            BenchRow row;
            row.omega = omega;
            row.count = static_cast<int>(scene.particles.size());
            row.n_term = scene.n_term;
            row.n_pts = scene.n_pts;

            auto t0 = Clock::now();
            std::vector<ScatteringMatrix> mats = build_scene_matrices(scene, a.threads);
            row.t_smatrix = seconds_since(t0);

            t0 = Clock::now();
            SceneSolution sol = solve_scene(scene, as_pointers(mats), a.threads);
            row.t_solve = seconds_since(t0);
            row.iterations = sol.iterations;
            row.residual = sol.residual;
            if (source_engulfed(scene)) row.field_error = reference_scene_error(scene, sol);
            rows.push_back(row);
            std::cout << "bench: omega " << format_g17(omega) << ", M " << row.count << " -> "
                      << row.iterations << " iterations\n";
        }
    }
    write_bench_csv(a.output_path, rows);
    std::cout << "bench: " << rows.size() << " rows -> " << a.output_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elastic multi-particle scattering solver"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub, bool with_solution = false) {
        sub->add_option("--config", args.config_path, "JSON configuration file");
        sub->add_option("--output", args.output_path, "output file path");
        if (with_solution)
            sub->add_option("--solution", args.solution_path, "solution coefficient file");
        sub->add_option("--seed", args.seed, "override the config seed")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--threads", args.threads, "worker threads")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol", args.tol, "override the GMRES tolerance")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* sm = app.add_subcommand("smatrix", "build and persist a scattering matrix");
    add_common(sm);
    CLI::App* gen = app.add_subcommand("generate", "place particles and emit a full config");
    add_common(gen);
    CLI::App* sol = app.add_subcommand("solve", "solve a scene and persist the coefficients");
    add_common(sol);
    CLI::App* fld = app.add_subcommand("field", "evaluate the total field on a grid");
    add_common(fld, true);
    CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("suite", args.suite, "disk|example1|properties|smoke|default");
    ver->add_option("--threads", args.threads, "worker threads")->check(CLI::PositiveNumber);
    CLI::App* ben = app.add_subcommand("bench", "sweep omega and particle count");
    add_common(ben);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sm->parsed()) return cmd_smatrix(args);
        if (gen->parsed()) return cmd_generate(args);
        if (sol->parsed()) return cmd_solve(args);
        if (fld->parsed()) return cmd_field(args);
        if (ver->parsed()) return cmd_verify(args);
        if (ben->parsed()) return cmd_bench(args);
    } catch (const escat::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const escat::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const escat::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
