#include "escat/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace escat {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string format_g17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double_token(const std::string& tok, const std::string& where) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw IoError("malformed number in " + where + ": '" + tok + "'");
    return v;
}

void check_keys(const njson& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) { ok = true; break; }
        if (!ok) throw ValidationError("unknown key '" + item.key() + "' in " + where);
    }
}

double need_number(const njson& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError(where + " requires key '" + key + "'");
    if (!j[key].is_number()) throw ValidationError(where + "." + key + " must be a number");
    return j[key].get<double>();
}

double opt_number(const njson& j, const char* key, double dflt, const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw ValidationError(where + "." + key + " must be a number");
    return j[key].get<double>();
}

int opt_int(const njson& j, const char* key, int dflt, const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number_integer()) throw ValidationError(where + "." + key + " must be an integer");
    return j[key].get<int>();
}

Eigen::Vector2d need_vec2(const njson& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError(where + " requires key '" + key + "'");
    const njson& v = j[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ValidationError(where + "." + key + " must be [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

Shape parse_shape(const njson& j, const std::string& where) {
    check_keys(j, {"a", "b", "c"}, where);
    Shape s;
    s.a = need_number(j, "a", where);
    s.b = opt_number(j, "b", 0.0, where);
    s.c = opt_int(j, "c", 3, where);
    return s;
}

IncidentField parse_incident(const njson& j) {
    check_keys(j, {"kind", "direction", "source"}, "incident");
    IncidentField inc;
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ValidationError("incident.kind must be a string");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "plane") inc.kind = IncidentField::Kind::plane;
    else if (kind == "plane_p") inc.kind = IncidentField::Kind::plane_p;
    else if (kind == "plane_s") inc.kind = IncidentField::Kind::plane_s;
    else if (kind == "point_source") inc.kind = IncidentField::Kind::point_source;
    else throw ValidationError("incident.kind must be plane|plane_p|plane_s|point_source");
    if (inc.kind == IncidentField::Kind::point_source) {
        if (j.contains("direction"))
            throw ValidationError("incident.direction does not apply to a point source");
        inc.source = need_vec2(j, "source", "incident");
    } else {
        if (j.contains("source"))
            throw ValidationError("incident.source applies only to a point source");
        inc.direction = opt_number(j, "direction", 0.0, "incident");
    }
    return inc;
}

const char* incident_kind_name(IncidentField::Kind k) {
    switch (k) {
        case IncidentField::Kind::plane: return "plane";
        case IncidentField::Kind::plane_p: return "plane_p";
        case IncidentField::Kind::plane_s: return "plane_s";
        case IncidentField::Kind::point_source: return "point_source";
    }
    return "plane";
}

ojson shape_to_json(const Shape& s) {
    ojson j;
    j["a"] = s.a;
    j["b"] = s.b;
    j["c"] = s.c;
    return j;
}

}  // namespace

Config parse_config_text(const std::string& text) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j,
               {"omega", "lambda", "mu", "n_term", "n_pts", "gmres_tol", "min_separation",
                "seed", "incident", "particles", "generate", "grid", "sweep", "shape"},
               "config");

    Config cfg;
    cfg.raw_json = text;
    double omega = need_number(j, "omega", "config");
    double lambda = need_number(j, "lambda", "config");
    double mu = need_number(j, "mu", "config");
    cfg.scene.wave = compute_wavenumbers(omega, lambda, mu);
    cfg.scene.n_term = opt_int(j, "n_term", 20, "config");
    cfg.scene.n_pts = opt_int(j, "n_pts", 200, "config");
    cfg.scene.gmres_tol = opt_number(j, "gmres_tol", 1e-9, "config");
    cfg.scene.min_separation = opt_number(j, "min_separation", 0.0, "config");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw ValidationError("config.seed must be a nonnegative integer");
        long long s = j["seed"].get<long long>();
        if (s < 0) throw ValidationError("config.seed must be a nonnegative integer");
        cfg.scene.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("incident")) cfg.scene.incident = parse_incident(j["incident"]);

    if (j.contains("particles")) {
        if (!j["particles"].is_array()) throw ValidationError("config.particles must be an array");
        for (size_t i = 0; i < j["particles"].size(); ++i) {
            const njson& p = j["particles"][i];
            std::string where = "particles[" + std::to_string(i) + "]";
            check_keys(p, {"center", "rotation", "shape"}, where);
            ParticleGeometry g;
            g.center = need_vec2(p, "center", where);
            g.rotation = opt_number(p, "rotation", 0.0, where);
            if (!p.contains("shape")) throw ValidationError(where + " requires key 'shape'");
            g.shape = parse_shape(p["shape"], where + ".shape");
            cfg.scene.particles.push_back(g);
        }
    }

    if (j.contains("generate")) {
        const njson& g = j["generate"];
        check_keys(g, {"count", "box", "shapes", "min_separation", "random_rotations", "sweeps"},
                   "generate");
        GenerateSpec gs;
        gs.count = opt_int(g, "count", 0, "generate");
        if (gs.count < 1) throw ValidationError("generate.count must be >= 1");
        if (!g.contains("box") || !g["box"].is_array() || g["box"].size() != 4)
            throw ValidationError("generate.box must be [x0, y0, x1, y1]");
        for (int i = 0; i < 4; ++i) {
            if (!g["box"][i].is_number()) throw ValidationError("generate.box entries must be numbers");
            gs.box[i] = g["box"][i].get<double>();
        }
        if (!g.contains("shapes") || !g["shapes"].is_array() || g["shapes"].empty())
            throw ValidationError("generate.shapes must be a nonempty array");
        for (size_t i = 0; i < g["shapes"].size(); ++i)
            gs.shapes.push_back(parse_shape(g["shapes"][i],
                                            "generate.shapes[" + std::to_string(i) + "]"));
        gs.min_separation = opt_number(g, "min_separation", -1.0, "generate");
        if (g.contains("random_rotations")) {
            if (!g["random_rotations"].is_boolean())
                throw ValidationError("generate.random_rotations must be a boolean");
            gs.random_rotations = g["random_rotations"].get<bool>();
        }
        gs.sweeps = opt_int(g, "sweeps", 8, "generate");
        cfg.generate = gs;
    }

    if (j.contains("grid")) {
        const njson& g = j["grid"];
        check_keys(g, {"xmin", "xmax", "ymin", "ymax", "nx", "ny", "clearance_factor"}, "grid");
        FieldGridSpec spec;
        spec.xmin = need_number(g, "xmin", "grid");
        spec.xmax = need_number(g, "xmax", "grid");
        spec.ymin = need_number(g, "ymin", "grid");
        spec.ymax = need_number(g, "ymax", "grid");
        spec.nx = opt_int(g, "nx", 2, "grid");
        spec.ny = opt_int(g, "ny", 2, "grid");
        spec.clearance_factor = opt_number(g, "clearance_factor", 5.0, "grid");
        cfg.grid = spec;
    }

    if (j.contains("sweep")) {
        const njson& s = j["sweep"];
        check_keys(s, {"omega", "count"}, "sweep");
        SweepSpec sw;
        if (s.contains("omega")) {
            if (!s["omega"].is_array()) throw ValidationError("sweep.omega must be an array");
            for (const auto& v : s["omega"]) {
                if (!v.is_number()) throw ValidationError("sweep.omega entries must be numbers");
                sw.omega_values.push_back(v.get<double>());
            }
        }
        if (s.contains("count")) {
            if (!s["count"].is_array()) throw ValidationError("sweep.count must be an array");
            for (const auto& v : s["count"]) {
                if (!v.is_number_integer()) throw ValidationError("sweep.count entries must be integers");
                sw.count_values.push_back(v.get<int>());
            }
        }
        cfg.sweep = sw;
    }

    if (j.contains("shape")) cfg.smatrix_shape = parse_shape(j["shape"], "shape");
    return cfg;
}

Config load_config(const std::string& path) {
    return parse_config_text(read_file(path));
}

std::string scene_to_json(const SceneConfiguration& scene) {
    ojson j;
    j["omega"] = scene.wave.omega;
    j["lambda"] = scene.wave.lambda;
    j["mu"] = scene.wave.mu;
    j["n_term"] = scene.n_term;
    j["n_pts"] = scene.n_pts;
    j["gmres_tol"] = scene.gmres_tol;
    j["min_separation"] = scene.min_separation;
    j["seed"] = scene.seed;
    ojson inc;
    inc["kind"] = incident_kind_name(scene.incident.kind);
    if (scene.incident.kind == IncidentField::Kind::point_source)
        inc["source"] = {scene.incident.source(0), scene.incident.source(1)};
    else
        inc["direction"] = scene.incident.direction;
    j["incident"] = inc;
    ojson parts = ojson::array();
    for (const auto& p : scene.particles) {
        ojson pj;
        pj["center"] = {p.center(0), p.center(1)};
        pj["rotation"] = p.rotation;
        pj["shape"] = shape_to_json(p.shape);
        parts.push_back(pj);
    }
    j["particles"] = parts;
    return j.dump(2) + "\n";
}

std::string config_with_particles_json(const Config& cfg) {
    ojson j = ojson::parse(cfg.raw_json);
    j.erase("generate");
    j["seed"] = cfg.scene.seed;
    j["gmres_tol"] = cfg.scene.gmres_tol;
    ojson parts = ojson::array();
    for (const auto& p : cfg.scene.particles) {
        ojson pj;
        pj["center"] = {p.center(0), p.center(1)};
        pj["rotation"] = p.rotation;
        pj["shape"] = shape_to_json(p.shape);
        parts.push_back(pj);
    }
    j["particles"] = parts;
    return j.dump(2) + "\n";
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename " + tmp + " to " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return ss.str();
}

void write_scattering_matrix(const std::string& path, const ScatteringMatrix& S, int n_pts) {
    std::ostringstream out;
    int dim = 2 * (2 * S.n_term + 1);
    out << "ESCAT_SMATRIX 1\n";
    out << "n_term " << S.n_term << "\n";
    out << "n_pts " << n_pts << "\n";
    out << "omega " << format_g17(S.wave.omega) << "\n";
    out << "lambda " << format_g17(S.wave.lambda) << "\n";
    out << "mu " << format_g17(S.wave.mu) << "\n";
    out << "shape " << format_g17(S.shape.a) << " " << format_g17(S.shape.b) << " "
        << S.shape.c << "\n";
    out << "provenance " << S.provenance << "\n";
    out << "entries " << dim << " " << dim << "\n";
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            out << format_g17(S.entries(r, c).real()) << " "
                << format_g17(S.entries(r, c).imag()) << "\n";
    atomic_write(path, out.str());
}

std::pair<ScatteringMatrix, int> read_scattering_matrix(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "ESCAT_SMATRIX" || version != 1)
        throw IoError("not a scattering matrix file (or unsupported version): " + path);
    ScatteringMatrix S;
    int n_pts = 0, dim_r = 0, dim_c = 0;
    double omega = 0, lambda = 0, mu = 0;
    std::string key;
    auto expect = [&](const char* want) {
        in >> key;
        if (!in || key != want) throw IoError("malformed scattering matrix header in " + path);
    };
    expect("n_term"); in >> S.n_term;
    expect("n_pts"); in >> n_pts;
    std::string tok;
    expect("omega"); in >> tok; omega = parse_double_token(tok, path);
    expect("lambda"); in >> tok; lambda = parse_double_token(tok, path);
    expect("mu"); in >> tok; mu = parse_double_token(tok, path);
    expect("shape");
    in >> tok; S.shape.a = parse_double_token(tok, path);
    in >> tok; S.shape.b = parse_double_token(tok, path);
    in >> S.shape.c;
    expect("provenance"); in >> S.provenance;
    expect("entries"); in >> dim_r >> dim_c;
    if (!in) throw IoError("malformed scattering matrix header in " + path);
    int dim = 2 * (2 * S.n_term + 1);
    if (dim_r != dim || dim_c != dim)
        throw IoError("scattering matrix dimensions are inconsistent in " + path);
    S.wave = compute_wavenumbers(omega, lambda, mu);
    S.entries.resize(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            std::string re, im;
            in >> re >> im;
            if (!in) throw IoError("truncated scattering matrix entries in " + path);
            S.entries(r, c) = cplx(parse_double_token(re, path), parse_double_token(im, path));
        }
    }
    return {S, n_pts};
}

void write_solution(const std::string& path, const SceneConfiguration& cfg,
                    const SceneSolution& sol) {
    std::ostringstream out;
    out << "ESCAT_SOLUTION 1\n";
    out << "particles " << sol.outgoing.size() << "\n";
    out << "n_term " << cfg.n_term << "\n";
    out << "iterations " << sol.iterations << "\n";
    out << "residual " << format_g17(sol.residual) << "\n";
    for (const auto& e : sol.outgoing) {
        Eigen::VectorXcd v = e.flat();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out << format_g17(v(i).real()) << " " << format_g17(v(i).imag()) << "\n";
    }
    atomic_write(path, out.str());
}

SceneSolution read_solution(const std::string& path, int expect_particles) {
    std::istringstream in(read_file(path));
    std::string magic, key;
    int version = 0;
    in >> magic >> version;
    if (magic != "ESCAT_SOLUTION" || version != 1)
        throw IoError("not a solution file (or unsupported version): " + path);
    auto expect = [&](const char* want) {
        in >> key;
        if (!in || key != want) throw IoError("malformed solution header in " + path);
    };
    int particles = 0, n_term = 0;
    SceneSolution sol;
    expect("particles"); in >> particles;
    expect("n_term"); in >> n_term;
    expect("iterations"); in >> sol.iterations;
    std::string tok;
    expect("residual"); in >> tok;
    sol.residual = parse_double_token(tok, path);
    if (!in || particles < 1 || n_term < 0)
        throw IoError("malformed solution header in " + path);
    if (expect_particles >= 0 && particles != expect_particles)
        throw ValidationError("solution file particle count does not match the scene");
    int blk = 2 * (2 * n_term + 1);
    for (int m = 0; m < particles; ++m) {
        Eigen::VectorXcd v(blk);
        for (int i = 0; i < blk; ++i) {
            std::string re, im;
            in >> re >> im;
            if (!in) throw IoError("truncated solution entries in " + path);
            v(i) = cplx(parse_double_token(re, path), parse_double_token(im, path));
        }
        sol.outgoing.push_back(
            ExpansionCoefficients::unflatten(ExpansionKind::multipole, n_term, v));
    }
    return sol;
}

std::string manifest_to_json(const RunManifest& m) {
    ojson j;
    try {
        j["config"] = njson::parse(m.config_echo);
    } catch (...) {
        j["config"] = m.config_echo;
    }
    j["threads"] = m.threads;
    j["tol"] = m.tol;
    j["seed"] = m.seed;
    j["iterations"] = m.iterations;
    j["residual"] = m.residual;
    ojson t;
    t["assembly"] = m.t_assembly;
    t["smatrix"] = m.t_smatrix;
    t["solve"] = m.t_solve;
    t["field"] = m.t_field;
    j["timings_seconds"] = t;
    if (m.field_error)
        j["field_error"] = *m.field_error;
    else
        j["field_error"] = nullptr;
    j["artifacts"] = m.artifact_paths;
    return j.dump(2) + "\n";
}

void write_field_csv(const std::string& path, const FieldGrid& grid) {
    std::ostringstream out;
    out << "x,y,mask,re_u1,im_u1,re_u2,im_u2\n";
    for (size_t i = 0; i < grid.points.size(); ++i) {
        if (grid.mask[i]) continue;
        const Eigen::Vector2cd& u = grid.values[i];
        out << format_g17(grid.points[i](0)) << "," << format_g17(grid.points[i](1)) << ",0,"
            << format_g17(u(0).real()) << "," << format_g17(u(0).imag()) << ","
            << format_g17(u(1).real()) << "," << format_g17(u(1).imag()) << "\n";
    }
    atomic_write(path, out.str());
}

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "omega,count,n_term,n_pts,iterations,residual,t_smatrix,t_solve,field_error\n";
    for (const auto& r : rows) {
        out << format_g17(r.omega) << "," << r.count << "," << r.n_term << "," << r.n_pts << ","
            << r.iterations << "," << format_g17(r.residual) << "," << format_g17(r.t_smatrix)
            << "," << format_g17(r.t_solve) << ",";
        if (r.field_error) out << format_g17(*r.field_error);
        out << "\n";
    }
    atomic_write(path, out.str());
}

}  // namespace escat
