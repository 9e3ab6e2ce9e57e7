#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "escat/generate.hpp"
#include "escat/io.hpp"
#include "escat/mie.hpp"
#include "escat/smatrix.hpp"

using namespace escat;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path DIR = "cli_tmp";

void put(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    fs::create_directories(DIR);
    std::string cmd = std::string(ESCAT_BIN) + " " + args + " > " +
                      (DIR / "stdout.txt").string() + " 2> " + (DIR / "stderr.txt").string();
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

json base_config() {
    json cfg;
    cfg["omega"] = PI;
    cfg["lambda"] = 3.88;
    cfg["mu"] = 2.56;
    cfg["n_term"] = 6;
    cfg["n_pts"] = 64;
    cfg["incident"] = {{"kind", "plane"}, {"direction", 0.3}};
    cfg["particles"] = json::array();
    for (int i = 0; i < 3; ++i) {
        json p;
        p["center"] = {2.2 * i, 0.4 * i};
        p["rotation"] = 0.5 * i;
        p["shape"] = {{"a", 0.5}, {"b", 0.1}, {"c", 3 + 2 * (i % 2)}};
        cfg["particles"].push_back(p);
    }
    return cfg;
}

}  // namespace

TEST_CASE("cli generate is deterministic under the seed") {
    fs::create_directories(DIR);
    json cfg;
    cfg["omega"] = PI;
    cfg["lambda"] = 3.88;
    cfg["mu"] = 2.56;
    cfg["seed"] = 11;
    cfg["generate"] = {
        {"count", 8},
        {"box", {0.0, 0.0, 10.0, 10.0}},
        {"shapes", {{{"a", 0.4}, {"b", 0.1}, {"c", 3}}}},
        {"random_rotations", true},
    };
    put(DIR / "gen.json", cfg.dump());

    std::string c = " generate --config " + (DIR / "gen.json").string();
    CHECK(run_cli(c + " --output " + (DIR / "s1.json").string()) == 0);
    CHECK(run_cli(c + " --output " + (DIR / "s2.json").string()) == 0);
    CHECK(run_cli(c + " --output " + (DIR / "s3.json").string() + " --seed 12") == 0);
    std::string s1 = slurp(DIR / "s1.json"), s2 = slurp(DIR / "s2.json"),
                s3 = slurp(DIR / "s3.json");
    REQUIRE(!s1.empty());
    CHECK(s1 == s2);
    CHECK(s1 != s3);
    json scene = json::parse(s3);
    CHECK(scene["seed"] == 12);
    REQUIRE(scene["particles"].size() == 8);

    Config round = parse_config_text(s1);
    CHECK(round.scene.particles.size() == 8);
}

TEST_CASE("cli smatrix writes a disk matrix that matches the analytic one") {
    fs::create_directories(DIR);
    json cfg;
    cfg["omega"] = PI;
    cfg["lambda"] = 3.88;
    cfg["mu"] = 2.56;
    cfg["n_term"] = 6;
    cfg["n_pts"] = 96;
    cfg["shape"] = {{"a", 1.0}};
    put(DIR / "sm.json", cfg.dump());

    fs::path out = DIR / "disk.smat";
    CHECK(run_cli("smatrix --config " + (DIR / "sm.json").string() + " --output " +
                  out.string()) == 0);
    auto [S, n_pts] = read_scattering_matrix(out.string());
    CHECK(n_pts == 96);
    CHECK(S.n_term == 6);
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    ScatteringMatrix exact = disk_scattering_matrix(6, 1.0, w);
    CHECK((S.entries - exact.entries).cwiseAbs().maxCoeff() < 1e-8);

    fs::path copy = DIR / "disk_copy.smat";
    write_scattering_matrix(copy.string(), S, n_pts);
    auto [S2, n2] = read_scattering_matrix(copy.string());
    CHECK((S.entries - S2.entries).cwiseAbs().maxCoeff() == 0.0);
    CHECK(S2.wave.omega == S.wave.omega);
    CHECK(S2.shape.a == S.shape.a);
}

TEST_CASE("cli solve writes identical artifacts when rerun") {
    fs::create_directories(DIR);
    put(DIR / "scene.json", base_config().dump());
    std::string c = "solve --config " + (DIR / "scene.json").string();
    CHECK(run_cli(c + " --output " + (DIR / "a.sol").string()) == 0);
    CHECK(run_cli(c + " --output " + (DIR / "b.sol").string()) == 0);
    std::string a = slurp(DIR / "a.sol"), b = slurp(DIR / "b.sol");
    REQUIRE(!a.empty());
    CHECK(a == b);

    SceneSolution sol = read_solution((DIR / "a.sol").string(), 3);
    CHECK(sol.iterations >= 1);
    CHECK(sol.residual <= 1e-9);
    REQUIRE(sol.outgoing.size() == 3);

    json man = json::parse(slurp(DIR / "a.sol.manifest.json"));
    CHECK(man["iterations"] == sol.iterations);
    CHECK(man["seed"].is_number());
    CHECK(man["timings_seconds"]["solve"].is_number());
    CHECK(man["field_error"].is_null());
}

TEST_CASE("cli field evaluates the grid written by solve") {
    fs::create_directories(DIR);
    json cfg = base_config();
    cfg["grid"] = {{"xmin", 6.0}, {"xmax", 7.0}, {"ymin", -1.0}, {"ymax", 0.0},
                   {"nx", 2},     {"ny", 2}};
    put(DIR / "field.json", cfg.dump());
    std::string sol_path = (DIR / "f.sol").string();
    REQUIRE(run_cli("solve --config " + (DIR / "field.json").string() + " --output " +
                    sol_path) == 0);
    fs::path csv = DIR / "field.csv";
    CHECK(run_cli("field --config " + (DIR / "field.json").string() + " --solution " +
                  sol_path + " --output " + csv.string()) == 0);

    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,y,mask,re_u1,im_u1,re_u2,im_u2");
    Config parsed = load_config((DIR / "field.json").string());
    SceneSolution sol = read_solution(sol_path, 3);
    FieldGrid want = evaluate_grid(parsed.scene, sol, *parsed.grid);
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        double x, y, re1, im1, re2, im2;
        int mask;
        char comma;
        ss >> x >> comma >> y >> comma >> mask >> comma >> re1 >> comma >> im1 >> comma >>
            re2 >> comma >> im2;
        REQUIRE(rows < static_cast<int>(want.points.size()));
        CHECK(mask == 0);
        CHECK(x == doctest::Approx(want.points[rows].x()));
        CHECK(std::abs(cplx(re1, im1) - want.values[rows](0)) < 1e-13);
        CHECK(std::abs(cplx(re2, im2) - want.values[rows](1)) < 1e-13);
        ++rows;
    }
    CHECK(rows == 4);

    json masked = cfg;
    masked["grid"] = {{"xmin", -0.1}, {"xmax", 0.1}, {"ymin", -0.1}, {"ymax", 0.1},
                      {"nx", 2},      {"ny", 2}};
    put(DIR / "masked.json", masked.dump());
    fs::path mcsv = DIR / "masked.csv";
    CHECK(run_cli("field --config " + (DIR / "masked.json").string() + " --solution " +
                  sol_path + " --output " + mcsv.string()) == 0);
    std::string mtext = slurp(mcsv);
    CHECK(mtext == "x,y,mask,re_u1,im_u1,re_u2,im_u2\n");
}

TEST_CASE("cli exit codes follow the error taxonomy") {
    fs::create_directories(DIR);
    json bad = base_config();
    bad["surprise"] = 1;
    put(DIR / "bad.json", bad.dump());
    CHECK(run_cli("solve --config " + (DIR / "bad.json").string() + " --output " +
                  (DIR / "x.sol").string()) == 1);

    CHECK(run_cli("solve --output " + (DIR / "x.sol").string()) == 1);
    CHECK(run_cli("") == 1);
    CHECK(run_cli("solve --config " + (DIR / "missing.json").string() + " --output " +
                  (DIR / "x.sol").string()) == 3);

    // micro-scale disks with a large truncation order push the translation
    // tables past double range, so the iteration never reaches tolerance
    json hard = base_config();
    hard["n_term"] = 24;
    hard["n_pts"] = 32;
    hard["particles"] = json::array();
    hard["particles"].push_back(
        {{"shape", {{"a", 1e-6}, {"b", 0.0}, {"c", 3}}}, {"center", {0.0, 0.0}}});
    hard["particles"].push_back(
        {{"shape", {{"a", 1e-6}, {"b", 0.0}, {"c", 3}}}, {"center", {3e-6, 0.0}}});
    put(DIR / "hard.json", hard.dump());
    CHECK(run_cli("solve --config " + (DIR / "hard.json").string() + " --output " +
                  (DIR / "x.sol").string()) == 2);

    json overlap = base_config();
    overlap["particles"][1]["center"] = {0.1, 0.0};
    put(DIR / "overlap.json", overlap.dump());
    CHECK(run_cli("solve --config " + (DIR / "overlap.json").string() + " --output " +
                  (DIR / "x.sol").string()) == 1);
}

TEST_CASE("cli verify runs the smoke suite") {
    CHECK(run_cli("verify smoke") == 0);
    std::string out = slurp(DIR / "stdout.txt");
    CHECK(out.find("PASS") != std::string::npos);
    CHECK(out.find("FAIL") == std::string::npos);
    CHECK(run_cli("verify nosuchsuite") == 1);
}

TEST_CASE("cli bench writes one row per sweep cell") {
    fs::create_directories(DIR);
    json cfg = base_config();
    cfg["sweep"] = {{"omega", {PI, 2.0 * PI}}};
    put(DIR / "bench.json", cfg.dump());
    fs::path csv = DIR / "bench.csv";
    CHECK(run_cli("bench --config " + (DIR / "bench.json").string() + " --output " +
                  csv.string()) == 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "omega,count,n_term,n_pts,iterations,residual,t_smatrix,t_solve,field_error");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}
