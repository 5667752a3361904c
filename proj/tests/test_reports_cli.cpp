#include <catch2/catch_amalgamated.hpp>

#include <granpack/geometry.hpp>
#include <granpack/json_io.hpp>
#include <granpack/packing.hpp>
#include <granpack/pipeline.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace granpack;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string output;
};

// Runs the installed binary with stdout and stderr merged into one capture.
CmdResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path cap = fs::temp_directory_path()
        / ("granpack_cli_out_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    const std::string cmd = std::string(GRANPACK_CLI_PATH) + " " + args + " > '" + cap.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    CmdResult r;
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    std::ifstream in(cap);
    std::ostringstream buf;
    buf << in.rdbuf();
    r.output = buf.str();
    fs::remove(cap);
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.is_open());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path()
        / ("granpack_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

const std::string kCurve = std::string(GRANPACK_DATA_DIR) + "/sample1.csv";
const std::string kFixtures = GRANPACK_FIXTURE_DIR;
const std::string kGolden = GRANPACK_GOLDEN_DIR;

}  // namespace

TEST_CASE("run is byte-identical across reruns and output directories") {
    const auto d1 = fresh_dir("rerun_a");
    const auto d2 = fresh_dir("rerun_b");
    const std::string shared =
        " --curve '" + kCurve + "' --porosity 0.5 --domain 8x8 --k 400 --seed 19 --out '";
    const auto r1 = run_cli("run" + shared + d1.string() + "'");
    const auto r2 = run_cli("run" + shared + d2.string() + "'");
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    for (const char* name :
         {"fit_report.json", "fit.svg", "packing.csv", "packing_report.json", "packing.svg"}) {
        INFO(name);
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("CLI input errors exit with code 2") {
    SECTION("missing curve file") {
        const auto r = run_cli("fit --curve /nonexistent/nowhere.csv --out /tmp");
        CHECK(r.exit_code == 2);
    }
    SECTION("malformed domain spec") {
        const auto r = run_cli("pack --fit-report '" + kFixtures
                               + "/small_model_fit.json' --porosity 0.5 --domain 10by10 --out /tmp");
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("WIDTHxHEIGHT") != std::string::npos);
    }
    SECTION("porosity out of range") {
        const auto r = run_cli("pack --fit-report '" + kFixtures
                               + "/small_model_fit.json' --porosity 1.5 --domain 10x10 --out /tmp");
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("unplaceable first radius exits with code 3") {
    const auto d = fresh_dir("firstfail");
    const auto r = run_cli("pack --fit-report '" + kFixtures
                           + "/oversized_model_fit.json' --porosity 0.5 --domain 1x1 --jmax 200"
                             " --seed 3 --out '" + d.string() + "'");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("FAIL") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("report output matches the golden rendering") {
    const auto r = run_cli("report --fit-report '" + kFixtures + "/small_model_fit.json'"
                           + " --pack-report '" + kFixtures + "/small_pack_report.json'");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output == slurp(fs::path(kGolden) / "report_small.txt"));
}

TEST_CASE("fit restricted to one family chooses it") {
    const auto d = fresh_dir("onefamily");
    const auto r = run_cli("fit --curve '" + kCurve + "' --k 400 --families gamma --seed 11 --out '"
                           + d.string() + "'");
    REQUIRE(r.exit_code == 0);
    const auto rep = load_fit_report((d / "fit_report.json").string());
    CHECK(rep.candidates.size() == 1);
    CHECK(rep.chosen == "gamma");
    fs::remove_all(d);
}

TEST_CASE("a candidate whose GOF numerics fail is excluded, not fatal") {
    // Linear-space fitting of this curve drives the hyperbolic MLE into a
    // corner where its numerical CDF cannot bracket the tail. That candidate
    // must drop out as non-converged while the healthy families still rank.
    const auto d = fresh_dir("gofdrop");
    const auto r = run_cli("fit --curve '" + kCurve + "' --fit-space linear --seed 0 --out '"
                           + d.string() + "'");
    REQUIRE(r.exit_code == 0);
    const auto rep = load_fit_report((d / "fit_report.json").string());
    REQUIRE(rep.candidates.size() == 4);
    int healthy = 0;
    for (const auto& c : rep.candidates) {
        if (family_name(c.model) == std::string("hyperbolic"))
            CHECK_FALSE(c.converged);
        else if (c.converged)
            ++healthy;
    }
    CHECK(healthy == 3);
    CHECK(rep.chosen != "hyperbolic");
    fs::remove_all(d);
}

TEST_CASE("CLI-written fit report round-trips through the schema byte-for-byte") {
    const auto d = fresh_dir("roundtrip");
    const auto r = run_cli("fit --curve '" + kCurve + "' --k 400 --seed 23 --out '" + d.string() + "'");
    REQUIRE(r.exit_code == 0);
    const auto raw = slurp(d / "fit_report.json");
    const auto parsed = fit_report_from_json(nlohmann::json::parse(raw));
    CHECK(fit_report_to_json(parsed).dump(2) + "\n" == raw);
    fs::remove_all(d);
}

TEST_CASE("pack into a polygon keeps every disk inside it") {
    const auto d = fresh_dir("polypack");
    const fs::path poly = d / "triangle.csv";
    {
        std::ofstream out(poly);
        out << "x_mm,y_mm\n0,0\n40,0\n0,30\n";
    }
    const auto r = run_cli("pack --fit-report '" + kFixtures
                           + "/small_model_fit.json' --porosity 0.62 --polygon '" + poly.string()
                           + "' --seed 5 --out '" + d.string() + "'");
    REQUIRE(r.exit_code == 0);

    const auto rep = load_pack_report((d / "packing_report.json").string());
    CHECK_FALSE(rep.domain.is_rectangle());
    CHECK(rep.domain.area() == Catch::Approx(600.0));
    CHECK(rep.model_ref == kFixtures + "/small_model_fit.json");

    std::ifstream csv(d / "packing.csv");
    const auto placed = read_packing_csv(csv);
    REQUIRE(placed.size() == static_cast<size_t>(rep.particle_count));
    REQUIRE(placed.size() > 100);
    const auto w = Domain::polygon({{0, 0}, {40, 0}, {0, 30}});
    for (const auto& p : placed) REQUIRE(w.contains_disk(p.x, p.y, p.r));
    fs::remove_all(d);
}
