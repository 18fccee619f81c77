#include "glduality/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace glduality;
namespace cli = glduality::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("glduality_test_" + name);
    fs::remove_all(p);
    return p;
}

std::map<std::string, std::string> read_report(const fs::path &path) {
    std::map<std::string, std::string> kv;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

bool mentions(const cli::ConfigError &e, const std::string &needle) {
    for (const auto &p : e.problems)
        if (p.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("shipped configs") {
    const auto c = cli::load_config(fs::path(GLDUALITY_SOURCE_DIR) / "configs" / "paper_b008.ini");
    CHECK(c.model == cli::Model::GL3D);
    CHECK(c.B0 == 0.008);
    CHECK(c.params.gamma == 1.0);
    CHECK(c.params.alpha == 1.0);
    CHECK(c.params.beta == 1.0);
    CHECK(c.params.K0 == 1.0);
    CHECK(c.envelope == cli::Envelope::Bump);
    CHECK(c.sweep == std::vector<double>{0.008, 0.031});
    CHECK(cli::load_config(fs::path(GLDUALITY_SOURCE_DIR) / "configs" / "paper_b031.ini").B0 == 0.031);
    CHECK(cli::load_config(fs::path(GLDUALITY_SOURCE_DIR) / "configs" / "scalar_demo.ini").model ==
          cli::Model::Scalar1D);
}

TEST_CASE("config errors") {
    SUBCASE("empty file lacks a model") {
        try {
            cli::parse_config("");
            FAIL("expected an error");
        } catch (const cli::ConfigError &e) {
            CHECK(mentions(e, "run.model"));
        }
    }
    SUBCASE("every violation is reported with its line") {
        const std::string text = "[run]\nmodel = gl3d\ncolour = red\n[model]\ngamma = fast\nalpha = -1\n[grid]\n"
                                 "inner_cells = 8\nouter_cells = 9\n";
        try {
            cli::parse_config(text);
            FAIL("expected an error");
        } catch (const cli::ConfigError &e) {
            CHECK(mentions(e, "line 3: unknown key 'run.colour'"));
            CHECK(mentions(e, "line 5: model.gamma: expected a number"));
            CHECK(mentions(e, "alpha must be positive"));
            CHECK(mentions(e, "outer_cells"));
            CHECK(e.problems.size() == 4);
        }
    }
    SUBCASE("duplicates and bad selectors") {
        try {
            cli::parse_config("[run]\nmodel = gl3d\nmodel = scalar1d\n[field]\nenvelope = square\n");
            FAIL("expected an error");
        } catch (const cli::ConfigError &e) {
            CHECK(mentions(e, "line 3: 'run.model' already set on line 2"));
            CHECK(mentions(e, "line 5: field.envelope"));
        }
    }
}

TEST_CASE("config round trip") {
    cli::RunConfig c = cli::parse_config("[run]\nmodel = scalar2d\nseed = 42\n[model]\ngamma = 0.1\nrho = 1.7\n"
                                         "magnetic = gaussian\n[certify]\nK = 64\n[field]\nsweep = 0.1,0.2\n");
    c.params.line_shift = 7.0 / 3.0;
    c.start_amplitude = 0.1 + 0.2;
    const std::string text = cli::serialize_config(c);
    const cli::RunConfig again = cli::parse_config(text);
    CHECK(again == c);
    CHECK(cli::serialize_config(again) == text);
    CHECK_FALSE(again.auto_K);
    CHECK(again.params.K == 64.0);
}

TEST_CASE("envelopes") {
    CHECK(cli::bump_envelope(0.0, 0.0, 0.0) == doctest::Approx(27.0 / 512.0).epsilon(1e-15));
    CHECK(cli::bump_envelope(1.5, 0.3, -0.2) == 0.0);
    CHECK(cli::bump_envelope(0.1, -1.5, 0.2) == 0.0);
    CHECK(cli::bump_envelope(0.1, 0.2, 1.5) == 0.0);
    const BoxGrid g = BoxGrid::cube(3, -1.5, 1.5, 6);
    const auto bump = cli::builtin_envelope(cli::Envelope::Bump, g, 2.0);
    const int centre = g.index(3, 3, 3);
    CHECK(bump.values[0][centre] == doctest::Approx(2.0 * 27.0 / 512.0));
    CHECK(bump.values[1][centre] == bump.values[0][centre]);
    CHECK(bump.values[2].isZero());
    CHECK(cli::builtin_envelope(cli::Envelope::Zero, g, 2.0).stacked().isZero());
    CHECK((cli::builtin_envelope(cli::Envelope::Uniform, g, 2.0).values[0].array() == 2.0).all());
    CHECK_THROWS_AS(cli::parse_envelope("gauss"), std::invalid_argument);
}

TEST_CASE("slice and volume export") {
    const fs::path dir = scratch("export");
    fs::create_directories(dir);
    const BoxGrid g = BoxGrid::cube(3, -0.5, 0.5, 4);

    const auto constant = RealScalarField::constant(g, 0.7);
    cli::export_slice_csv(constant, 2, 0.0, dir / "c.csv");
    const auto rows = cli::read_slice_csv(dir / "c.csv");
    REQUIRE(rows.size() == 25);
    for (const auto &r : rows) CHECK(r.value == 0.7);
    CHECK(rows[1].x == g.coordinate(0, 1));
    CHECK(rows[5].y == g.coordinate(1, 1));

    RealScalarField field = RealScalarField::zeros(g);
    for (int q = 0; q < g.size(); ++q) field.values[q] = std::sin(1.0 + q) / 3.0;
    cli::export_slice_csv(field, 2, 0.26, dir / "f.csv");  // snaps to z = 0.25
    const auto back = cli::read_slice_csv(dir / "f.csv");
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) CHECK(back[5 * j + i].value == field.values[g.index(i, j, 3)]);

    cli::export_vtk(field, "f", dir / "f.vtk");
    std::ifstream in(dir / "f.vtk");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("DIMENSIONS 5 5 5") != std::string::npos);
    CHECK(ss.str().find("POINT_DATA 125") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("commands") {
    SUBCASE("uniform state exports beta") {
        const fs::path dir = scratch("uniform");
        cli::RunConfig c = cli::parse_config("[run]\nmodel = gl3d\n[grid]\ninner_cells = 4\nouter_cells = 8\n"
                                             "[model]\nbeta = 0.6\n[field]\nB0 = 0\n");
        c.out = dir.string();
        c.command = cli::Command::Export;
        std::ostringstream summary;
        CHECK(cli::run_command(c, summary) == cli::Success);
        for (const auto &r : cli::read_slice_csv(dir / "phi2_z0.csv")) CHECK(r.value == doctest::Approx(0.6));
        CHECK(fs::exists(dir / "phi2.vtk"));
        CHECK(fs::exists(dir / "A.vtk"));
        CHECK(read_report(dir / "report.txt").at("termination") == "tolerance-met");
        fs::remove_all(dir);
    }
    SUBCASE("scalar certificate") {
        const fs::path dir = scratch("scalar");
        cli::RunConfig c = cli::load_config(fs::path(GLDUALITY_SOURCE_DIR) / "configs" / "scalar_demo.ini");
        c.out = dir.string();
        c.command = cli::Command::Certify;
        std::ostringstream summary;
        CHECK(cli::run_command(c, summary) == cli::Success);
        const auto kv = read_report(dir / "report.txt");
        CHECK(std::stod(kv.at("certificate.gap")) <= 1e-8);
        CHECK(kv.at("certificate.K") == "32");

        c.residual_tol = 1e-30;
        CHECK(cli::run_command(c, summary) == cli::CertificatePrecondition);
        CHECK(read_report(dir / "report.txt").count("certificate.error") == 1);
        fs::remove_all(dir);
    }
    SUBCASE("iteration cap reports non-convergence") {
        const fs::path dir = scratch("cap");
        cli::RunConfig c = cli::parse_config("[run]\nmodel = gl3d\n[grid]\ninner_cells = 4\nouter_cells = 8\n"
                                             "[field]\nB0 = 0.5\n[solver]\nmax_outer = 1\nouter_tol = 1e-14\n");
        c.out = dir.string();
        std::ostringstream summary;
        CHECK(cli::run_command(c, summary) == cli::NotConverged);
        CHECK(summary.str().find("max-iters") != std::string::npos);
        fs::remove_all(dir);
    }
    SUBCASE("sweep writes a table and per-run directories") {
        const fs::path dir = scratch("sweep");
        cli::RunConfig c = cli::parse_config("[run]\nmodel = gl3d\ncommand = sweep\n[grid]\ninner_cells = 4\n"
                                             "outer_cells = 8\n[field]\nsweep = 0.01,0.05\n");
        c.out = dir.string();
        std::ostringstream summary;
        CHECK(cli::run_command(c, summary) == cli::Success);
        CHECK(fs::exists(dir / "sweep.csv"));
        CHECK(fs::exists(dir / "B0_0.01" / "phi2_z0.csv"));
        CHECK(fs::exists(dir / "B0_0.05" / "report.txt"));
        fs::remove_all(dir);
    }
}
