#include "fraclap/cli_io.hpp"
#include "fraclap/error.hpp"

#include <doctest.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

using namespace fraclap;
namespace fs = std::filesystem;

namespace {

const std::string box_eig =
    R"({"domain":{"kind":"box","lengths":[3.141592653589793,3.141592653589793]},"basis":{"J":5}})";

const std::string example_nonlinear = R"({
  "domain": {"kind": "box", "lengths": [3.141592653589793, 3.141592653589793], "nodes_per_axis": 32},
  "basis": {"source": "analytic", "J": 16},
  "w": [[1.0, 0.0], [1.0, 0.5]],
  "problem": {"kind": "nonlinear",
              "nonlinearity": {"kind": "builtin_example", "A": 0.5, "b": 0.1},
              "optimizer": {"multi_start": 3}},
  "seed": 7
})";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fraclap_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string pointer_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.pointer();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("parse_config fills defaults") {
    const auto c = parse_config(box_eig);
    CHECK(c.domain.kind == DomainKind::box);
    CHECK(c.domain.nodes_per_axis == 64);
    CHECK(c.basis.source == BasisSource::analytic);
    CHECK(c.basis.J == 5);
    REQUIRE(c.w.size() == 1);
    CHECK(c.w[0].alpha == 1.0);
    CHECK(c.w[0].beta == 0.5);
    CHECK(c.seed == 0);
    CHECK_FALSE(c.problem.has_value());

    const auto p = parse_config(
        R"({"domain":{"kind":"polygon2d","vertices":[[0,0],[1,0],[0,1]],"h":0.1}})");
    CHECK(p.basis.source == BasisSource::discrete);
}

TEST_CASE("parse_config errors carry JSON pointers") {
    CHECK(pointer_of(R"({"domain":{"kind":"box","lengths":[1,1]},"w":[[1,0.5],[1,0.25]]})") == "/w/1/1");
    CHECK(pointer_of(R"({"domain":{"kind":"box","lengths":[1,1]},"w":[[0,0.5]]})") == "/w/0/0");
    CHECK(pointer_of(R"({"domain":{"kind":"box","lengths":[1,-1]}})") == "/domain/lengths/1");
    CHECK(pointer_of(R"({"domain":{"kind":"box","lengths":[1,1]},"colour":1})") == "/colour");
    CHECK(pointer_of(R"({"domain":{"kind":"box","lengths":[1,1],"extra":2}})") == "/domain/extra");
    CHECK(pointer_of(R"({"domain":{"kind":"disk"}})") == "/domain/kind");
    CHECK(pointer_of(R"({"domain":{"kind":"polygon2d","vertices":[[0,0],[1,0],[0,1]],"h":0.1},)"
                     R"("basis":{"source":"analytic"}})") == "/basis/source");
    CHECK(pointer_of(R"({"domain":{"kind":"box","lengths":[1]},"problem":{"kind":"linear"}})") == "/problem/g");
    CHECK(pointer_of("{not json") == "");

    try {
        parse_config(R"({"domain":{"kind":"box","lengths":[1,1]},"w":[[1,0.5],[1,0.25]]})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("strictly increasing") != std::string::npos);
        CHECK(std::string(e.kind()) == "config");
    }
}

TEST_CASE("config round trip is idempotent") {
    const auto once = serialize_config(parse_config(example_nonlinear));
    const auto twice = serialize_config(parse_config(once));
    CHECK(once == twice);
    const auto c = parse_config(once);
    CHECK(c.w.size() == 2);
    CHECK(c.problem->optimizer.multi_start == 3);
    CHECK(c.seed == 7);
}

TEST_CASE("format_double round trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-1.5e-300) == "-1.5e-300");
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 2000; ++i) {
        double v;
        const std::uint64_t b = bits(rng);
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v)) continue;
        const auto s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("run eig writes the spectrum") {
    const auto bundle = run(parse_config(box_eig), ProblemKind::eig);
    CHECK(bundle.exit_code == 0);
    REQUIRE(bundle.files.count("eigen.csv") == 1);
    const auto& csv = bundle.files.at("eigen.csv");
    CHECK(csv.rfind("j,lambda,mode_index,residual\n1,2,1;1,\n2,5,1;2,\n3,5,2;1,\n", 0) == 0);
    CHECK(bundle.files.count("manifest.json") == 1);
    CHECK(bundle.files.count("report.json") == 1);
}

TEST_CASE("run rejects a mismatched problem kind") {
    const auto c = parse_config(R"({"domain":{"kind":"box","lengths":[1]},"problem":{"kind":"verify"}})");
    CHECK_THROWS_AS(run(c, ProblemKind::eig), ConfigError);
}

TEST_CASE("run verify passes on a box") {
    const auto c = parse_config(
        R"({"domain":{"kind":"box","lengths":[3.141592653589793,2.0],"nodes_per_axis":32},"basis":{"J":12}})");
    const auto bundle = run(c, ProblemKind::verify);
    CHECK(bundle.exit_code == 0);
    CHECK(bundle.files.at("verify.txt").find("FAIL") == std::string::npos);
}

TEST_CASE("nonlinear runs are byte-identical") {
    const auto c = parse_config(example_nonlinear);
    const auto a = run(c, ProblemKind::nonlinear);
    const auto b = run(c, ProblemKind::nonlinear);
    CHECK(a.exit_code == 0);
    CHECK(a.files.size() == b.files.size());
    for (const auto& [name, contents] : a.files) CHECK(b.files.at(name) == contents);
    CHECK(a.report["solution"]["converged"] == true);

    const auto dir = scratch("bundle");
    write_bundle(a, dir);
    for (const auto& [name, contents] : a.files) CHECK(slurp(dir / name) == contents);
    for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().extension() != ".tmp");
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    for (const auto& [name, contents] : a.files) {
        if (name == "manifest.json") continue;
        CHECK(manifest["files"][name]["fnv1a64"] == fnv1a64_hex(contents));
    }
}

TEST_CASE("seed changes only the random starts") {
    auto c = parse_config(example_nonlinear);
    const auto a = run(c, ProblemKind::nonlinear);
    c.seed = 8;
    const auto b = run(c, ProblemKind::nonlinear);
    const double ea = a.report["solution"]["energy"], eb = b.report["solution"]["energy"];
    CHECK(ea == doctest::Approx(eb).epsilon(1e-8));
}

TEST_CASE("linear problem from a samples CSV") {
    const auto dir = scratch("csv");
    const std::string cfg_eig =
        R"({"domain":{"kind":"box","lengths":[1.0,1.0],"nodes_per_axis":16},"basis":{"J":10}})";
    const auto c = parse_config(cfg_eig);
    const Domain d = build_domain(c.domain);
    std::vector<double> g(d.node_count());
    for (std::size_t q = 0; q < g.size(); ++q) g[q] = 1.0 + d.node(q)[0];
    write_file_atomic(dir / "g.csv", samples_csv(d, g, "g"));

    const auto back = read_samples_csv(dir / "g.csv", d);
    REQUIRE(back.size() == 1);
    for (std::size_t q = 0; q < g.size(); ++q) CHECK(back[0][q] == g[q]);

    const auto lc = parse_config(
        R"({"domain":{"kind":"box","lengths":[1.0,1.0],"nodes_per_axis":16},"basis":{"J":10},)"
        R"("problem":{"kind":"linear","g":{"samples_csv":"g.csv"}}})");
    RunContext ctx;
    ctx.base_dir = dir;
    const auto bundle = run(lc, ProblemKind::linear, ctx);
    CHECK(bundle.exit_code == 0);
    CHECK(bundle.files.count("solution.csv") == 1);

    // Coordinates from another grid are rejected.
    const Domain other = build_domain(parse_config(
        R"({"domain":{"kind":"box","lengths":[2.0,1.0],"nodes_per_axis":16}})").domain);
    CHECK_THROWS(read_samples_csv(dir / "g.csv", other));
}

TEST_CASE("polynomial nonlinearity from a coefficients CSV") {
    const auto dir = scratch("poly");
    const auto c = parse_config(R"({"domain":{"kind":"box","lengths":[1.0,1.0],"nodes_per_axis":12}})");
    const Domain d = build_domain(c.domain);
    std::ostringstream csv;
    csv << "x1,x2,c0,c1,c2\n";
    for (std::size_t q = 0; q < d.node_count(); ++q) {
        csv << format_double(d.node(q)[0]) << ',' << format_double(d.node(q)[1]) << ",0.0,"
            << format_double(d.node(q)[0]) << ",0.1\n";
    }
    write_file_atomic(dir / "coef.csv", csv.str());
    const auto pc = parse_config(
        R"({"domain":{"kind":"box","lengths":[1.0,1.0],"nodes_per_axis":12},"basis":{"J":8},)"
        R"("problem":{"kind":"nonlinear","nonlinearity":{"kind":"polynomial","coefficients_csv":"coef.csv"}}})");
    RunContext ctx;
    ctx.base_dir = dir;
    const auto bundle = run(pc, ProblemKind::nonlinear, ctx);
    CHECK(bundle.exit_code == 0);
    CHECK(bundle.report["solution"]["converged"] == true);
}
