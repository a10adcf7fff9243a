#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "qcmap/demo.hpp"
#include "qcmap/io.hpp"

using namespace qc;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run qcmap(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
    const auto p = fs::temp_directory_path() / "qcmap_cli_test";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("solve") {
    const auto dir = scratch_dir();
    SUBCASE("zero mu gives the identity") {
        const auto prefix = (dir / "zero").string();
        const auto r = qcmap({"solve", "--mu", "demo:zero", "--n", "64", "--method", "neumann", "--out", prefix});
        CHECK(r.code == 0);
        const auto phi = read_cgrid(prefix + ".phi.cgrid");
        CHECK(phi.spec.n == 64);
        CHECK(sup_norm(phi - coordinate(phi.spec)) <= 1e-12);
        const auto rep = slurp(prefix + ".report.txt");
        CHECK(rep.find("summary checks=") != std::string::npos);
        CHECK(rep.find("pass=0") == std::string::npos);
    }
    SUBCASE("manufactured report carries the oracle error") {
        const auto prefix = (dir / "man").string();
        const auto r = qcmap({"solve", "--mu", "demo:manufactured:0.3", "--n", "128", "--method", "variational", "--out",
                              prefix});
        CHECK(r.code == 0);
        CHECK(r.out.find("variational.oracle_sup_error") != std::string::npos);
        CHECK(slurp(prefix + ".report.txt").find("oracle_sup_error") != std::string::npos);
    }
    SUBCASE("mu from a grid file") {
        const auto s = GridSpec::make(64, 2.0);
        const auto mufile = (dir / "mu.cgrid").string();
        write_cgrid(mufile, DemoMu::parse("radial_bump:0.5:1.0").sample(s));
        const auto prefix = (dir / "file").string();
        CHECK(qcmap({"solve", "--mu", mufile, "--out", prefix}).code == 0);
        CHECK(read_cgrid(prefix + ".phi.cgrid").spec.n == 64);
        // a conflicting grid size is a usage error
        CHECK(qcmap({"solve", "--mu", mufile, "--n", "128", "--out", prefix}).code == 2);
    }
    SUBCASE("usage and input errors") {
        const auto r = qcmap({"solve", "--mu", (dir / "missing.cgrid").string()});
        CHECK(r.code == 2);
        CHECK_FALSE(r.err.empty());
        CHECK(qcmap({"solve", "--mu", "demo:zero", "--method", "spectral"}).code == 2);
        CHECK(qcmap({"solve", "--mu", "demo:nonsense"}).code == 2);
        CHECK(qcmap({"solve", "--mu", "demo:radial_bump:1.5:1.0"}).code == 2);
        CHECK(qcmap({"solve", "--mu", "demo:zero", "--n", "-4"}).code == 2);
        CHECK(qcmap({"frobnicate"}).code == 2);
        CHECK(qcmap({}).code == 2);
    }
    SUBCASE("solver failure maps to 3") {
        const auto prefix = (dir / "fail").string();
        CHECK(qcmap({"solve", "--mu", "demo:radial_bump:0.9:1.0", "--n", "64", "--tol", "1e-300", "--out", prefix}).code == 3);
    }
}

TEST_CASE("verify") {
    const auto r = qcmap({"verify", "--mu", "demo:zero", "--n", "64", "--suite", "core"});
    CHECK(r.code == 0);
    std::istringstream is(r.out);
    std::string line;
    int checks = 0;
    while (std::getline(is, line)) {
        if (line.rfind("check ", 0) != 0) continue;
        ++checks;
        CHECK(line.find("pass=1") != std::string::npos);
        const auto m = line.find("measured=");
        const double v = std::stod(line.substr(m + 9));
        if (line.find("min_jacobian") == std::string::npos) CHECK(std::abs(v) <= 1e-12);
    }
    CHECK(checks > 5);
    CHECK(qcmap({"verify", "--suite", "full"}).code == 2);
    CHECK(qcmap({"verify", "--mu", "demo:zero", "--suite", "partial"}).code == 2);
}

TEST_CASE("map") {
    const auto dir = scratch_dir();
    const auto s = GridSpec::make(64, 2.0);

    SUBCASE("identity") {
        const auto phi = (dir / "id.cgrid").string();
        write_cgrid(phi, coordinate(s));
        const auto ppm = (dir / "id.ppm").string();
        const auto r = qcmap({"map", "--phi", phi, "--cells", "8", "--size", "64", "--out", ppm});
        CHECK(r.code == 0);
        const auto img = slurp(ppm);
        REQUIRE(img.rfind("P6\n64 64\n255\n", 0) == 0);
        CHECK(img.size() == std::string("P6\n64 64\n255\n").size() + 64 * 64 * 3);
        // two colours, switching every 8 pixels along a row in the middle of the picture
        const std::size_t head = std::string("P6\n64 64\n255\n").size();
        auto px = [&](int x, int y) { return img.substr(head + 3 * (std::size_t(y) * 64 + x), 3); };
        CHECK(px(3, 3) != px(11, 3));
        CHECK(px(3, 3) == px(19, 3));
        CHECK(px(3, 3) == px(11, 11));

        std::ifstream csv(ppm + ".csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header == "x,y,re_phi,im_phi");
        int rows = 0;
        for (std::string l; std::getline(csv, l);) rows += !l.empty();
        CHECK(rows == 64 * 64);
    }
    SUBCASE("reflection is flagged") {
        const auto phi = (dir / "bar.cgrid").string();
        write_cgrid(phi, ComplexField::sample(s, [](cplx z) { return std::conj(z); }));
        const auto ppm = (dir / "bar.ppm").string();
        const auto r = qcmap({"map", "--phi", phi, "--out", ppm});
        CHECK(r.code == 1);
        CHECK(r.out.find("orientation reversed") != std::string::npos);
        CHECK(r.err.find("orientation") != std::string::npos);
        CHECK(fs::exists(ppm));
    }
    SUBCASE("malformed grid file") {
        const auto bad = (dir / "bad.cgrid").string();
        std::ofstream(bad) << "cgrid v1 4 1.0\n1 2\n3\n";
        CHECK(qcmap({"map", "--phi", bad, "--out", (dir / "bad.ppm").string()}).code == 2);
        std::ofstream(bad) << "not a grid\n";
        CHECK(qcmap({"map", "--phi", bad, "--out", (dir / "bad.ppm").string()}).code == 2);
        CHECK(qcmap({"map", "--phi", (dir / "nothing.cgrid").string()}).code == 2);
    }
}

TEST_CASE("cgrid round trip is bit identical") {
    const auto s = GridSpec::make(32, 1.7);
    ComplexField f = DemoMu::parse("rotating_bump:0.7:1.3:0.1:-0.2").sample(s);
    f(3, 4) = cplx(1.0 / 3.0, -2.0e-300);
    f(5, 6) = cplx(6.02214076e23, std::nextafter(1.0, 2.0));
    std::stringstream ss;
    write_cgrid(ss, f);
    const auto g = read_cgrid(ss);
    CHECK(g.spec.n == f.spec.n);
    CHECK(g.spec.L == f.spec.L);
    for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(g.data[i] == f.data[i]);
}

TEST_CASE("demo names") {
    CHECK(DemoMu::parse("zero").kind == DemoMu::Kind::zero);
    const auto r = DemoMu::parse("radial_bump:0.5:1.0");
    CHECK(r.k == 0.5);
    CHECK(r.R == 1.0);
    const auto c = DemoMu::parse("rotating_bump:0.4:0.8:0.3:0.2");
    CHECK(c.centre == cplx(0.3, 0.2));
    CHECK(DemoMu::parse("manufactured:0.2").c == 0.2);
    for (const char* bad : {"", "radial_bump", "radial_bump:0.5", "radial_bump:x:1", "radial_bump:1.0:1.0",
                            "manufactured:0.3:1", "bump:0.5:1.0"})
        CHECK_THROWS_AS(DemoMu::parse(bad), Error);
    // generated fields respect |mu| <= k and vanish outside the bump
    const auto s = GridSpec::make(64, 2.0);
    const auto f = r.sample(s);
    CHECK(sup_norm(f) <= 0.5);
    CHECK(std::abs(f(0, 0)) == 0.0);
    CHECK(std::abs(f(32, 32)) > 0.49);
}
