#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <ostream>

#include "qcmap/demo.hpp"
#include "qcmap/io.hpp"
#include "qcmap/neumann.hpp"
#include "qcmap/variational.hpp"
#include "qcmap/verify.hpp"

namespace qc::cli {
namespace {

struct MuSource {
    bool is_demo = false;
    DemoMu demo;
    ComplexField field;
};

MuSource load_mu(const std::string& text) {
    MuSource m;
    if (text.rfind("demo:", 0) == 0) {
        m.is_demo = true;
        m.demo = DemoMu::parse(text.substr(5));
    } else {
        m.field = read_cgrid(text);
    }
    return m;
}

GridSpec grid_for(const MuSource& m, int n, double L, bool n_set, bool L_set) {
    if (m.is_demo) return GridSpec::make(n, L);
    const GridSpec& s = m.field.spec;
    if ((n_set && n != s.n) || (L_set && L != s.L))
        throw Error(ErrorCode::Usage, "--n/--L disagree with the grid of the mu file");
    return s;
}

int exit_for(ErrorCode c) {
    switch (c) {
    case ErrorCode::NoConvergence:
    case ErrorCode::NonPositiveJacobian:
    case ErrorCode::DegenerateNormalization:
    case ErrorCode::DegenerateDerivative:
    case ErrorCode::NotClosed:
    case ErrorCode::NonFinite:
    case ErrorCode::PreconditionResidualTooLarge:
        return numerical;
    default:
        return usage;
    }
}

int cmd_solve(const std::string& mu_arg, int n, double L, bool n_set, bool L_set, const std::string& method,
              double tol, const std::string& prefix, std::ostream& out) {
    const MuSource src = load_mu(mu_arg);
    const GridSpec s = grid_for(src, n, L, n_set, L_set);
    const auto mu = BeltramiCoefficient::make(src.is_demo ? src.demo.sample(s) : src.field);

    QCMapSolution sol;
    VerifyReport rep;
    if (method == "neumann") {
        auto r = solve_neumann(mu, {}, tol);
        sol = std::move(r.sol);
        rep.add("neumann.fixed_point_residual", r.report.fixed_point_residual, 2 * tol, Compare::le, s);
    } else {
        VariationalOptions vo;
        vo.tol = tol;
        sol = solve_variational(mu, vo);
        rep.add("variational.weak_residual", sol.solver_residual, tol, Compare::le, s);
    }
    append_solution_checks(rep, method, sol, mu.mu, Thresholds{}, src.is_demo ? &src.demo : nullptr);
    const auto nsol = normalize(sol);

    write_cgrid(prefix + ".phi.cgrid", nsol.phi);
    std::ofstream rf(prefix + ".report.txt");
    if (!rf) throw Error(ErrorCode::Io, "cannot write " + prefix + ".report.txt");
    rf << "solve mu=" << mu_arg << " n=" << s.n << " L=" << s.L << " method=" << sol.method
       << " iterations=" << sol.iterations << " solver_residual=" << sol.solver_residual << " k=" << mu.k << '\n';
    rf << rep.to_text();
    out << rep.to_text();
    return rep.all_pass() ? pass : check_fail;
}

int cmd_verify(const std::string& mu_arg, int n, double L, bool n_set, bool L_set, const std::string& suite,
               double tol, std::ostream& out) {
    const MuSource src = load_mu(mu_arg);
    SuiteOptions opt;
    const GridSpec s = grid_for(src, n, L, n_set, L_set);
    opt.n = s.n;
    opt.L = s.L;
    opt.tol = tol;
    opt.full = suite == "full";
    opt.use_demo = src.is_demo;
    opt.demo = src.demo;
    if (!src.is_demo) opt.mu_field = src.field;
    const auto rep = run_suite(opt);
    out << rep.to_text();
    return rep.all_pass() ? pass : check_fail;
}

struct Rgb {
    std::uint8_t r, g, b;
};

int cmd_map(const std::string& phi_path, int cells, int size, const std::string& out_path, std::ostream& out,
            std::ostream& err) {
    const ComplexField phi = read_cgrid(phi_path);
    const GridSpec& s = phi.spec;

    // orientation from the sign of the Jacobian
    const auto pz = wirtinger_dz(phi), pzb = wirtinger_dzbar(phi);
    double min_J = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < phi.size(); ++i)
        min_J = std::min(min_J, std::norm(pz.data[i]) - std::norm(pzb.data[i]));

    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& w : phi.data) {
        x0 = std::min(x0, w.real());
        x1 = std::max(x1, w.real());
        y0 = std::min(y0, w.imag());
        y1 = std::max(y1, w.imag());
    }
    const double span = std::max({x1 - x0, y1 - y0, 1e-300});
    const double scale = (size - 1) / span;

    const Rgb dark{40, 40, 60}, light{235, 225, 200}, empty{0, 0, 0};
    std::vector<Rgb> img(std::size_t(size) * size, empty);
    std::vector<char> set(img.size(), 0);
    const double cell = 2.0 * s.L / cells;
    constexpr int sub = 2; // bilinear subsamples per grid spacing
    for (int k = 0; k < (s.n - 1) * sub + 1; ++k)
        for (int j = 0; j < (s.n - 1) * sub + 1; ++j) {
            const cplx z = s.z(0, 0) + cplx(j * s.h() / sub, k * s.h() / sub);
            const cplx w = interpolate(phi, z);
            const int px = int(std::lround((w.real() - x0) * scale));
            const int py = int(std::lround((y1 - w.imag()) * scale));
            if (px < 0 || py < 0 || px >= size || py >= size) continue;
            const long a = long(std::floor((z.real() + s.L) / cell)) + long(std::floor((z.imag() + s.L) / cell));
            img[std::size_t(py) * size + px] = (a & 1) ? dark : light;
            set[std::size_t(py) * size + px] = 1;
        }

    // nearest-neighbour fill of holes, breadth first from splatted pixels
    std::deque<int> queue;
    for (int i = 0; i < size * size; ++i)
        if (set[i]) queue.push_back(i);
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        const int px = i % size, py = i / size;
        const int nb[4][2] = {{px + 1, py}, {px - 1, py}, {px, py + 1}, {px, py - 1}};
        for (const auto& q : nb) {
            if (q[0] < 0 || q[1] < 0 || q[0] >= size || q[1] >= size) continue;
            const int t = q[1] * size + q[0];
            if (set[t]) continue;
            set[t] = 1;
            img[t] = img[i];
            queue.push_back(t);
        }
    }

    std::ofstream ppm(out_path, std::ios::binary);
    if (!ppm) throw Error(ErrorCode::Io, "cannot write " + out_path);
    ppm << "P6\n" << size << ' ' << size << "\n255\n";
    ppm.write(reinterpret_cast<const char*>(img.data()), std::streamsize(img.size() * 3));

    std::ofstream csv(out_path + ".csv");
    if (!csv) throw Error(ErrorCode::Io, "cannot write " + out_path + ".csv");
    csv << "x,y,re_phi,im_phi\n";
    csv.precision(17);
    for (int k = 0; k < s.n; ++k)
        for (int j = 0; j < s.n; ++j) {
            const cplx z = s.z(j, k), w = phi(j, k);
            csv << z.real() << ',' << z.imag() << ',' << w.real() << ',' << w.imag() << '\n';
        }

    out << "map n=" << s.n << " L=" << s.L << " cells=" << cells << " size=" << size << " min_jacobian=" << min_J
        << '\n';
    if (min_J < 0.0) {
        err << "warning: orientation reversal, Jacobian negative somewhere (min " << min_J << ")\n";
        out << "orientation reversed\n";
        return check_fail;
    }
    return pass;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qcmap: quasiconformal maps from a Beltrami coefficient"};
    app.require_subcommand(1);

    std::string mu_arg, method = "neumann", prefix = "qcmap", suite = "core", phi_path, map_out = "map.ppm";
    int n = 128, cells = 16, size = 512;
    double L = 2.0, tol = 1e-10;

    auto* solve = app.add_subcommand("solve", "solve the Beltrami equation and write Phi plus a report");
    solve->add_option("--mu", mu_arg, "cgrid file or demo:<name>")->required();
    auto* sn = solve->add_option("--n", n, "grid points per side");
    auto* sL = solve->add_option("--L", L, "half width of the box");
    solve->add_option("--method", method)->check(CLI::IsMember({"neumann", "variational"}));
    solve->add_option("--tol", tol);
    solve->add_option("--out", prefix, "output prefix");

    auto* verify = app.add_subcommand("verify", "run the verification battery");
    verify->add_option("--mu", mu_arg, "cgrid file or demo:<name>")->required();
    auto* vn = verify->add_option("--n", n);
    auto* vL = verify->add_option("--L", L);
    verify->add_option("--suite", suite)->check(CLI::IsMember({"core", "full"}));
    verify->add_option("--tol", tol);

    auto* map = app.add_subcommand("map", "render a checkerboard pushforward of Phi");
    map->add_option("--phi", phi_path)->required();
    map->add_option("--cells", cells)->check(CLI::PositiveNumber);
    map->add_option("--size", size, "image side in pixels")->check(CLI::Range(8, 8192));
    map->add_option("--out", map_out);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return pass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }

    try {
        if (*solve) return cmd_solve(mu_arg, n, L, bool(*sn), bool(*sL), method, tol, prefix, out);
        if (*verify) return cmd_verify(mu_arg, n, L, bool(*vn), bool(*vL), suite, tol, out);
        return cmd_map(phi_path, cells, size, map_out, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return numerical;
    }
}

} // namespace qc::cli
