#include "run_config.hpp"

#include "pcs/dressed_states.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace pcs;
using namespace pcs::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Common {
    std::string config;
    std::string out = ".";
    int threads = -1;
    std::string delta_range;
    int k_order = -1;
    int fock_cutoff = -1;
};

RunConfig load(const Common& c)
{
    RunConfig rc = c.config.empty() ? resolve(ConfigFile::parse("", "<defaults>"))
                                    : resolve(ConfigFile::load(c.config));
    if (c.threads >= 0)
        rc.scan.threads = c.threads;
    if (!c.delta_range.empty())
        rc.scan.grid = parse_delta_range(c.delta_range);
    if (c.k_order >= 0) {
        rc.scan.bloch_order = c.k_order;
        rc.scan.solver.max_order = std::max(rc.scan.solver.max_order, c.k_order);
    }
    if (c.fock_cutoff >= 0)
        rc.scan.fock_cutoff = c.fock_cutoff;
    try {
        rc.scan.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return rc;
}

fs::path output_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path p(dir);
    const auto probe = p / ".pcs-write-test";
    std::ofstream f(probe);
    if (ec || !f)
        throw ConfigError("output directory '" + dir + "' is not writable");
    f.close();
    fs::remove(probe, ec);
    return p;
}

// every CSV starts with the resolved configuration as comment lines
void write_header(std::ostream& o, const RunConfig& rc, const std::string& sub)
{
    o << "# pcs " << kVersion << " " << sub << "\n";
    std::istringstream in(echo(rc));
    for (std::string line; std::getline(in, line);)
        o << "# " << line << "\n";
}

std::string timestamp()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json manifest(const RunConfig& rc, const std::string& sub, const std::string& config_path)
{
    return {{"tool", "pcs"},
            {"version", kVersion},
            {"subcommand", sub},
            {"config_path", config_path},
            {"deterministic", true},
            {"timestamp", timestamp()},
            {"config", echo(rc)}};
}

json peaks_json(const std::vector<Peak>& peaks)
{
    json a = json::array();
    for (const auto& p : peaks)
        a.push_back({{"delta_tilde", p.delta_tilde},
                     {"height", p.height},
                     {"prominence", p.prominence},
                     {"index", p.index}});
    return a;
}

json result_json(const SpectrumResult& r, const RunConfig& rc)
{
    json j;
    j["distribution"] = {{"kind", to_string(rc.scan.distribution.kind)},
                         {"g_max", rc.scan.distribution.g_max},
                         {"F", rc.scan.distribution.F},
                         {"nodes", rc.scan.distribution.nodes},
                         {"weights", rc.scan.distribution.weights},
                         {"note", rc.scan.distribution.note},
                         {"model_note", "beam geometry (waist, mask) is a modelling choice"}};
    j["grid"] = {{"points", r.delta_tilde.size()},
                 {"one_atom_nodes", r.nodes_one},
                 {"two_atom_nodes", r.nodes_two}};
    j["peaks"] = {{"two_atom", peaks_json(r.peaks_two)}, {"mixed", peaks_json(r.peaks_mixed)}};
    json gaps = json::array();
    for (auto i : r.gaps)
        gaps.push_back(r.delta_tilde[i]);
    j["gaps"] = gaps;
    json fails = json::array();
    for (const auto& f : r.failures)
        fails.push_back({{"atoms", f.atoms},
                         {"node", f.node},
                         {"g1", f.g1},
                         {"g2", f.g2},
                         {"fixed_field_on", f.fixed_field_on},
                         {"delta_tilde", f.delta_tilde},
                         {"error", f.what}});
    j["failures"] = fails;
    j["stats"] = {{"solves", r.stats.solves},
                  {"iterations", r.stats.iterations},
                  {"max_trace_error", r.stats.max_trace_error},
                  {"max_hermiticity_error", r.stats.max_hermiticity_error},
                  {"min_eigenvalue", r.stats.min_eigenvalue},
                  {"max_residual", r.stats.max_residual},
                  {"max_bloch_order", r.stats.max_order},
                  {"max_truncation", r.stats.max_truncation}};
    return j;
}

ScanProgress progress_printer(const std::string& what)
{
    return [what, last = -1](std::size_t done, std::size_t total) mutable {
        const int pct = static_cast<int>(100.0 * done / total);
        if (pct / 5 != last / 5 || done == total) {
            last = pct;
            std::cerr << "\r" << what << ": " << pct << "% (" << done << "/" << total
                      << " node sweeps)" << std::flush;
            if (done == total)
                std::cerr << "\n";
        }
    };
}

const std::vector<double>& column(const std::vector<double>& v, std::size_t n,
                                  std::vector<double>& fill)
{
    if (!v.empty())
        return v;
    fill.assign(n, std::nan(""));
    return fill;
}

int cmd_eig(const Common& c, int levels)
{
    const RunConfig rc = load(c);
    if (rc.couplings.empty())
        throw ConfigError("eig needs [system] couplings = g1 [g2 ...]");
    const fs::path dir = output_dir(c.out);
    SystemConfig sys = rc.scan.system(rc.couplings, false);
    const auto basis = dressed_basis(sys);
    const auto H = build_H(sys);
    const auto space = sys.space();
    const int top = std::min(levels, space.fock_cutoff());

    std::ofstream o(dir / "eig.csv");
    write_header(o, rc, "eig");
    for (const auto& d : basis.diagnostics)
        o << "# note: " << d << "\n";
    o << "n,label,eigenvalue,numeric_eigenvalue,residual";
    for (int i = 0; i < space.dim(); ++i)
        o << ",re" << space.ket_name(i) << ",im" << space.ket_name(i);
    o << "\n";
    std::size_t k = 0;
    for (int q = 0; q <= top; ++q) {
        const auto numeric = sector_eigensystem(H, q);
        for (std::size_t j = 0; j < numeric.size(); ++j, ++k) {
            const auto& s = basis.states.at(k);
            const double res = (H.mat() * s.coeffs - s.eigenvalue * s.coeffs).norm();
            o << q << "," << s.label.str() << "," << fmt(s.eigenvalue) << ","
              << fmt(numeric[j].value) << "," << fmt(res);
            for (int i = 0; i < space.dim(); ++i)
                o << "," << fmt(s.coeffs(i).real()) << "," << fmt(s.coeffs(i).imag());
            o << "\n";
        }
    }
    std::cerr << "wrote " << (dir / "eig.csv").string() << "\n";
    return 0;
}

int cmd_scan(const Common& c)
{
    const RunConfig rc = load(c);
    const fs::path dir = output_dir(c.out);
    const auto r = scan(rc.scan, progress_printer("scan"));
    const std::size_t n = r.delta_tilde.size();
    std::vector<double> f1, f2, f3, f4, f5, f6, f7;
    const auto& one = column(r.one.raw, n, f1);
    const auto& two = column(r.two.raw, n, f2);
    const auto& bg = column(r.mixed.background, n, f3);
    const auto& diff = column(r.mixed.difference, n, f4);
    const auto& one_diff = column(r.one.difference, n, f5);
    const auto& two_bg = column(r.two.background, n, f6);
    const auto& two_diff = column(r.two.difference, n, f7);

    std::ofstream o(dir / "scan.csv");
    write_header(o, rc, "scan");
    o << "delta_tilde,w2_one_atom,w2_two_atom,w2_mixed,w2_background,w2_difference,"
         "w2_one_atom_difference,w2_two_atom_background,w2_two_atom_difference\n";
    for (std::size_t i = 0; i < n; ++i)
        o << fmt(r.delta_tilde[i]) << "," << fmt(one[i]) << "," << fmt(two[i]) << ","
          << fmt(r.mixed.raw[i]) << "," << fmt(bg[i]) << "," << fmt(diff[i]) << ","
          << fmt(one_diff[i]) << "," << fmt(two_bg[i]) << "," << fmt(two_diff[i]) << "\n";

    json j = manifest(rc, "scan", c.config);
    j.update(result_json(r, rc));
    std::ofstream(dir / "scan.json") << j.dump(2) << "\n";
    std::cerr << "wrote " << (dir / "scan.csv").string() << " and scan.json\n";
    if (!r.gaps.empty())
        std::cerr << r.gaps.size() << " point(s) skipped where delta = 0\n";
    if (!r.complete()) {
        std::cerr << r.failures.size() << " node solve(s) failed; see scan.json\n";
        return 2;
    }
    return 0;
}

int cmd_suppress(const Common& c, const std::vector<std::string>& extra)
{
    RunConfig rc = load(c);
    for (const auto& s : extra)
        rc.selectors.push_back(s);
    try {
        rc.scan.selectors = parse_selectors(rc.selectors);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const fs::path dir = output_dir(c.out);
    ScanConfig base = rc.scan;
    base.selectors.clear();
    base.one_atom = false;
    ScanConfig sup = rc.scan;
    sup.one_atom = false;
    const auto r0 = scan(base, progress_printer("unsuppressed"));
    const auto r1 = rc.scan.selectors.empty() ? r0 : scan(sup, progress_printer("suppressed"));
    const bool bg = rc.scan.background_subtract;
    const std::size_t n = r0.delta_tilde.size();

    std::ofstream o(dir / "suppress.csv");
    write_header(o, rc, "suppress");
    o << "delta_tilde,w2_two_atom,w2_two_atom_suppressed,w2_difference,w2_difference_suppressed,"
         "ratio\n";
    std::vector<double> f1, f2;
    const auto& d0 = column(r0.two.difference, n, f1);
    const auto& d1 = column(r1.two.difference, n, f2);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = bg ? d0[i] : r0.two.raw[i];
        const double b = bg ? d1[i] : r1.two.raw[i];
        const double ratio = a == b ? 1.0 : b / a;
        o << fmt(r0.delta_tilde[i]) << "," << fmt(r0.two.raw[i]) << "," << fmt(r1.two.raw[i])
          << "," << fmt(d0[i]) << "," << fmt(d1[i]) << "," << fmt(ratio) << "\n";
    }
    json j = manifest(rc, "suppress", c.config);
    j["unsuppressed"] = result_json(r0, rc);
    j["suppressed"] = result_json(r1, rc);
    std::ofstream(dir / "suppress.json") << j.dump(2) << "\n";
    std::cerr << "wrote " << (dir / "suppress.csv").string() << " and suppress.json\n";
    return r0.complete() && r1.complete() ? 0 : 2;
}

int cmd_dist(const Common& c, const std::string& kind, double g_max, double F, int resolution)
{
    RunConfig rc = load(c);
    // explicit flags override the config file
    if (!kind.empty() || g_max > 0 || F > 0 || resolution > 0) {
        std::string k = kind.empty() ? rc.distribution_kind : kind;
        std::ostringstream d;
        d << "[distribution]\nkind = " << k << "\ng_max = " << fmt(g_max > 0 ? g_max : rc.g_max)
          << "\nresolution = " << (resolution > 0 ? resolution : rc.resolution) << "\n";
        if (F > 0)
            d << "F = " << fmt(F) << "\n";
        else if (k == rc.distribution_kind)
            d << "F = " << fmt(rc.F) << "\n";
        if (!rc.table_path.empty())
            d << "table = " << rc.table_path << "\n";
        rc = resolve(ConfigFile::parse(d.str(), "<flags>"));
    }
    const fs::path dir = output_dir(c.out);
    const auto& dist = rc.scan.distribution;
    std::ofstream o(dir / "dist.csv");
    write_header(o, rc, "dist");
    if (!dist.note.empty())
        o << "# note: " << dist.note << "\n";
    o << "g_over_gmax,g,weight,kappa_P\n";
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double density =
            dist.widths[i] > 0 ? dist.weights[i] / dist.widths[i] : INFINITY;
        o << fmt(dist.nodes[i] / dist.g_max) << "," << fmt(dist.nodes[i]) << ","
          << fmt(dist.weights[i]) << "," << fmt(density) << "\n";
    }
    std::cerr << "wrote " << (dir / "dist.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-photon coincidence spectroscopy of one and two atoms in a cavity"};
    app.require_subcommand(1);
    Common c;
    auto common = [&c](CLI::App* s) {
        s->add_option("--config", c.config, "configuration file");
        s->add_option("--out", c.out, "output directory");
        s->add_option("--threads", c.threads, "worker threads, 0 = all cores");
        s->add_option("--delta-range", c.delta_range, "scan grid LO:HI:STEP");
        s->add_option("--k-order", c.k_order, "minimum Bloch hierarchy order K");
        s->add_option("--fock-cutoff", c.fock_cutoff, "largest photon number kept");
    };
    int levels = 2;
    auto* eig = app.add_subcommand("eig", "dressed-state table for [system] couplings");
    common(eig);
    eig->add_option("--levels", levels, "highest excitation number listed");

    auto* sc = app.add_subcommand("scan", "two-photon coincidence spectrum");
    common(sc);

    std::vector<std::string> selectors;
    auto* sup = app.add_subcommand("suppress", "spectra with and without suppressed transitions");
    common(sup);
    sup->add_option("--select", selectors, "selector such as fixed:0~1- (repeatable)");

    std::string kind;
    double g_max = -1, F = -1;
    int resolution = -1;
    auto* dist = app.add_subcommand("dist", "coupling-strength distribution table");
    common(dist);
    dist->add_option("--kind", kind, "uniform-beam | masked-beam | delta | custom-table");
    dist->add_option("--g-max", g_max, "antinode coupling in units of kappa");
    dist->add_option("--F", F, "lower cut-off fraction");
    dist->add_option("--resolution", resolution, "number of bins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    try {
        if (*eig)
            return cmd_eig(c, levels);
        if (*sc)
            return cmd_scan(c);
        if (*sup)
            return cmd_suppress(c, selectors);
        if (*dist)
            return cmd_dist(c, kind, g_max, F, resolution);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
