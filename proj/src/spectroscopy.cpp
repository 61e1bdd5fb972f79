#include "pcs/spectroscopy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

namespace pcs {

namespace {
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> DeltaGrid::points() const
{
    if (!points_override.empty()) {
        for (std::size_t i = 1; i < points_override.size(); ++i)
            if (!(points_override[i] > points_override[i - 1]))
                throw std::invalid_argument("scan points must be increasing");
        return points_override;
    }
    if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("scan grid needs lo <= hi and step > 0");
    // integer stepping, tolerant to rounding at the upper end
    const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> p(n);
    for (long i = 0; i < n; ++i)
        p[i] = lo + i * step;
    return p;
}

double scan_delta(double g_f, double delta_tilde)
{
    return g_f * (delta_tilde + 1.0);
}

double delta_tilde_of(double g_f, double delta)
{
    return delta / g_f - 1.0;
}

void ScanConfig::validate() const
{
    if (!std::isfinite(g_f) || g_f == 0.0)
        throw std::invalid_argument("g_f must be finite and nonzero");
    if (grid.points().empty())
        throw std::invalid_argument("scan grid is empty");
    distribution.validate();
    if (!(p0 >= 0.0 && p1 >= 0.0 && p2 >= 0.0))
        throw std::invalid_argument("sector probabilities must be >= 0");
    if (!one_atom && !two_atom)
        throw std::invalid_argument("no atom-number sector selected");
    if (bloch_order < 0)
        throw std::invalid_argument("Bloch order must be >= 0");
    if (solver.adaptive_order && (!(solver.truncation_tol > 0.0) || solver.max_order < bloch_order))
        throw std::invalid_argument("adaptive order needs truncation_tol > 0 and max_order >= bloch_order");
    if (!(prominence_fraction >= 0.0))
        throw std::invalid_argument("prominence fraction must be >= 0");
    if (threads < 0)
        throw std::invalid_argument("thread count must be >= 0");
    system({1.0}, true).validate();
}

SystemConfig ScanConfig::system(std::vector<double> couplings, bool fixed_field_on) const
{
    SystemConfig s;
    s.couplings = std::move(couplings);
    s.atomic_decay = atomic_decay;
    s.fixed_drive = fixed_field_on ? fixed_drive : 0.0;
    s.scan_drive = scan_drive;
    s.fixed_detuning = g_f;
    s.fock_cutoff = fock_cutoff;
    return s;
}

double peak_prominence(const std::vector<double>& v, std::size_t i)
{
    const std::size_t n = v.size();
    if (i == 0 || i + 1 >= n || !std::isfinite(v[i]) || !std::isfinite(v[i - 1]) ||
        !std::isfinite(v[i + 1]) || !(v[i] > v[i - 1] && v[i] > v[i + 1]))
        return 0.0;
    const double h = v[i];
    double left = h;
    for (std::size_t j = i; j-- > 0;) {
        if (!std::isfinite(v[j]) || v[j] > h)
            break;
        left = std::min(left, v[j]);
    }
    double right = h;
    for (std::size_t j = i + 1; j < n; ++j) {
        if (!std::isfinite(v[j]) || v[j] > h)
            break;
        right = std::min(right, v[j]);
    }
    return h - std::max(left, right);
}

std::vector<Peak> detect_peaks(const std::vector<double>& values,
                               const std::vector<double>& delta_tilde, double threshold)
{
    if (values.size() != delta_tilde.size())
        throw std::invalid_argument("peak search: values and grid differ in length");
    std::vector<Peak> out;
    if (values.size() < 3)
        return out;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double p = peak_prominence(values, i);
        if (p > 0.0 && p >= threshold)
            out.push_back({i, delta_tilde[i], values[i], p});
    }
    return out;
}

void SolveStats::add(const BlochSolution& s)
{
    const auto rho = s.rho0();
    ++solves;
    iterations += s.iterations;
    max_trace_error = std::max(max_trace_error, std::abs(rho.trace() - 1.0));
    max_hermiticity_error = std::max(max_hermiticity_error, rho.hermiticity_error());
    min_eigenvalue = std::min(min_eigenvalue, rho.min_eigenvalue());
    max_residual = std::max(max_residual, s.residual);
    max_order = std::max(max_order, s.order);
    max_truncation = std::max(max_truncation, s.truncation);
}

void SolveStats::merge(const SolveStats& o)
{
    solves += o.solves;
    iterations += o.iterations;
    max_trace_error = std::max(max_trace_error, o.max_trace_error);
    max_hermiticity_error = std::max(max_hermiticity_error, o.max_hermiticity_error);
    min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
    max_residual = std::max(max_residual, o.max_residual);
    max_order = std::max(max_order, o.max_order);
    max_truncation = std::max(max_truncation, o.max_truncation);
}

std::vector<double> sector_mix(const std::vector<double>& one, const std::vector<double>& two,
                               double p0, double p1, double p2)
{
    if (one.size() != two.size())
        throw std::invalid_argument("sector spectra are on different grids");
    if (!(p0 >= 0.0 && p1 >= 0.0 && p2 >= 0.0))
        throw std::invalid_argument("sector probabilities must be >= 0");
    // the empty cavity contributes no coincidences
    std::vector<double> out(one.size());
    for (std::size_t i = 0; i < one.size(); ++i)
        out[i] = p1 * one[i] + p2 * two[i];
    return out;
}

W2Value point_w2(const SystemConfig& sys, double delta, int K,
                 const std::vector<TransitionSelector>& selectors, const SolverOptions& opt)
{
    const auto me = selectors.empty() ? master_equation(sys)
                                      : suppressed_master_equation(sys, selectors);
    return w2(solve_hierarchy(me, delta, K, opt).rho0());
}

namespace {

struct Task {
    int atoms;
    std::size_t node;
    double g1, g2, weight;
    bool fixed_on;
};

struct TaskResult {
    std::vector<double> w; // NaN where the solve failed or was singular
    std::vector<bool> singular;
    std::vector<ScanFailure> failures;
    SolveStats stats;
};

TaskResult run_task(const ScanConfig& cfg, const Task& t, const std::vector<double>& dts)
{
    TaskResult r;
    r.w.assign(dts.size(), nan);
    r.singular.assign(dts.size(), false);
    auto fail = [&](double dt, const std::string& what) {
        r.failures.push_back({t.atoms, t.node, t.g1, t.g2, t.fixed_on, dt, what});
    };
    std::vector<double> g{t.g1};
    if (t.atoms == 2)
        g.push_back(t.g2);
    const SystemConfig sys = cfg.system(g, t.fixed_on);
    std::optional<HierarchySolver> solver;
    try {
        const auto me = t.atoms == 2 && !cfg.selectors.empty()
                            ? suppressed_master_equation(sys, cfg.selectors)
                            : master_equation(sys);
        solver.emplace(me, cfg.bloch_order, cfg.solver);
    } catch (const std::exception& e) {
        for (double dt : dts)
            fail(dt, e.what());
        return r;
    }
    for (std::size_t i = 0; i < dts.size(); ++i) {
        try {
            const auto sol = solver->solve(scan_delta(cfg.g_f, dts[i]));
            r.w[i] = w2(sol.rho0()).value;
            r.stats.add(sol);
        } catch (const SingularHierarchy&) {
            r.singular[i] = true;
        } catch (const std::exception& e) {
            fail(dts[i], e.what());
        }
    }
    return r;
}

} // namespace

SpectrumResult scan(const ScanConfig& cfg, const ScanProgress& progress)
{
    cfg.validate();
    SpectrumResult res;
    res.delta_tilde = cfg.grid.points();
    const auto& dts = res.delta_tilde;
    const std::size_t np = dts.size();

    std::vector<Task> tasks;
    const std::vector<bool> fields =
        cfg.background_subtract ? std::vector<bool>{true, false} : std::vector<bool>{true};
    if (cfg.one_atom) {
        const auto& d = cfg.distribution;
        res.nodes_one = d.size();
        for (bool on : fields)
            for (std::size_t k = 0; k < d.size(); ++k)
                tasks.push_back({1, k, d.nodes[k], 0.0, d.weights[k], on});
    }
    if (cfg.two_atom) {
        // both atoms share P(g), so the average is symmetric under g1 <-> g2
        const auto grid = exchange_reduced_product(cfg.distribution);
        res.nodes_two = grid.size();
        for (bool on : fields)
            for (std::size_t k = 0; k < grid.size(); ++k)
                tasks.push_back({2, k, grid.g1[k], grid.g2[k], grid.weights[k], on});
    }

    std::vector<TaskResult> results(tasks.size());
    std::atomic<std::size_t> next{0}, done{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            results[i] = run_task(cfg, tasks[i], dts);
            const std::size_t n = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(n, tasks.size());
            }
        }
    };
    unsigned nthreads = cfg.threads > 0 ? unsigned(cfg.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, std::max<std::size_t>(1, tasks.size()));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    // ordered reduction
    std::vector<bool> singular(np, false);
    auto reduce = [&](int atoms, bool on) {
        std::vector<double> acc(np, 0.0);
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].atoms != atoms || tasks[i].fixed_on != on)
                continue;
            for (std::size_t p = 0; p < np; ++p) {
                acc[p] += tasks[i].weight * results[i].w[p];
                if (results[i].singular[p])
                    singular[p] = true;
            }
        }
        return acc;
    };
    auto fill = [&](SectorSpectrum& s, int atoms) {
        s.raw = reduce(atoms, true);
        if (cfg.background_subtract) {
            s.background = reduce(atoms, false);
            s.difference.resize(np);
            for (std::size_t p = 0; p < np; ++p)
                s.difference[p] = s.raw[p] - s.background[p];
        }
    };
    const std::vector<double> zeros(np, 0.0);
    if (cfg.one_atom)
        fill(res.one, 1);
    if (cfg.two_atom)
        fill(res.two, 2);
    auto or_zero = [&](const std::vector<double>& v) { return v.empty() ? zeros : v; };
    res.mixed.raw = sector_mix(or_zero(res.one.raw), or_zero(res.two.raw), cfg.p0, cfg.p1, cfg.p2);
    if (cfg.background_subtract) {
        res.mixed.background = sector_mix(or_zero(res.one.background),
                                          or_zero(res.two.background), cfg.p0, cfg.p1, cfg.p2);
        res.mixed.difference = sector_mix(or_zero(res.one.difference),
                                          or_zero(res.two.difference), cfg.p0, cfg.p1, cfg.p2);
    }
    for (std::size_t p = 0; p < np; ++p)
        if (singular[p])
            res.gaps.push_back(p);
    for (auto& r : results) {
        res.stats.merge(r.stats);
        for (auto& f : r.failures)
            res.failures.push_back(std::move(f));
    }

    auto peaks_of = [&](const SectorSpectrum& s) {
        const auto& v = cfg.background_subtract ? s.difference : s.raw;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double x : v)
            if (std::isfinite(x)) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        const double thr = hi > lo ? cfg.prominence_fraction * (hi - lo) : 0.0;
        return detect_peaks(v, dts, thr);
    };
    if (cfg.two_atom)
        res.peaks_two = peaks_of(res.two);
    res.peaks_mixed = peaks_of(res.mixed);
    return res;
}

SpectrumResult background_subtract(ScanConfig cfg, const ScanProgress& progress)
{
    cfg.background_subtract = true;
    return scan(cfg, progress);
}

} // namespace pcs
