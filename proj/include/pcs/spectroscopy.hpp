#pragma once

#include "pcs/broadening.hpp"
#include "pcs/liouvillian.hpp"
#include "pcs/suppression.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pcs {

// Scan axis dtilde = (omega_2 - omega) / (omega - omega_1); either a regular
// grid lo, lo + step, ..., <= hi or an explicit list.
struct DeltaGrid {
    double lo = -2.0;
    double hi = 3.0;
    double step = 0.02;
    std::vector<double> points_override;

    std::vector<double> points() const;
};

// delta = omega_2 - omega_1 = g_f (dtilde + 1)
double scan_delta(double g_f, double delta_tilde);
double delta_tilde_of(double g_f, double delta);

struct ScanConfig {
    double g_f = 63.0;
    DeltaGrid grid;
    CouplingDistribution distribution = delta_distribution(63.0);
    double p0 = 0.0, p1 = 0.9, p2 = 0.1;
    double fixed_drive = 0.70710678118654752; // 1/sqrt(2)
    double scan_drive = 1.4142135623730951;   // sqrt(2)
    double atomic_decay = 2.0;
    int bloch_order = 2;
    int fock_cutoff = 4;
    bool one_atom = true;
    bool two_atom = true;
    bool background_subtract = true;
    // applied to the two-atom sector only; the one-atom ladder lacks most labels
    std::vector<TransitionSelector> selectors;
    double prominence_fraction = 0.01; // of the spectrum's finite range
    int threads = 0;                   // 0: hardware concurrency
    SolverOptions solver;

    void validate() const;
    SystemConfig system(std::vector<double> couplings, bool fixed_field_on) const;
};

struct Peak {
    std::size_t index = 0;
    double delta_tilde = 0.0;
    double height = 0.0;
    double prominence = 0.0;
};

// Strict local maxima whose prominence (height above the higher of the two
// flanking minima) reaches the threshold. Non-finite entries act as walls.
std::vector<Peak> detect_peaks(const std::vector<double>& values,
                               const std::vector<double>& delta_tilde, double threshold);
// prominence of the peak at index i, 0 if i is not a strict local maximum
double peak_prominence(const std::vector<double>& values, std::size_t i);

struct SectorSpectrum {
    std::vector<double> raw;
    std::vector<double> background; // fixed field off; empty without subtraction
    std::vector<double> difference; // raw - background
};

// Running extremes of the physical checks on every solved rho_0.
struct SolveStats {
    long solves = 0;
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    double max_residual = 0.0;
    long iterations = 0;
    int max_order = 0;           // highest Bloch order any solve needed
    double max_truncation = 0.0; // largest outer-block entry accepted

    void add(const BlochSolution& s);
    void merge(const SolveStats& o);
};

struct ScanFailure {
    int atoms = 0;
    std::size_t node = 0;
    double g1 = 0.0, g2 = 0.0;
    bool fixed_field_on = true;
    double delta_tilde = 0.0;
    std::string what;
};

struct SpectrumResult {
    std::vector<double> delta_tilde;
    SectorSpectrum one, two, mixed;
    std::vector<Peak> peaks_two;   // on the two-atom difference (raw without subtraction)
    std::vector<Peak> peaks_mixed; // likewise for the mixture
    std::vector<std::size_t> gaps; // points where delta = 0 (fields coincide)
    std::vector<ScanFailure> failures;
    SolveStats stats;
    std::size_t nodes_one = 0, nodes_two = 0;

    bool complete() const { return failures.empty(); }
};

using ScanProgress = std::function<void(std::size_t done, std::size_t total)>;

SpectrumResult scan(const ScanConfig& cfg, const ScanProgress& progress = {});
// scan() with the fixed-field-off repeat forced on
SpectrumResult background_subtract(ScanConfig cfg, const ScanProgress& progress = {});

// elementwise p0 * 0 + p1 * one + p2 * two
std::vector<double> sector_mix(const std::vector<double>& one, const std::vector<double>& two,
                               double p0, double p1, double p2);

// Single-node helper: w2 of rho_0 at one point, no averaging.
W2Value point_w2(const SystemConfig& sys, double delta, int K,
                 const std::vector<TransitionSelector>& selectors = {},
                 const SolverOptions& opt = {});

} // namespace pcs
