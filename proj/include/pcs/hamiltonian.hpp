#pragma once

#include "pcs/fock_algebra.hpp"

#include <vector>

namespace pcs {

// All rates and frequencies in units of the cavity field decay rate kappa,
// hbar = 1 and the bare frequency omega is the zero of energy.
struct SystemConfig {
    std::vector<double> couplings;      // g_m, one per atom
    double atomic_decay = 0.0;          // gamma, same for every atom
    double fixed_drive = 0.0;           // E1
    double scan_drive = 0.0;            // E2
    double fixed_detuning = 0.0;        // g_f = omega - omega_1
    int fock_cutoff = 4;

    static constexpr double kappa = 1.0;

    int atom_count() const { return static_cast<int>(couplings.size()); }
    CompositeSpace space() const { return {fock_cutoff, atom_count()}; }
    void validate() const; // throws std::invalid_argument
};

// Phases of complex couplings g_m exp(i theta_m). Only used to check that the
// phases can be rotated away.
struct GaugePhase {
    std::vector<double> theta;
};

// Undriven closed-system Hamiltonian, omega = 0.
OperatorMatrix build_H(const SystemConfig& cfg, const GaugePhase* phases = nullptr);

// W = prod_m exp(-i theta_m sz_m); H(g e^{i theta}) = W H(|g|) W^+
OperatorMatrix gauge_unitary(const CompositeSpace& space, const GaugePhase& phases);

// Upsilon(E) = i E sum_m (s+_m - s-_m), atoms driven directly
OperatorMatrix build_drive(const CompositeSpace& space, double amplitude,
                           const GaugePhase* phases = nullptr);
// i E sum_m s+_m, the half of Upsilon(E) rotating as exp(-i omega t)
OperatorMatrix drive_raising(const CompositeSpace& space, double amplitude,
                             const GaugePhase* phases = nullptr);

// Non-Hermitian effective Hamiltonian in the frame rotating at omega_1.
// The second form takes an explicit fixed-field drive operator (suppression).
OperatorMatrix build_H_eff(const SystemConfig& cfg, const GaugePhase* phases = nullptr);
OperatorMatrix build_H_eff(const SystemConfig& cfg, const OperatorMatrix& fixed_drive,
                           const GaugePhase* phases = nullptr);

} // namespace pcs
