#pragma once

#include "pcs/hamiltonian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pcs {

// Label of a dressed state by excitation number and branch signs.
//   "0"                      ground state
//   "2+" "2-"                one atom, couplet with 2 quanta
//   "1-" "10" "1+"           two atoms, one-quantum triplet
//   "2++" "2+-" "2-+" "2--"  two atoms, quadruplet with 2 quanta
// branch is the sign of the energy, sub selects the inner (+Xi / -Xi) root.
struct DressedLabel {
    int quanta = 0;
    int branch = 0; // -1, 0, +1
    int sub = 0;    // -1, +1 for quadruplets, 0 otherwise

    std::string str() const;
    static DressedLabel parse(const std::string& s); // throws std::invalid_argument
    bool operator==(const DressedLabel&) const = default;
};

struct DressedState {
    DressedLabel label;
    double eigenvalue = 0.0; // relative to omega = 0
    Vector coeffs;           // full composite-space vector
};

struct DegenerateCouplings : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Auxiliary quantities of the n-th two-atom quadruplet. The primed
// coefficients are the unnormalised amplitudes with the |n-1,ee> amplitude
// set to one.
struct LadderCoefficients {
    double xi = 0.0;
    double lambda_p[2]{};  // Lambda'_{+}, Lambda'_{-}
    double zeta_ge[2]{};   // amplitude on |n,ge> (atom 2 excited)
    double zeta_eg[2]{};   // amplitude on |n,eg> (atom 1 excited)
    double norm[2]{};      // Lambda'^2 + zeta_ge^2 + zeta_eg^2 + 1
};

// Phase convention: the largest-magnitude coefficient is real positive
// (lowest index wins ties).
void fix_phase(Vector& v);

DressedState ground_state(const CompositeSpace& space);
// returns {|n>_-, |n>_+}
std::pair<DressedState, DressedState> jc_ladder(const CompositeSpace& space, double g, int n);
// returns {|1>_-, |1>_0, |1>_+}
std::vector<DressedState> triplet(const CompositeSpace& space, double g1, double g2);
LadderCoefficients ladder_coefficients(int n, double g1, double g2);
// states with n+1 quanta, ascending: {-+, --, +-, ++}
std::vector<DressedState> quadruplet(const CompositeSpace& space, int n, double g1, double g2);

struct Eigenpair {
    double value;
    Vector vec;
};
// Hermitian input only, ascending order
std::vector<Eigenpair> numeric_eigensystem(const Matrix& H);
std::vector<Eigenpair> numeric_eigensystem(const OperatorMatrix& H);
// restricted to one excitation sector, vectors embedded back in the full space
std::vector<Eigenpair> sector_eigensystem(const OperatorMatrix& H, int quanta);

// Complete labelled eigenbasis of the undriven H, built sector by sector.
// Sectors cut by the Fock truncation get generic labels with sub = 9.
struct DressedBasis {
    std::vector<DressedState> states;
    Matrix U; // columns are the states
    std::vector<std::string> diagnostics;

    int find(const DressedLabel& l) const; // -1 when absent
};
DressedBasis dressed_basis(const SystemConfig& cfg);

enum class Ordering { FixedFirst, ScanFirst };

struct Pathway {
    DressedLabel intermediate;
    DressedLabel final_state;
    Ordering ordering = Ordering::FixedFirst;
};

struct ResonanceInfo {
    double delta_tilde = 0.0;
    // detuning (units kappa) of the step whose frequency is not scanned:
    // omega_1-first: lambda_inter + g_f; omega_2-first: lambda_final - lambda_inter + g_f
    double fixed_step_mismatch = 0.0;
    double first_element = 0.0;  // |<inter|Upsilon(1)|0>|
    double second_element = 0.0; // |<final|Upsilon(1)|inter>|
    std::vector<std::string> warnings;
};

// Two-atom (g2 may be 0) two-photon resonance for a ground -> inter -> final path.
ResonanceInfo resonance_detuning(const Pathway& p, double g1, double g2, double g_f);

} // namespace pcs
