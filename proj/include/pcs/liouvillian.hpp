#pragma once

#include "pcs/hamiltonian.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <stdexcept>
#include <vector>

namespace pcs {

using Sparse = Eigen::SparseMatrix<cplx>;

struct SingularHierarchy : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything the master equation needs, in the frame rotating at omega_1:
//   d rho/dt = -i(H rho - rho H^+) + sum_j C_j rho C_j^+
//              - i[V, rho] e^{-i delta t} - i[V^+, rho] e^{+i delta t}
// with C_j the jump operators already scaled by sqrt(rate).
struct MasterEquation {
    CompositeSpace space;
    Matrix H;                  // non-Hermitian effective Hamiltonian
    std::vector<Matrix> jumps;
    Matrix V;                  // raising half of the scanning drive
};

MasterEquation master_equation(const SystemConfig& cfg, const GaugePhase* phases = nullptr);
// explicit drives, used by the suppression pipeline
MasterEquation master_equation(const SystemConfig& cfg, const OperatorMatrix& fixed_drive,
                               const OperatorMatrix& scan_raising);

// d^2 x d^2 matrix acting on column-stacked density matrices:
// vec(A X B) = (B^T kron A) vec(X)
struct Superoperator {
    CompositeSpace space;
    Matrix m;
};

struct LiouvillianBlocks {
    Superoperator L0, Lplus, Lminus; // Lplus multiplies exp(-i delta t)
};

LiouvillianBlocks assemble_blocks(const MasterEquation& me);
LiouvillianBlocks assemble_blocks(const SystemConfig& cfg);

Matrix vec(const Matrix& X);
Matrix unvec(const Matrix& v, int d);

// matrix-form actions of the three blocks
Matrix apply_L0(const MasterEquation& me, const Matrix& X);
Matrix apply_Lplus(const MasterEquation& me, const Matrix& X);
Matrix apply_Lminus(const MasterEquation& me, const Matrix& X);

enum class SolverMethod { Krylov, Dense };

struct SolverOptions {
    SolverMethod method = SolverMethod::Krylov;
    double tol = 1e-12;   // relative residual of the bordered system
    int restart = 60;
    int max_iter = 600;
    // invert only the excitation-conserving part of H_eff in the
    // preconditioner instead of all of it; a few more iterations
    bool sector_preconditioner = false;
    // Treat K as a minimum and raise it until max|rho_K| <= truncation_tol.
    // A strong near-resonant scanning field populates harmonics up to the
    // excitation range, where a fixed K = 2 is off by percents.
    bool adaptive_order = true;
    double truncation_tol = 1e-6;
    int max_order = 24;
};

struct BlochSolution {
    CompositeSpace space;
    int order = 0;
    double delta = 0.0;
    std::vector<Matrix> blocks; // rho_k at index k + order
    int iterations = 0;
    double residual = 0.0;      // max_k Frobenius norm of the k-th hierarchy equation
    double truncation = 0.0;    // max |entry| of the outermost block rho_K

    const Matrix& block(int k) const { return blocks.at(k + order); }
    DensityMatrix rho0() const { return {space, block(0)}; }
};

// Solves (L0 + i k delta) rho_k + L+ rho_{k-1} + L- rho_{k+1} = 0, |k| <= K,
// with tr rho_0 = 1, for one master equation and any number of deltas.
// The Krylov path only carries k >= 0 and uses rho_{-k} = rho_k^+; the
// preconditioner is factorised once here. Holds scratch space, so use one
// instance per thread.
class HierarchySolver {
public:
    HierarchySolver(const MasterEquation& me, int K, const SolverOptions& opt = {});
    ~HierarchySolver();
    HierarchySolver(HierarchySolver&&) noexcept;
    HierarchySolver& operator=(HierarchySolver&&) noexcept;

    // guess: a previous solution (typically at a nearby delta) to start from.
    // Adaptive per SolverOptions; remembers the order used for the next call.
    BlochSolution solve(double delta, const BlochSolution* guess = nullptr);
    BlochSolution solve_fixed(double delta, int K, const BlochSolution* guess = nullptr);

    const MasterEquation& equation() const;
    int order() const; // minimum order

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

double truncation_error(const BlochSolution& s);

// K is the minimum order when opt.adaptive_order is set
BlochSolution solve_hierarchy(const MasterEquation& me, double delta, int K,
                              const SolverOptions& opt = {}, const BlochSolution* guess = nullptr);
BlochSolution steady_state(const SystemConfig& cfg, double delta, int K = 2,
                           const SolverOptions& opt = {});

double hierarchy_residual(const MasterEquation& me, const BlochSolution& sol);

struct PropagationOptions {
    double t_final = 80.0;
    double dt_max = 0.002;
    int steps_per_period_min = 50;
};

// Fixed-step RK4 of the full time-dependent master equation from the vacuum,
// averaged over the last period 2 pi / delta.
DensityMatrix time_propagate_oracle(const MasterEquation& me, double delta,
                                    const PropagationOptions& opt = {});
DensityMatrix time_propagate_oracle(const SystemConfig& cfg, double delta,
                                    const PropagationOptions& opt = {});

} // namespace pcs
