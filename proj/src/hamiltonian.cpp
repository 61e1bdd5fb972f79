#include "pcs/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace pcs {

void SystemConfig::validate() const
{
    auto finite_nonneg = [](double x, const char* what) {
        if (!std::isfinite(x) || x < 0.0)
            throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
    };
    for (double g : couplings)
        finite_nonneg(g, "coupling");
    finite_nonneg(atomic_decay, "atomic decay");
    finite_nonneg(fixed_drive, "fixed drive");
    finite_nonneg(scan_drive, "scan drive");
    if (!std::isfinite(fixed_detuning))
        throw std::invalid_argument("fixed detuning must be finite");
    if (fock_cutoff < 1)
        throw std::invalid_argument("fock cutoff must be at least 1");
}

static cplx phase_of(const GaugePhase* phases, int m, int atoms)
{
    if (!phases || phases->theta.empty())
        return 1.0;
    if (static_cast<int>(phases->theta.size()) != atoms)
        throw DimensionMismatch("one gauge phase per atom expected");
    return std::polar(1.0, phases->theta[m]);
}

OperatorMatrix build_H(const SystemConfig& cfg, const GaugePhase* phases)
{
    cfg.validate();
    const auto space = cfg.space();
    const auto a = annihilation(space);
    const auto ad = a.adjoint();
    auto H = OperatorMatrix::zero(space);
    for (int m = 1; m <= space.atom_count(); ++m) {
        const cplx g = cfg.couplings[m - 1] * phase_of(phases, m - 1, space.atom_count());
        const auto sm = atom_sigma(space, m, Sigma::Minus);
        const auto sp = atom_sigma(space, m, Sigma::Plus);
        H += I * g * (ad * sm);
        H -= I * std::conj(g) * (a * sp);
    }
    return H;
}

OperatorMatrix gauge_unitary(const CompositeSpace& space, const GaugePhase& phases)
{
    if (static_cast<int>(phases.theta.size()) != space.atom_count())
        throw DimensionMismatch("one gauge phase per atom expected");
    Matrix W = Matrix::Identity(space.dim(), space.dim());
    for (int i = 0; i < space.dim(); ++i)
        for (int m = 0; m < space.atom_count(); ++m) {
            const double sz = space.atom_level(i, m) ? 0.5 : -0.5;
            W(i, i) *= std::polar(1.0, -phases.theta[m] * sz);
        }
    return {space, W};
}

OperatorMatrix drive_raising(const CompositeSpace& space, double amplitude,
                             const GaugePhase* phases)
{
    if (!(amplitude >= 0.0))
        throw std::invalid_argument("drive amplitude must be >= 0");
    auto V = OperatorMatrix::zero(space);
    for (int m = 1; m <= space.atom_count(); ++m) {
        // s+ picks up exp(-i theta) under the gauge rotation
        const cplx ph = std::conj(phase_of(phases, m - 1, space.atom_count()));
        V += (I * amplitude * ph) * atom_sigma(space, m, Sigma::Plus);
    }
    return V;
}

OperatorMatrix build_drive(const CompositeSpace& space, double amplitude,
                           const GaugePhase* phases)
{
    const auto V = drive_raising(space, amplitude, phases);
    return V + V.adjoint();
}

OperatorMatrix build_H_eff(const SystemConfig& cfg, const OperatorMatrix& fixed_drive,
                           const GaugePhase* phases)
{
    const auto space = cfg.space();
    auto H = build_H(cfg, phases);
    const auto n = number_operator(space);
    H += cplx(cfg.fixed_detuning, -SystemConfig::kappa) * n;
    for (int m = 1; m <= space.atom_count(); ++m) {
        H += cplx(cfg.fixed_detuning) * atom_sigma(space, m, Sigma::Z);
        H += cplx(0.0, -0.5 * cfg.atomic_decay) * atom_sigma(space, m, Sigma::Excited);
    }
    H += fixed_drive;
    return H;
}

OperatorMatrix build_H_eff(const SystemConfig& cfg, const GaugePhase* phases)
{
    return build_H_eff(cfg, build_drive(cfg.space(), cfg.fixed_drive, phases), phases);
}

} // namespace pcs
