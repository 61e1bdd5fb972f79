#include "pcs/liouvillian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pcs {

static void add_jumps(const SystemConfig& cfg, MasterEquation& me)
{
    const auto& space = me.space;
    me.jumps.push_back(std::sqrt(2.0 * SystemConfig::kappa) * annihilation(space).mat());
    // a phase on sigma_- drops out of C rho C^+, so the gauge needs no care here
    if (cfg.atomic_decay > 0.0)
        for (int m = 1; m <= space.atom_count(); ++m)
            me.jumps.push_back(std::sqrt(cfg.atomic_decay) *
                               atom_sigma(space, m, Sigma::Minus).mat());
}

MasterEquation master_equation(const SystemConfig& cfg, const OperatorMatrix& fixed_drive,
                               const OperatorMatrix& scan_raising)
{
    cfg.validate();
    MasterEquation me{cfg.space(), build_H_eff(cfg, fixed_drive).mat(), {}, scan_raising.mat()};
    if (!(scan_raising.space() == me.space))
        throw DimensionMismatch("scan drive lives on a different space");
    add_jumps(cfg, me);
    return me;
}

MasterEquation master_equation(const SystemConfig& cfg, const GaugePhase* phases)
{
    cfg.validate();
    const auto space = cfg.space();
    MasterEquation me{space, build_H_eff(cfg, phases).mat(), {},
                      drive_raising(space, cfg.scan_drive, phases).mat()};
    add_jumps(cfg, me);
    return me;
}

// ---------------------------------------------------------------- superoperators

static Matrix kron(const Matrix& A, const Matrix& B)
{
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

Matrix vec(const Matrix& X)
{
    return Eigen::Map<const Matrix>(X.data(), X.size(), 1);
}

Matrix unvec(const Matrix& v, int d)
{
    if (v.size() != Eigen::Index(d) * d)
        throw DimensionMismatch("vector length is not d^2");
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

LiouvillianBlocks assemble_blocks(const MasterEquation& me)
{
    const int d = me.space.dim();
    const Matrix Id = Matrix::Identity(d, d);
    Matrix L0 = -I * (kron(Id, me.H) - kron(me.H.conjugate(), Id));
    for (const auto& C : me.jumps)
        L0 += kron(C.conjugate(), C);
    const Matrix Vd = me.V.adjoint();
    Matrix Lp = -I * (kron(Id, me.V) - kron(me.V.transpose(), Id));
    Matrix Lm = -I * (kron(Id, Vd) - kron(Vd.transpose(), Id));
    return {{me.space, std::move(L0)}, {me.space, std::move(Lp)}, {me.space, std::move(Lm)}};
}

LiouvillianBlocks assemble_blocks(const SystemConfig& cfg)
{
    return assemble_blocks(master_equation(cfg));
}

Matrix apply_L0(const MasterEquation& me, const Matrix& X)
{
    Matrix out = -I * (me.H * X - X * me.H.adjoint());
    for (const auto& C : me.jumps)
        out += C * X * C.adjoint();
    return out;
}

Matrix apply_Lplus(const MasterEquation& me, const Matrix& X)
{
    return -I * (me.V * X - X * me.V);
}

Matrix apply_Lminus(const MasterEquation& me, const Matrix& X)
{
    const Matrix Vd = me.V.adjoint();
    return -I * (Vd * X - X * Vd);
}

// ---------------------------------------------------------------- hierarchy solver

static BlochSolution solve_dense(const MasterEquation& me, double delta, int K)
{
    const int d = me.space.dim();
    const int n = d * d;
    const int nb = 2 * K + 1;
    const auto L = assemble_blocks(me);
    Matrix A = Matrix::Zero(Eigen::Index(nb) * n, Eigen::Index(nb) * n);
    for (int k = -K; k <= K; ++k) {
        const int r = (k + K) * n;
        A.block(r, r, n, n) = L.L0.m;
        A.block(r, r, n, n).diagonal().array() += I * (k * delta);
        if (k > -K)
            A.block(r, r - n, n, n) = L.Lplus.m;
        if (k < K)
            A.block(r, r + n, n, n) = L.Lminus.m;
    }
    // bordering with the trace of rho_0 keeps every hierarchy equation intact
    Matrix b = Matrix::Zero(A.rows(), 1);
    const int row0 = K * n; // (0,0) entry of rho_0
    b(row0) = 1.0;
    for (int i = 0; i < d; ++i)
        A(row0, K * n + i * d + i) += 1.0;
    Eigen::PartialPivLU<Matrix> lu(A);
    const Matrix x = lu.solve(b);
    if (!x.allFinite())
        throw SingularHierarchy("dense hierarchy solve produced non-finite values");
    BlochSolution sol{me.space, K, delta, {}, 1, 0.0};
    for (int k = -K; k <= K; ++k)
        sol.blocks.push_back(unvec(x.block((k + K) * n, 0, n, 1), d));
    return sol;
}

namespace {

// Blocks k = 0..K side by side in one d x (K+1)d matrix; the blocks with
// k < 0 are implied by X_{-k} = X_k^+. Real inner product on that subspace:
// <X,Y> = Re tr X_0^+ Y_0 + 2 sum_{k>0} Re tr X_k^+ Y_k.
double inner(const Matrix& x, const Matrix& y, int d)
{
    const double all = (x.array().conjugate() * y.array()).sum().real();
    const double first = (x.leftCols(d).array().conjugate() * y.leftCols(d).array()).sum().real();
    return 2.0 * all - first;
}

// A matrix with at most one nonzero per row: C(i, src[i]) = coef[i].
// C X C^+ is then a gather instead of two products.
struct RowMonomial {
    std::vector<int> src;
    Vector coef;

    static bool fits(const Matrix& C)
    {
        for (Eigen::Index i = 0; i < C.rows(); ++i)
            if ((C.row(i).array() != 0.0).count() > 1)
                return false;
        return true;
    }
    explicit RowMonomial(const Matrix& C) : src(C.rows(), -1), coef(Vector::Zero(C.rows()))
    {
        for (Eigen::Index i = 0; i < C.rows(); ++i)
            for (Eigen::Index j = 0; j < C.cols(); ++j)
                if (C(i, j) != 0.0) {
                    src[i] = static_cast<int>(j);
                    coef(i) = C(i, j);
                }
    }
    template <class In, class Out>
    void sandwich_add(const In& X, Out&& Y) const
    {
        const int d = static_cast<int>(src.size());
        for (int j = 0; j < d; ++j) {
            if (src[j] < 0)
                continue;
            const cplx cj = std::conj(coef(j));
            for (int i = 0; i < d; ++i)
                if (src[i] >= 0)
                    Y(i, j) += coef(i) * cj * X(src[i], src[j]);
        }
    }
};

// Eigenbasis of the part of H_eff that the preconditioner inverts exactly:
// X -> -i(Hp X - X Hp^+) + i k delta X is diagonal after X = R Y R^+.
struct SylvesterBasis {
    Matrix R, RH, Rinv, RinvH;
    Vector eig;

    explicit SylvesterBasis(const Matrix& Hp)
    {
        const int d = static_cast<int>(Hp.rows());
        // connected components of the coupling graph, decomposed separately
        std::vector<int> comp(d, -1);
        int nc = 0;
        for (int s = 0; s < d; ++s) {
            if (comp[s] >= 0)
                continue;
            std::vector<int> stack{s};
            comp[s] = nc;
            while (!stack.empty()) {
                const int i = stack.back();
                stack.pop_back();
                for (int j = 0; j < d; ++j)
                    if (comp[j] < 0 && (Hp(i, j) != 0.0 || Hp(j, i) != 0.0)) {
                        comp[j] = nc;
                        stack.push_back(j);
                    }
            }
            ++nc;
        }
        R = Matrix::Zero(d, d);
        Rinv = Matrix::Zero(d, d);
        eig = Vector(d);
        for (int c = 0; c < nc; ++c) {
            std::vector<int> idx;
            for (int i = 0; i < d; ++i)
                if (comp[i] == c)
                    idx.push_back(i);
            const int n = static_cast<int>(idx.size());
            Matrix sub(n, n);
            for (int r = 0; r < n; ++r)
                for (int q = 0; q < n; ++q)
                    sub(r, q) = Hp(idx[r], idx[q]);
            Matrix Rb, Rbinv;
            Vector ev;
            decompose(sub, Rb, Rbinv, ev);
            for (int r = 0; r < n; ++r) {
                eig(idx[r]) = ev(r);
                for (int q = 0; q < n; ++q) {
                    R(idx[r], idx[q]) = Rb(r, q);
                    Rinv(idx[r], idx[q]) = Rbinv(r, q);
                }
            }
        }
        RH = R.adjoint();
        RinvH = Rinv.adjoint();
    }

    static void decompose(const Matrix& A, Matrix& R, Matrix& Rinv, Vector& ev)
    {
        Eigen::ComplexEigenSolver<Matrix> es(A);
        R = es.eigenvectors();
        ev = es.eigenvalues();
        Rinv = Eigen::PartialPivLU<Matrix>(R).inverse();
        const double cond = R.cwiseAbs().colwise().sum().maxCoeff() *
                            Rinv.cwiseAbs().colwise().sum().maxCoeff();
        if (es.info() == Eigen::Success && std::isfinite(cond) && cond < 1e8)
            return;
        // near an exceptional point: fall back to the Hermitian part's eigenbasis
        Eigen::SelfAdjointEigenSolver<Matrix> hs(0.5 * (A + A.adjoint()));
        R = hs.eigenvectors();
        Rinv = R.adjoint();
        ev = (R.adjoint() * A * R).diagonal();
    }

    // elementwise inverse of -i(d_i - conj d_j) + i k delta, guarded near zero
    Matrix inverse_denominator(double kdelta) const
    {
        const int d = static_cast<int>(eig.size());
        const double floor = 1e-10 * (1.0 + std::abs(kdelta));
        Matrix out(d, d);
        for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r) {
                cplx den = -I * (eig(r) - std::conj(eig(c))) + I * kdelta;
                if (std::abs(den) < floor)
                    den = -1.0;
                out(r, c) = 1.0 / den;
            }
        return out;
    }
};

Matrix preconditioner_hamiltonian(const MasterEquation& me, bool sectors)
{
    Matrix Hp = me.H;
    if (!sectors)
        return Hp;
    const auto& s = me.space;
    for (int r = 0; r < s.dim(); ++r)
        for (int c = 0; c < s.dim(); ++c)
            if (s.excitations(r) != s.excitations(c))
                Hp(r, c) = 0.0;
    return Hp;
}

} // namespace

struct HierarchySolver::Impl {
    MasterEquation me;
    int K = -1;
    int min_order;
    int hint;
    int d;
    SolverOptions opt;
    SylvesterBasis basis;
    Matrix left, right; // [-iV, -iH, -iV^+] and [iV; iH^+; iV^+]
    std::vector<RowMonomial> gathers;
    std::vector<Matrix> C, Cd; // jumps that are not row monomials

    // scratch
    Matrix ext_h, ext_v, t1, t2;
    std::vector<Matrix> invden;
    std::vector<Matrix> Vb, Zb;

    Impl(const MasterEquation& m, int order, const SolverOptions& o)
        : me(m), min_order(order), hint(order), d(m.space.dim()), opt(o),
          basis(preconditioner_hamiltonian(m, o.sector_preconditioner))
    {
        const Matrix Vd = me.V.adjoint();
        left.resize(d, 3 * d);
        left << -I * me.V, -I * me.H, -I * Vd;
        right.resize(3 * d, d);
        right << I * me.V, I * me.H.adjoint(), I * Vd;
        for (const auto& c : me.jumps) {
            if (RowMonomial::fits(c)) {
                gathers.emplace_back(c);
            } else {
                C.push_back(c);
                Cd.push_back(c.adjoint());
            }
        }
    }

    void set_order(int order)
    {
        if (order == K)
            return;
        K = order;
        ext_h = Matrix::Zero(d, (K + 3) * d);
        ext_v = Matrix::Zero((K + 3) * d, d);
    }

    // y = bordered hierarchy operator applied to x
    void apply(const Matrix& x, Matrix& y, double delta)
    {
        // extended copies: slot j holds X_{j-1}; X_{-1} = X_1^+, X_{K+1} = 0
        if (K > 0) {
            ext_h.leftCols(d) = x.middleCols(d, d).adjoint();
            ext_v.topRows(d) = x.middleCols(d, d).adjoint();
        }
        ext_h.middleCols(d, (K + 1) * d) = x;
        for (int k = 0; k <= K; ++k)
            ext_v.middleRows((k + 1) * d, d) = x.middleCols(k * d, d);

        y.resize(d, (K + 1) * d);
        for (int k = 0; k <= K; ++k) {
            auto yk = y.middleCols(k * d, d);
            yk.noalias() = left * ext_v.middleRows(k * d, 3 * d);
            yk.noalias() += ext_h.middleCols(k * d, 3 * d) * right;
            yk += (I * (k * delta)) * x.middleCols(k * d, d);
            for (const auto& g : gathers)
                g.sandwich_add(x.middleCols(k * d, d), yk);
            for (std::size_t j = 0; j < C.size(); ++j) {
                t1.noalias() = x.middleCols(k * d, d) * Cd[j];
                yk.noalias() += C[j] * t1;
            }
        }
        y(0, 0) += x.leftCols(d).trace();
    }

    void precondition(const Matrix& x, Matrix& z)
    {
        z.resize(d, (K + 1) * d);
        for (int k = 0; k <= K; ++k) {
            t1.noalias() = basis.Rinv * x.middleCols(k * d, d);
            t2.noalias() = t1 * basis.RinvH;
            t2.array() *= invden[k].array();
            t1.noalias() = basis.R * t2;
            z.middleCols(k * d, d).noalias() = t1 * basis.RH;
        }
    }

    BlochSolution krylov(double delta, const BlochSolution* guess)
    {
        invden.clear();
        for (int k = 0; k <= K; ++k)
            invden.push_back(basis.inverse_denominator(k * delta));

        const int m = std::max(2, opt.restart);
        if (static_cast<int>(Vb.size()) < m + 1) {
            Vb.resize(m + 1);
            Zb.resize(m);
        }

        Matrix x = Matrix::Zero(d, (K + 1) * d);
        if (guess && guess->space == me.space)
            for (int k = 0; k <= std::min(K, guess->order); ++k)
                x.middleCols(k * d, d) = guess->block(k);

        Matrix w;
        int total = 0;
        double rel = 0.0;
        Eigen::MatrixXd Hh(m + 1, m);
        Eigen::VectorXd cs(m), sn(m), g(m + 1);
        while (true) {
            apply(x, w, delta);
            w = -w;
            w(0, 0) += 1.0; // right-hand side: unit (0,0) entry of block 0
            const double beta = std::sqrt(inner(w, w, d));
            rel = beta;
            if (rel <= opt.tol || total >= opt.max_iter)
                break;

            Vb[0] = w / beta;
            Hh.setZero();
            g.setZero();
            g(0) = beta;
            int j = 0;
            for (; j < m && total < opt.max_iter; ++j, ++total) {
                precondition(Vb[j], Zb[j]);
                apply(Zb[j], w, delta);
                // modified Gram-Schmidt, twice
                for (int pass = 0; pass < 2; ++pass)
                    for (int i = 0; i <= j; ++i) {
                        const double c = inner(Vb[i], w, d);
                        Hh(i, j) += c;
                        w -= c * Vb[i];
                    }
                const double hnext = std::sqrt(inner(w, w, d));
                Hh(j + 1, j) = hnext;
                for (int i = 0; i < j; ++i) {
                    const double t = cs(i) * Hh(i, j) + sn(i) * Hh(i + 1, j);
                    Hh(i + 1, j) = -sn(i) * Hh(i, j) + cs(i) * Hh(i + 1, j);
                    Hh(i, j) = t;
                }
                const double rr = std::hypot(Hh(j, j), Hh(j + 1, j));
                cs(j) = rr > 0 ? Hh(j, j) / rr : 1.0;
                sn(j) = rr > 0 ? Hh(j + 1, j) / rr : 0.0;
                Hh(j, j) = rr;
                Hh(j + 1, j) = 0.0;
                g(j + 1) = -sn(j) * g(j);
                g(j) = cs(j) * g(j);
                if (hnext > 0.0)
                    Vb[j + 1] = w / hnext;
                if (std::abs(g(j + 1)) <= 0.1 * opt.tol || hnext == 0.0) {
                    ++j;
                    ++total;
                    break;
                }
            }
            const Eigen::VectorXd y = Hh.topLeftCorner(j, j)
                                          .triangularView<Eigen::Upper>()
                                          .solve(g.head(j));
            if (!y.allFinite())
                throw SolverFailure("Krylov iteration broke down");
            for (int i = 0; i < j; ++i)
                x += y(i) * Zb[i];
        }
        if (rel > std::max(opt.tol, 1e-9))
            throw SolverFailure("hierarchy solve stalled at relative residual " +
                                std::to_string(rel));

        BlochSolution sol{me.space, K, delta, {}, total, 0.0};
        sol.blocks.resize(2 * K + 1);
        for (int k = 0; k <= K; ++k) {
            sol.blocks[K + k] = x.middleCols(k * d, d);
            sol.blocks[K - k] = x.middleCols(k * d, d).adjoint();
        }
        return sol;
    }
};

HierarchySolver::HierarchySolver(const MasterEquation& me, int K, const SolverOptions& opt)
{
    if (K < 0)
        throw std::invalid_argument("Bloch order must be >= 0");
    if (opt.adaptive_order && opt.max_order < K)
        throw std::invalid_argument("maximum Bloch order below the requested order");
    if (!(me.H.rows() == me.space.dim() && me.V.rows() == me.space.dim()))
        throw DimensionMismatch("master equation operators do not match the space");
    impl_ = std::make_unique<Impl>(me, K, opt);
}

HierarchySolver::~HierarchySolver() = default;
HierarchySolver::HierarchySolver(HierarchySolver&&) noexcept = default;
HierarchySolver& HierarchySolver::operator=(HierarchySolver&&) noexcept = default;

const MasterEquation& HierarchySolver::equation() const { return impl_->me; }
int HierarchySolver::order() const { return impl_->min_order; }

double truncation_error(const BlochSolution& s)
{
    return s.order == 0 ? 0.0 : s.block(s.order).cwiseAbs().maxCoeff();
}

BlochSolution HierarchySolver::solve_fixed(double delta, int K, const BlochSolution* guess)
{
    auto& im = *impl_;
    const auto& me = im.me;
    if (K < 0)
        throw std::invalid_argument("Bloch order must be >= 0");
    if (!std::isfinite(delta))
        throw std::invalid_argument("delta must be finite");
    const double scale = 1.0 + me.H.cwiseAbs().maxCoeff();
    if (K > 0 && std::abs(delta) < 1e-9 * scale)
        throw SingularHierarchy("delta = 0: the two fields share a frequency and the harmonic "
                                "hierarchy has no unique solution");
    if (im.opt.method != SolverMethod::Dense)
        im.set_order(K);
    BlochSolution sol = im.opt.method == SolverMethod::Dense ? solve_dense(me, delta, K)
                                                            : im.krylov(delta, guess);
    const cplx tr = sol.block(0).trace();
    if (!(std::abs(tr) > 1e-14))
        throw SingularHierarchy("steady state has vanishing trace");
    for (auto& b : sol.blocks)
        b /= tr;
    sol.residual = hierarchy_residual(me, sol);
    sol.truncation = truncation_error(sol);
    return sol;
}

BlochSolution HierarchySolver::solve(double delta, const BlochSolution* guess)
{
    auto& im = *impl_;
    if (!im.opt.adaptive_order)
        return solve_fixed(delta, im.min_order, guess);
    // start from the order the previous call settled on, grow until the
    // outermost harmonic is negligible
    int K = std::max(im.min_order, im.hint);
    int iterations = 0;
    BlochSolution sol = solve_fixed(delta, K, guess);
    iterations += sol.iterations;
    while (sol.truncation > im.opt.truncation_tol) {
        if (K >= im.opt.max_order)
            throw SolverFailure("Bloch hierarchy not converged at order " + std::to_string(K) +
                                " (outer harmonic " + std::to_string(sol.truncation) + ")");
        ++K;
        BlochSolution prev = std::move(sol);
        sol = solve_fixed(delta, K, &prev);
        iterations += sol.iterations;
    }
    sol.iterations = iterations;
    // next call: the lowest order whose block is already below tolerance
    int next = K;
    while (next > im.min_order && next > 0 &&
           sol.block(next - 1).cwiseAbs().maxCoeff() <= im.opt.truncation_tol)
        --next;
    im.hint = next;
    return sol;
}

BlochSolution solve_hierarchy(const MasterEquation& me, double delta, int K,
                              const SolverOptions& opt, const BlochSolution* guess)
{
    return HierarchySolver(me, K, opt).solve(delta, guess);
}

BlochSolution steady_state(const SystemConfig& cfg, double delta, int K, const SolverOptions& opt)
{
    return solve_hierarchy(master_equation(cfg), delta, K, opt);
}

double hierarchy_residual(const MasterEquation& me, const BlochSolution& sol)
{
    const int K = sol.order;
    double worst = 0.0;
    for (int k = -K; k <= K; ++k) {
        Matrix r = apply_L0(me, sol.block(k)) + (I * (k * sol.delta)) * sol.block(k);
        if (k > -K)
            r += apply_Lplus(me, sol.block(k - 1));
        if (k < K)
            r += apply_Lminus(me, sol.block(k + 1));
        worst = std::max(worst, r.norm());
    }
    return worst;
}

// ---------------------------------------------------------------- time integration

static Sparse sparse_of(const Matrix& A)
{
    return A.sparseView(1.0, 1e-300);
}

DensityMatrix time_propagate_oracle(const MasterEquation& me, double delta,
                                    const PropagationOptions& opt)
{
    if (!(delta > 0.0 || delta < 0.0))
        throw std::invalid_argument("period averaging needs delta != 0");
    const double period = 2.0 * std::numbers::pi / std::abs(delta);
    const int per = std::max(opt.steps_per_period_min,
                             static_cast<int>(std::ceil(period / opt.dt_max)));
    const double dt = period / per;
    const long nsteps = static_cast<long>(std::ceil(opt.t_final / dt));

    const Sparse H = sparse_of(me.H), Hd = sparse_of(me.H.adjoint());
    const Sparse V = sparse_of(me.V), Vd = sparse_of(me.V.adjoint());
    std::vector<Sparse> C, Cd;
    for (const auto& c : me.jumps) {
        C.push_back(sparse_of(c));
        Cd.push_back(sparse_of(c.adjoint()));
    }
    auto rhs = [&](double t, const Matrix& X) {
        Matrix y = -I * (H * X - X * Hd);
        for (std::size_t j = 0; j < C.size(); ++j)
            y += C[j] * (X * Cd[j]);
        const cplx ep = std::polar(1.0, -delta * t);
        y += (-I * ep) * (V * X - X * V);
        y += (-I * std::conj(ep)) * (Vd * X - X * Vd);
        return y;
    };

    const int d = me.space.dim();
    Matrix rho = Matrix::Zero(d, d);
    rho(0, 0) = 1.0;
    Matrix avg = Matrix::Zero(d, d);
    const long start_avg = nsteps - per;
    double t = 0.0;
    for (long s = 0; s < nsteps; ++s) {
        // left-point sum over one full period is exact for the harmonics
        if (s >= start_avg)
            avg += rho;
        const Matrix k1 = rhs(t, rho);
        const Matrix k2 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k1);
        const Matrix k3 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k2);
        const Matrix k4 = rhs(t + dt, rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        if (std::abs(rho.trace() - 1.0) > 1e-6 || !rho.allFinite())
            throw SolverFailure("time step too large: trace drifted by " +
                                std::to_string(std::abs(rho.trace() - 1.0)));
    }
    avg /= double(per);
    return {me.space, avg};
}

DensityMatrix time_propagate_oracle(const SystemConfig& cfg, double delta,
                                    const PropagationOptions& opt)
{
    return time_propagate_oracle(master_equation(cfg), delta, opt);
}

} // namespace pcs
