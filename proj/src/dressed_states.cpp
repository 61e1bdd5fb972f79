#include "pcs/dressed_states.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace pcs {

std::string DressedLabel::str() const
{
    std::string s = std::to_string(quanta);
    if (sub == 9)
        return s + "#" + std::to_string(branch);
    if (quanta == 0)
        return s;
    s += branch > 0 ? "+" : branch < 0 ? "-" : "0";
    if (sub != 0)
        s += sub > 0 ? "+" : "-";
    return s;
}

DressedLabel DressedLabel::parse(const std::string& s)
{
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        ++i;
    if (i == 0)
        throw std::invalid_argument("dressed label '" + s + "' must start with a quanta count");
    // "10" is the middle triplet state: a bare count is only valid for 0
    if (i == s.size() && i > 1 && s.back() == '0')
        --i;
    DressedLabel l;
    l.quanta = std::stoi(s.substr(0, i));
    const std::string rest = s.substr(i);
    auto sign = [&](char c) {
        if (c == '+')
            return 1;
        if (c == '-')
            return -1;
        if (c == '0')
            return 0;
        throw std::invalid_argument("bad branch character '" + std::string(1, c) + "' in label '" +
                                    s + "'");
    };
    if (rest.empty()) {
        if (l.quanta != 0)
            throw std::invalid_argument("label '" + s + "' needs a branch sign");
        return l;
    }
    if (!rest.empty() && rest[0] == '#') {
        l.sub = 9;
        l.branch = std::stoi(rest.substr(1));
        return l;
    }
    if (l.quanta == 0 || rest.size() > 2)
        throw std::invalid_argument("malformed dressed label '" + s + "'");
    l.branch = sign(rest[0]);
    if (rest.size() == 2) {
        l.sub = sign(rest[1]);
        if (l.branch == 0 || l.sub == 0)
            throw std::invalid_argument("quadruplet label '" + s + "' takes two +/- signs");
    }
    return l;
}

void fix_phase(Vector& v)
{
    double best = -1.0;
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > best * (1.0 + 1e-12)) {
            best = std::abs(v(i));
            k = i;
        }
    if (best > 0.0)
        v *= std::conj(v(k)) / best;
}

static DressedState make_state(DressedLabel l, double lam, Vector v)
{
    v.normalize();
    fix_phase(v);
    return {l, lam, std::move(v)};
}

DressedState ground_state(const CompositeSpace& space)
{
    Vector v = Vector::Zero(space.dim());
    v(0) = 1.0;
    return {DressedLabel{}, 0.0, v};
}

std::pair<DressedState, DressedState> jc_ladder(const CompositeSpace& space, double g, int n)
{
    if (space.atom_count() != 1)
        throw DimensionMismatch("the couplet ladder needs a single-atom space");
    if (n < 1 || n > space.fock_cutoff())
        throw std::out_of_range("couplet index outside the truncated space");
    if (g < 0.0)
        throw std::invalid_argument("coupling must be >= 0");
    const int ie = space.index(n - 1, {1});
    const int ig = space.index(n, {0});
    const double lam = std::sqrt(double(n)) * g;
    auto build = [&](int eps) {
        // (i/sqrt2)(|n-1,e> + eps i |n,g>)
        Vector v = Vector::Zero(space.dim());
        v(ie) = I / std::sqrt(2.0);
        v(ig) = -double(eps) / std::sqrt(2.0);
        return make_state({n, eps, 0}, eps * lam, v);
    };
    return {build(-1), build(+1)};
}

static void require_pair(const CompositeSpace& space, int quanta)
{
    if (space.atom_count() != 2)
        throw DimensionMismatch("two-atom ladder needs a two-atom space");
    if (quanta > space.fock_cutoff())
        throw std::out_of_range("multiplet not contained in the truncated space");
}

std::vector<DressedState> triplet(const CompositeSpace& space, double g1, double g2)
{
    require_pair(space, 1);
    if (g1 < 0.0 || g2 < 0.0)
        throw std::invalid_argument("couplings must be >= 0");
    const double gt = std::hypot(g1, g2);
    if (gt == 0.0)
        throw DegenerateCouplings("g1 = g2 = 0: one-quantum states are fully degenerate");
    const int i1gg = space.index(1, {0, 0});
    const int ieg = space.index(0, {1, 0});
    const int ige = space.index(0, {0, 1});
    std::vector<DressedState> out;
    for (int eps : {-1, 0, 1}) {
        Vector v = Vector::Zero(space.dim());
        if (eps == 0) {
            v(ieg) = g2 / gt;
            v(ige) = -g1 / gt;
        } else {
            v(i1gg) = double(eps) * I / std::sqrt(2.0);
            v(ieg) = g1 / (std::sqrt(2.0) * gt);
            v(ige) = g2 / (std::sqrt(2.0) * gt);
        }
        out.push_back(make_state({1, eps, 0}, eps * gt, v));
    }
    return out;
}

namespace {

// Everything needed for the n-th quadruplet, written so that no difference of
// nearly equal numbers is formed. u - v enters only through its square and sign.
struct QuadTerms {
    double xi, P[2], A, B, G;
};

QuadTerms quad_terms(int n, double g1, double g2)
{
    const double u = g1 * g1, v = g2 * g2, G = u + v, d = u - v;
    QuadTerms t{};
    t.G = G;
    t.xi = std::sqrt((2 * n + 1.0) * (2 * n + 1.0) * G * G - 4.0 * n * (n + 1.0) * d * d);
    t.P[0] = (2 * n + 1.0) * G + t.xi;
    t.P[1] = t.P[0] > 0.0 ? 4.0 * n * (n + 1.0) * d * d / t.P[0] : 0.0;
    t.A = v + (1 + 4.0 * n) * u;
    t.B = u + (1 + 4.0 * n) * v;
    return t;
}

} // namespace

LadderCoefficients ladder_coefficients(int n, double g1, double g2)
{
    if (n < 1)
        throw std::out_of_range("quadruplet index starts at 1");
    const auto t = quad_terms(n, g1, g2);
    const double r = std::sqrt(n * (n + 1.0));
    const double sgn = g1 >= g2 ? 1.0 : -1.0;
    LadderCoefficients c;
    c.xi = t.xi;
    // outer root
    c.lambda_p[0] = -(t.G + t.xi) / (4 * g1 * g2 * r);
    const double Dp = std::sqrt(2.0 * n * t.P[0]);
    c.zeta_ge[0] = (t.A + t.xi) / (2 * g1 * Dp);
    c.zeta_eg[0] = (t.B + t.xi) / (2 * g2 * Dp);
    // inner root
    c.lambda_p[1] = 4 * r * g1 * g2 / (t.G + t.xi);
    const double q = std::sqrt(8.0 * n * n * (n + 1.0) / t.P[0]);
    c.zeta_ge[1] = sgn * 4.0 * n * (2 * n + 1.0) * g1 / ((t.A + t.xi) * q);
    c.zeta_eg[1] = -sgn * 4.0 * n * (2 * n + 1.0) * g2 / ((t.B + t.xi) * q);
    for (int k = 0; k < 2; ++k)
        c.norm[k] = c.lambda_p[k] * c.lambda_p[k] + c.zeta_ge[k] * c.zeta_ge[k] +
                    c.zeta_eg[k] * c.zeta_eg[k] + 1.0;
    return c;
}

std::vector<DressedState> quadruplet(const CompositeSpace& space, int n, double g1, double g2)
{
    if (n < 1)
        throw std::out_of_range("quadruplet index starts at 1");
    require_pair(space, n + 1);
    if (g1 < 0.0 || g2 < 0.0)
        throw std::invalid_argument("couplings must be >= 0");
    if (g1 == 0.0 && g2 == 0.0)
        throw DegenerateCouplings("g1 = g2 = 0: quadruplet is fully degenerate");
    const auto t = quad_terms(n, g1, g2);
    const int igg = space.index(n + 1, {0, 0});
    const int ige = space.index(n, {0, 1});
    const int ieg = space.index(n, {1, 0});
    const int iee = space.index(n - 1, {1, 1});
    const double r = std::sqrt(n * (n + 1.0));
    const double sgn = g1 >= g2 ? 1.0 : -1.0;

    // amplitudes on (gg, ge, eg, ee); the ge and eg entries get a factor eps*i
    double amp[2][4];
    {
        // outer root, rescaled by g1*g2 so a vanishing coupling is harmless
        const double Dp = std::sqrt(2.0 * n * t.P[0]);
        amp[0][0] = -(t.G + t.xi) / (4 * r);
        amp[0][1] = g2 * (t.A + t.xi) / (2 * Dp);
        amp[0][2] = g1 * (t.B + t.xi) / (2 * Dp);
        amp[0][3] = g1 * g2;
        // inner root; at g1 = g2 the limit is taken from the g1 > g2 side
        const double q = std::sqrt(8.0 * n * n * (n + 1.0) / t.P[0]);
        amp[1][0] = 4 * r * g1 * g2 / (t.G + t.xi);
        amp[1][1] = sgn * 4.0 * n * (2 * n + 1.0) * g1 / ((t.A + t.xi) * q);
        amp[1][2] = -sgn * 4.0 * n * (2 * n + 1.0) * g2 / ((t.B + t.xi) * q);
        amp[1][3] = 1.0;
    }

    std::vector<DressedState> out;
    // ascending: -+, --, +-, ++
    const int order[4][2] = {{-1, +1}, {-1, -1}, {+1, -1}, {+1, +1}};
    for (const auto& o : order) {
        const int eps = o[0], sub = o[1];
        const auto& a = amp[sub > 0 ? 0 : 1];
        Vector v = Vector::Zero(space.dim());
        v(igg) = a[0];
        v(ige) = double(eps) * I * a[1];
        v(ieg) = double(eps) * I * a[2];
        v(iee) = a[3];
        const double lam = eps * std::sqrt(0.5 * t.P[sub > 0 ? 0 : 1]);
        out.push_back(make_state({n + 1, eps, sub}, lam, v));
    }
    return out;
}

std::vector<Eigenpair> numeric_eigensystem(const Matrix& H)
{
    if (H.rows() != H.cols())
        throw DimensionMismatch("eigensystem of a non-square matrix");
    if (H.size() == 0)
        return {};
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("numeric_eigensystem needs a Hermitian matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    std::vector<Eigenpair> out;
    for (Eigen::Index k = 0; k < H.rows(); ++k) {
        Vector v = es.eigenvectors().col(k);
        fix_phase(v);
        out.push_back({es.eigenvalues()(k), std::move(v)});
    }
    return out;
}

std::vector<Eigenpair> numeric_eigensystem(const OperatorMatrix& H)
{
    return numeric_eigensystem(H.mat());
}

std::vector<Eigenpair> sector_eigensystem(const OperatorMatrix& H, int quanta)
{
    const auto idx = excitation_sector(H.space(), quanta);
    const int m = static_cast<int>(idx.size());
    Matrix block(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            block(r, c) = H(idx[r], idx[c]);
    auto pairs = numeric_eigensystem(block);
    for (auto& p : pairs) {
        Vector full = Vector::Zero(H.space().dim());
        for (int r = 0; r < m; ++r)
            full(idx[r]) = p.vec(r);
        p.vec = std::move(full);
    }
    return pairs;
}

int DressedBasis::find(const DressedLabel& l) const
{
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].label == l)
            return static_cast<int>(i);
    return -1;
}

static std::vector<DressedState> analytic_sector(const SystemConfig& cfg,
                                                 const CompositeSpace& space, int q)
{
    const int N = space.atom_count();
    if (q == 0)
        return {ground_state(space)};
    if (q > space.fock_cutoff())
        return {};
    if (N == 1) {
        auto [m, p] = jc_ladder(space, cfg.couplings[0], q);
        return {m, p};
    }
    if (N == 2) {
        const double g1 = cfg.couplings[0], g2 = cfg.couplings[1];
        if (g1 == 0.0 && g2 == 0.0)
            return {};
        return q == 1 ? triplet(space, g1, g2) : quadruplet(space, q - 1, g1, g2);
    }
    return {};
}

DressedBasis dressed_basis(const SystemConfig& cfg)
{
    const auto space = cfg.space();
    const auto H = build_H(cfg);
    const double scale = std::max(1.0, H.mat().cwiseAbs().maxCoeff());
    DressedBasis basis;
    const int qmax = space.fock_cutoff() + space.atom_count();
    for (int q = 0; q <= qmax; ++q) {
        const auto numeric = sector_eigensystem(H, q);
        auto analytic = analytic_sector(cfg, space, q);
        bool use_analytic = analytic.size() == numeric.size() && !analytic.empty();
        if (use_analytic) {
            for (std::size_t k = 0; k < analytic.size(); ++k) {
                const auto& s = analytic[k];
                const double res = (H.mat() * s.coeffs - s.eigenvalue * s.coeffs).norm();
                if (res > 1e-9 * scale || std::abs(s.eigenvalue - numeric[k].value) > 1e-9 * scale) {
                    basis.diagnostics.push_back("sector " + std::to_string(q) +
                                                ": closed-form state " + s.label.str() +
                                                " disagrees with diagonalisation, using numeric order");
                    use_analytic = false;
                    break;
                }
            }
        }
        if (use_analytic) {
            for (auto& s : analytic)
                basis.states.push_back(std::move(s));
            continue;
        }
        for (std::size_t k = 0; k < numeric.size(); ++k) {
            DressedLabel l{q, static_cast<int>(k), 9};
            basis.states.push_back({l, numeric[k].value, numeric[k].vec});
        }
    }
    basis.U = Matrix(space.dim(), space.dim());
    for (int k = 0; k < space.dim(); ++k)
        basis.U.col(k) = basis.states[k].coeffs;
    return basis;
}

ResonanceInfo resonance_detuning(const Pathway& p, double g1, double g2, double g_f)
{
    if (g_f == 0.0)
        throw std::invalid_argument("normalised detuning needs g_f != 0");
    if (p.intermediate.quanta != 1 || p.final_state.quanta != 2)
        throw std::invalid_argument("pathway must go ground -> one quantum -> two quanta");
    const CompositeSpace space(2, 2);
    const auto one = triplet(space, g1, g2);
    const auto two = quadruplet(space, 1, g1, g2);
    auto pick = [](const std::vector<DressedState>& v, const DressedLabel& l) {
        for (const auto& s : v)
            if (s.label == l)
                return s;
        throw std::invalid_argument("unknown dressed label " + l.str());
    };
    const auto inter = pick(one, p.intermediate);
    const auto fin = pick(two, p.final_state);
    const auto drive = build_drive(space, 1.0).mat();
    const Vector g0 = ground_state(space).coeffs;

    ResonanceInfo r;
    r.first_element = std::abs(inter.coeffs.dot(drive * g0));
    r.second_element = std::abs(fin.coeffs.dot(drive * inter.coeffs));
    if (p.ordering == Ordering::FixedFirst) {
        r.delta_tilde = (fin.eigenvalue - inter.eigenvalue) / g_f;
        r.fixed_step_mismatch = inter.eigenvalue + g_f;
    } else {
        r.delta_tilde = inter.eigenvalue / g_f;
        r.fixed_step_mismatch = fin.eigenvalue - inter.eigenvalue + g_f;
    }
    if (std::abs(inter.coeffs(space.index(1, {0, 0}))) < 1e-12)
        r.warnings.push_back("intermediate state has no photonic component");
    if (r.first_element < 1e-12)
        r.warnings.push_back("first step is dark: <inter|Upsilon|0> = 0");
    if (r.second_element < 1e-12)
        r.warnings.push_back("second step is dark: <final|Upsilon|inter> = 0");
    return r;
}

} // namespace pcs
