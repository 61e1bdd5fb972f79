#include "pcs/fock_algebra.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace pcs {

CompositeSpace::CompositeSpace(int fock_cutoff, int atom_count)
    : nmax_(fock_cutoff), atoms_(atom_count)
{
    if (fock_cutoff < 1)
        throw std::invalid_argument("fock cutoff must be at least 1");
    if (atom_count < 0 || atom_count > 8)
        throw std::invalid_argument("atom count must be in [0, 8]");
}

int CompositeSpace::index(int photons, const std::vector<int>& levels) const
{
    if (photons < 0 || photons > nmax_)
        throw std::out_of_range("photon number outside the truncated space");
    if (static_cast<int>(levels.size()) != atoms_)
        throw DimensionMismatch("one level per atom expected");
    int bits = 0;
    for (int l : levels) {
        if (l != 0 && l != 1)
            throw std::out_of_range("atom level must be 0 or 1");
        bits = (bits << 1) | l;
    }
    return (photons << atoms_) | bits;
}

int CompositeSpace::atom_level(int idx, int atom) const
{
    return (idx >> (atoms_ - 1 - atom)) & 1;
}

int CompositeSpace::excitations(int idx) const
{
    int q = photons(idx);
    for (int m = 0; m < atoms_; ++m)
        q += atom_level(idx, m);
    return q;
}

std::string CompositeSpace::ket_name(int idx) const
{
    std::string s = "|" + std::to_string(photons(idx));
    if (atoms_ > 0) {
        s += ",";
        for (int m = 0; m < atoms_; ++m)
            s += atom_level(idx, m) ? 'e' : 'g';
    }
    return s + ">";
}

OperatorMatrix::OperatorMatrix(const CompositeSpace& space, Matrix m)
    : space_(space), m_(std::move(m))
{
    if (m_.rows() != space_.dim() || m_.cols() != space_.dim())
        throw DimensionMismatch("operator shape " + std::to_string(m_.rows()) + "x" +
                                std::to_string(m_.cols()) + " does not match space of dim " +
                                std::to_string(space_.dim()));
}

OperatorMatrix OperatorMatrix::zero(const CompositeSpace& space)
{
    return {space, Matrix::Zero(space.dim(), space.dim())};
}

OperatorMatrix OperatorMatrix::identity(const CompositeSpace& space)
{
    return {space, Matrix::Identity(space.dim(), space.dim())};
}

bool OperatorMatrix::is_hermitian(double tol) const
{
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

static void require_same(const CompositeSpace& a, const CompositeSpace& b)
{
    if (!(a == b))
        throw DimensionMismatch("operators live on different composite spaces");
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& o)
{
    require_same(space_, o.space_);
    m_ += o.m_;
    return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& o)
{
    require_same(space_, o.space_);
    m_ -= o.m_;
    return *this;
}

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b)
{
    require_same(a.space(), b.space());
    return {a.space(), a.mat() * b.mat()};
}

OperatorMatrix operator*(cplx s, OperatorMatrix a) { return a *= s; }

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b)
{
    return a * b - b * a;
}

OperatorMatrix embed(const CompositeSpace& space, const Matrix& local, int slot)
{
    if (slot < 0 || slot > space.atom_count())
        throw std::out_of_range("slot outside the composite space");
    const int ld = slot == 0 ? space.cavity_dim() : 2;
    if (local.rows() != ld || local.cols() != ld)
        throw DimensionMismatch("local operator has wrong dimension for slot " +
                                std::to_string(slot));
    const int d = space.dim();
    Matrix out = Matrix::Zero(d, d);
    // explicit loop instead of nested Kronecker products, the matrices are tiny
    auto local_index = [&](int idx) {
        return slot == 0 ? space.photons(idx) : space.atom_level(idx, slot - 1);
    };
    auto with_local = [&](int idx, int v) {
        if (slot == 0)
            return (v << space.atom_count()) | (idx & (space.atom_block() - 1));
        const int shift = space.atom_count() - slot;
        return (idx & ~(1 << shift)) | (v << shift);
    };
    for (int c = 0; c < d; ++c) {
        const int lc = local_index(c);
        for (int lr = 0; lr < ld; ++lr) {
            const cplx v = local(lr, lc);
            if (v != 0.0)
                out(with_local(c, lr), c) += v;
        }
    }
    return {space, std::move(out)};
}

OperatorMatrix annihilation(const CompositeSpace& space)
{
    const int nc = space.cavity_dim();
    Matrix a = Matrix::Zero(nc, nc);
    for (int n = 1; n < nc; ++n)
        a(n - 1, n) = std::sqrt(double(n));
    return embed(space, a, 0);
}

OperatorMatrix number_operator(const CompositeSpace& space)
{
    const auto a = annihilation(space);
    return a.adjoint() * a;
}

OperatorMatrix atom_sigma(const CompositeSpace& space, int atom, Sigma which)
{
    if (atom < 1 || atom > space.atom_count())
        throw std::out_of_range("atom index is 1-based and must exist");
    Matrix s = Matrix::Zero(2, 2);
    switch (which) {
    case Sigma::Minus: s(0, 1) = 1.0; break;
    case Sigma::Plus: s(1, 0) = 1.0; break;
    case Sigma::Z:
        s(0, 0) = -0.5;
        s(1, 1) = 0.5;
        break;
    case Sigma::Excited: s(1, 1) = 1.0; break;
    }
    return embed(space, s, atom);
}

OperatorMatrix collective_sigma(const CompositeSpace& space, Sigma which)
{
    auto out = OperatorMatrix::zero(space);
    for (int m = 1; m <= space.atom_count(); ++m)
        out += atom_sigma(space, m, which);
    return out;
}

OperatorMatrix normal_ordered_n2(const CompositeSpace& space)
{
    const auto a = annihilation(space);
    const auto ad = a.adjoint();
    return ad * ad * a * a;
}

OperatorMatrix excitation_number(const CompositeSpace& space)
{
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int i = 0; i < space.dim(); ++i)
        m(i, i) = space.excitations(i);
    return {space, std::move(m)};
}

std::vector<int> excitation_sector(const CompositeSpace& space, int quanta)
{
    std::vector<int> idx;
    for (int i = 0; i < space.dim(); ++i)
        if (space.excitations(i) == quanta)
            idx.push_back(i);
    return idx;
}

DensityMatrix::DensityMatrix(const CompositeSpace& space, Matrix rho)
    : space_(space), m_(std::move(rho))
{
    if (m_.rows() != space_.dim() || m_.cols() != space_.dim())
        throw DimensionMismatch("density matrix does not match the space");
}

DensityMatrix DensityMatrix::ground(const CompositeSpace& space)
{
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    m(0, 0) = 1.0;
    return {space, std::move(m)};
}

double DensityMatrix::hermiticity_error() const
{
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const
{
    const Matrix h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

cplx DensityMatrix::expectation(const OperatorMatrix& op) const
{
    if (!(op.space() == space_))
        throw DimensionMismatch("observable and state live on different spaces");
    return (m_ * op.mat()).trace();
}

} // namespace pcs
