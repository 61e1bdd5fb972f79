#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcs {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx I{0.0, 1.0};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Truncated cavity mode tensored with N two-level atoms.
// Ordering is cavity-major: index = n * 2^N + bits, atom 1 is the most
// significant bit, |g> = 0 and |e> = 1.
class CompositeSpace {
public:
    CompositeSpace(int fock_cutoff, int atom_count);

    int fock_cutoff() const { return nmax_; }
    int atom_count() const { return atoms_; }
    int cavity_dim() const { return nmax_ + 1; }
    int atom_block() const { return 1 << atoms_; }
    int dim() const { return (nmax_ + 1) << atoms_; }

    int index(int photons, const std::vector<int>& levels) const;
    int photons(int idx) const { return idx >> atoms_; }
    int atom_level(int idx, int atom) const; // atom is 0-based
    int excitations(int idx) const;
    std::string ket_name(int idx) const;     // e.g. "|1,ge>"

    bool operator==(const CompositeSpace& o) const
    {
        return nmax_ == o.nmax_ && atoms_ == o.atoms_;
    }

private:
    int nmax_;
    int atoms_;
};

class OperatorMatrix {
public:
    OperatorMatrix(const CompositeSpace& space, Matrix m);
    static OperatorMatrix zero(const CompositeSpace& space);
    static OperatorMatrix identity(const CompositeSpace& space);

    const CompositeSpace& space() const { return space_; }
    const Matrix& mat() const { return m_; }
    Matrix& mat() { return m_; }
    cplx operator()(int r, int c) const { return m_(r, c); }

    OperatorMatrix adjoint() const { return {space_, m_.adjoint()}; }
    bool is_hermitian(double tol = 1e-12) const;

    OperatorMatrix& operator+=(const OperatorMatrix& o);
    OperatorMatrix& operator-=(const OperatorMatrix& o);
    OperatorMatrix& operator*=(cplx s)
    {
        m_ *= s;
        return *this;
    }

private:
    CompositeSpace space_;
    Matrix m_;
};

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(cplx s, OperatorMatrix a);
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

enum class Sigma { Minus, Plus, Z, Excited };

// slot 0 is the cavity, slot m >= 1 is atom m
OperatorMatrix embed(const CompositeSpace& space, const Matrix& local, int slot);
OperatorMatrix annihilation(const CompositeSpace& space);
OperatorMatrix number_operator(const CompositeSpace& space);
OperatorMatrix atom_sigma(const CompositeSpace& space, int atom, Sigma which);
OperatorMatrix collective_sigma(const CompositeSpace& space, Sigma which);
OperatorMatrix normal_ordered_n2(const CompositeSpace& space); // a+ a+ a a
OperatorMatrix excitation_number(const CompositeSpace& space);

// basis indices with a fixed excitation number, in increasing index order
std::vector<int> excitation_sector(const CompositeSpace& space, int quanta);

class DensityMatrix {
public:
    DensityMatrix(const CompositeSpace& space, Matrix rho);
    static DensityMatrix ground(const CompositeSpace& space);

    const CompositeSpace& space() const { return space_; }
    const Matrix& mat() const { return m_; }

    cplx trace() const { return m_.trace(); }
    double hermiticity_error() const; // max |rho - rho^+|
    double min_eigenvalue() const;
    cplx expectation(const OperatorMatrix& op) const;

private:
    CompositeSpace space_;
    Matrix m_;
};

} // namespace pcs
