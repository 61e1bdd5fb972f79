#include "pcs/suppression.hpp"

#include <algorithm>

namespace pcs {

std::string TransitionSelector::str() const
{
    return std::string(field == DriveField::Fixed ? "fixed" : "scan") + ":" + bra.str() + "~" +
           ket.str();
}

SelectorParseError::SelectorParseError(const std::string& text, std::size_t pos,
                                       const std::string& why)
    : std::invalid_argument("selector '" + text + "' at position " + std::to_string(pos) + ": " +
                            why),
      position(pos)
{
}

TransitionSelector parse_selector(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw SelectorParseError(text, 0, "expected 'fixed:' or 'scan:'");
    const std::string field = text.substr(0, colon);
    TransitionSelector s;
    if (field == "fixed")
        s.field = DriveField::Fixed;
    else if (field == "scan")
        s.field = DriveField::Scanning;
    else
        throw SelectorParseError(text, 0, "field must be 'fixed' or 'scan'");
    const auto tilde = text.find('~', colon + 1);
    if (tilde == std::string::npos)
        throw SelectorParseError(text, colon + 1, "expected bra~ket");
    auto label = [&](std::size_t from, std::size_t to) {
        try {
            return DressedLabel::parse(text.substr(from, to - from));
        } catch (const std::invalid_argument& e) {
            throw SelectorParseError(text, from, e.what());
        }
    };
    s.bra = label(colon + 1, tilde);
    s.ket = label(tilde + 1, text.size());
    if (s.bra == s.ket)
        throw SelectorParseError(text, tilde, "bra and ket must differ");
    return s;
}

std::vector<TransitionSelector> parse_selectors(const std::vector<std::string>& texts)
{
    std::vector<TransitionSelector> out;
    for (const auto& t : texts)
        out.push_back(parse_selector(t));
    return out;
}

static void check_unitary(const DressedBasis& basis)
{
    const auto n = basis.U.cols();
    if (basis.U.rows() != n)
        throw DimensionMismatch("dressed basis is not square");
    const double err = (basis.U.adjoint() * basis.U - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (err > 1e-10)
        throw std::invalid_argument("dressed basis is not orthonormal (error " +
                                    std::to_string(err) + ")");
}

OperatorMatrix to_dressed_basis(const OperatorMatrix& op, const DressedBasis& basis)
{
    check_unitary(basis);
    if (basis.U.rows() != op.space().dim())
        throw DimensionMismatch("operator and basis live on different spaces");
    return {op.space(), basis.U.adjoint() * op.mat() * basis.U};
}

OperatorMatrix from_dressed_basis(const OperatorMatrix& op, const DressedBasis& basis)
{
    check_unitary(basis);
    if (basis.U.rows() != op.space().dim())
        throw DimensionMismatch("operator and basis live on different spaces");
    return {op.space(), basis.U * op.mat() * basis.U.adjoint()};
}

OperatorMatrix suppress(const OperatorMatrix& op_dressed, const DressedBasis& basis,
                        const std::vector<TransitionSelector>& selectors, DriveField field)
{
    OperatorMatrix out = op_dressed;
    for (const auto& s : selectors) {
        const int i = basis.find(s.bra), j = basis.find(s.ket);
        if (i < 0 || j < 0)
            throw UnresolvedSelector("selector " + s.str() + " names a state absent here");
        if (s.field != field)
            continue;
        out.mat()(i, j) = 0.0;
        out.mat()(j, i) = 0.0;
    }
    return out;
}

MasterEquation suppressed_master_equation(const SystemConfig& cfg,
                                          const std::vector<TransitionSelector>& selectors)
{
    auto has = [&](DriveField f) {
        return std::any_of(selectors.begin(), selectors.end(),
                           [&](const auto& s) { return s.field == f; });
    };
    if (selectors.empty())
        return master_equation(cfg);
    const auto space = cfg.space();
    const auto basis = dressed_basis(cfg);
    auto fixed = build_drive(space, cfg.fixed_drive);
    auto scan = drive_raising(space, cfg.scan_drive);
    // resolve every selector even if its field is untouched
    suppress(OperatorMatrix::zero(space), basis, selectors, DriveField::Fixed);
    if (has(DriveField::Fixed))
        fixed = from_dressed_basis(
            suppress(to_dressed_basis(fixed, basis), basis, selectors, DriveField::Fixed), basis);
    // zeroing (i,j) and (j,i) of the raising half also removes them from its
    // adjoint, so both e^{-i delta t} and e^{+i delta t} parts lose the element
    if (has(DriveField::Scanning))
        scan = from_dressed_basis(
            suppress(to_dressed_basis(scan, basis), basis, selectors, DriveField::Scanning), basis);
    return master_equation(cfg, fixed, scan);
}

LiouvillianBlocks rebuild_with_suppression(const SystemConfig& cfg,
                                           const std::vector<TransitionSelector>& selectors)
{
    return assemble_blocks(suppressed_master_equation(cfg, selectors));
}

} // namespace pcs
