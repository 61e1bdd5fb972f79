#pragma once

#include "pcs/dressed_states.hpp"
#include "pcs/liouvillian.hpp"

#include <string>
#include <vector>

namespace pcs {

enum class DriveField { Fixed, Scanning };

// One dressed-basis drive element (and its conjugate) to remove.
// Text form: "fixed:0~1-", "scan:1-~2++".
struct TransitionSelector {
    DriveField field = DriveField::Fixed;
    DressedLabel bra;
    DressedLabel ket;

    std::string str() const;
    bool operator==(const TransitionSelector&) const = default;
};

struct SelectorParseError : std::invalid_argument {
    SelectorParseError(const std::string& text, std::size_t pos, const std::string& why);
    std::size_t position;
};
struct UnresolvedSelector : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

TransitionSelector parse_selector(const std::string& text);
std::vector<TransitionSelector> parse_selectors(const std::vector<std::string>& texts);

// U^+ op U with U the columns of the basis; throws if U is not unitary.
OperatorMatrix to_dressed_basis(const OperatorMatrix& op, const DressedBasis& basis);
OperatorMatrix from_dressed_basis(const OperatorMatrix& op, const DressedBasis& basis);

// Zeroes the selected elements of the given field and their transposed
// partners; everything else is left bit-identical.
OperatorMatrix suppress(const OperatorMatrix& op_dressed, const DressedBasis& basis,
                        const std::vector<TransitionSelector>& selectors, DriveField field);

// Master equation with the selected drive elements removed. A field without
// selectors keeps its original operator, so empty selectors reproduce
// master_equation(cfg) exactly. Jump operators are never touched.
MasterEquation suppressed_master_equation(const SystemConfig& cfg,
                                          const std::vector<TransitionSelector>& selectors);
LiouvillianBlocks rebuild_with_suppression(const SystemConfig& cfg,
                                           const std::vector<TransitionSelector>& selectors);

} // namespace pcs
