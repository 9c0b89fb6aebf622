#pragma once

#include <stdexcept>
#include <string>

namespace crr {

// Every engine failure carries a stable kind tag (reported verbatim by the CLI).
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string &what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string &kind() const { return kind_; }

private:
    std::string kind_;
};

#define CRR_ERROR(Name)                                                                  \
    struct Name : Error {                                                                \
        explicit Name(const std::string &w) : Error(#Name, w) {}                         \
    }

CRR_ERROR(VariableMismatch);
CRR_ERROR(NonvanishingConstantTerm);
CRR_ERROR(ZeroConstantTerm);
CRR_ERROR(ConstantTermNotAdmissible);
CRR_ERROR(SingularJacobian);
CRR_ERROR(BadNormalization);
CRR_ERROR(LaurentFloor);
CRR_ERROR(NotReal);
CRR_ERROR(NotHypersurface);
CRR_ERROR(UnsupportedSegreOrder);
CRR_ERROR(NotTransversal);
CRR_ERROR(RankDeficient);
CRR_ERROR(NotMapped);
CRR_ERROR(DegenerateMap);
CRR_ERROR(NonRepresentableParameter);
CRR_ERROR(TruncationTooLow);
CRR_ERROR(RankNotStabilized);
CRR_ERROR(ParseError);
CRR_ERROR(ValidationError);

#undef CRR_ERROR

} // namespace crr
