#pragma once

#include <stdexcept>
#include <string>

namespace crlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define CRLAB_DEFINE_ERROR(Name)                \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    };

CRLAB_DEFINE_ERROR(InvalidGrid)
CRLAB_DEFINE_ERROR(DimensionMismatch)
CRLAB_DEFINE_ERROR(SingularFrame)
CRLAB_DEFINE_ERROR(StructureResidual)
CRLAB_DEFINE_ERROR(NormalizationFailure)
CRLAB_DEFINE_ERROR(StepTooLarge)
CRLAB_DEFINE_ERROR(FrameMismatch)
CRLAB_DEFINE_ERROR(ZeroDenominator)
CRLAB_DEFINE_ERROR(NoComplexStructure)
CRLAB_DEFINE_ERROR(PoleReached)
CRLAB_DEFINE_ERROR(NotFlatModel)
CRLAB_DEFINE_ERROR(StepCollapse)
CRLAB_DEFINE_ERROR(UnknownVariable)
CRLAB_DEFINE_ERROR(DivisionByZero)
CRLAB_DEFINE_ERROR(ConfigError)

#undef CRLAB_DEFINE_ERROR

} // namespace crlab
