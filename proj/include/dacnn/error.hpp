#pragma once

#include <stdexcept>
#include <string>

namespace dacnn {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define DACNN_DEFINE_ERROR(Name)                        \
    struct Name : Error {                               \
        using Error::Error;                             \
    }

// mnist-io
DACNN_DEFINE_ERROR(BadMagic);
DACNN_DEFINE_ERROR(Truncated);
DACNN_DEFINE_ERROR(DimensionMismatch);
DACNN_DEFINE_ERROR(LabelOutOfRange);
DACNN_DEFINE_ERROR(CountMismatch);

// augment
DACNN_DEFINE_ERROR(NegativeSigma);
DACNN_DEFINE_ERROR(EmptyResult);

// nn-core
DACNN_DEFINE_ERROR(ShapeMismatch);
DACNN_DEFINE_ERROR(NoForwardState);

// rbf-head
DACNN_DEFINE_ERROR(QOutOfRange);
DACNN_DEFINE_ERROR(POutOfRange);

// trainer
DACNN_DEFINE_ERROR(VersionMismatch);
DACNN_DEFINE_ERROR(Diverged);

// evaluate
DACNN_DEFINE_ERROR(EmptyRecords);
DACNN_DEFINE_ERROR(DegenerateVariance);

// quantile-regression
DACNN_DEFINE_ERROR(TauOutOfRange);
DACNN_DEFINE_ERROR(DegenerateDesign);
DACNN_DEFINE_ERROR(TooFewPoints);
DACNN_DEFINE_ERROR(NoBinsInInterval);

// cli / io
DACNN_DEFINE_ERROR(IoError);
DACNN_DEFINE_ERROR(ConfigError);

#undef DACNN_DEFINE_ERROR

}  // namespace dacnn
