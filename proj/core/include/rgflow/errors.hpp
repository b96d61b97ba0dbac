#pragma once

#include <stdexcept>
#include <string>

namespace rgflow {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RGFLOW_DEFINE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

RGFLOW_DEFINE_ERROR(InvalidArgument);
RGFLOW_DEFINE_ERROR(DimensionMismatch);
RGFLOW_DEFINE_ERROR(SingularTensor);
RGFLOW_DEFINE_ERROR(NotPositiveDefinite);
RGFLOW_DEFINE_ERROR(NonPositiveDeterminant);
RGFLOW_DEFINE_ERROR(InvalidSection);
RGFLOW_DEFINE_ERROR(NotIntegrable);
RGFLOW_DEFINE_ERROR(QuadratureOverflow);
RGFLOW_DEFINE_ERROR(NonPositiveConvolution);
RGFLOW_DEFINE_ERROR(NonPositiveValue);
RGFLOW_DEFINE_ERROR(NonPositiveScale);
RGFLOW_DEFINE_ERROR(DivergentIntegral);
RGFLOW_DEFINE_ERROR(MonotonicityViolated);

#undef RGFLOW_DEFINE_ERROR

}  // namespace rgflow
