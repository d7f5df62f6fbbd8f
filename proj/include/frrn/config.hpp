#pragma once

// Scalar type selection. The default build uses 32-bit floats; defining
// FRRN_DOUBLE switches every tensor to 64-bit, which is used for
// finite-difference gradient checks. Each build gets its own inline
// namespace so both can coexist in one executable.

#ifdef FRRN_DOUBLE
#define FRRN_ABI_NAMESPACE f64
#else
#define FRRN_ABI_NAMESPACE f32
#endif

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

#ifdef FRRN_DOUBLE
using Real = double;
#else
using Real = float;
#endif

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
