#pragma once

#include <cstdint>

#include "frrn/mask.hpp"
#include "frrn/metrics.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Free-form mask made of 1-8 thick random-walk strokes (5-25 px wide)
/// painted as holes. The hole ratio lands inside `bucket`; attempts that
/// miss are redrawn, and after 100 misses a DataError is thrown.
/// Deterministic per seed.
BinaryMask gen_irregular_mask(int height, int width, MaskBucket bucket, std::uint64_t seed);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
