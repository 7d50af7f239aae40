#pragma once

#include <span>

namespace structmem {

/// a.b / (|a||b|). Components are float32; the dot product and norms
/// accumulate in double. Throws DimensionMismatchError on unequal sizes and
/// ZeroVectorError when either vector is all-zero.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

}  // namespace structmem
