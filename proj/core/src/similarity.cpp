#include "structmem/similarity.hpp"

#include "structmem/errors.hpp"

#include <cmath>

namespace structmem {

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatchError(a.size(), b.size());
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i];
        const double y = b[i];
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if (na == 0.0 || nb == 0.0) {
        throw ZeroVectorError();
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace structmem
