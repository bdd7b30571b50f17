#pragma once

#include <cstddef>
#include <string>

#include "qir/bits.hpp"
#include "qir/errors.hpp"

namespace qir {

// Geometry of the wire-link permutation: m blocks of n bits, read as an
// m x n matrix and written back transposed.
struct WlpShape {
    std::size_t m = 1;  // blocks (matrix rows)
    std::size_t n = 1;  // block length (matrix columns)
};

inline BitVec wlp_apply(const BitVec& bits, WlpShape shape) {
    if (shape.m < 1 || shape.n < 1) throw ParameterError("wlp_apply: shape must be at least 1x1");
    if (bits.size() != shape.m * shape.n)
        throw ParameterError("wlp_apply: length " + std::to_string(bits.size()) + " != m*n = " +
                             std::to_string(shape.m * shape.n));
    BitVec out(bits.size());
    for (std::size_t i = 0; i < shape.m; ++i)
        for (std::size_t j = 0; j < shape.n; ++j)
            out[j * shape.m + i] = bits[i * shape.n + j];
    return out;
}

// Undo a forward application; `shape` is the shape that was applied.
inline BitVec wlp_inverse(const BitVec& bits, WlpShape shape) {
    return wlp_apply(bits, WlpShape{shape.n, shape.m});
}

}  // namespace qir
