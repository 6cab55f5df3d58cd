#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hetrain/common/error.hpp"

namespace hetrain::pack {

/// Packing orientation. Axis 0 ("row") zero-pads the logical vector to one
/// segment and replicates it across all B/S segments; axis 1 ("column")
/// repeats each element across a whole segment.
enum class Axis : uint8_t { Row = 0, Col = 1 };

inline Axis flip(Axis a) { return a == Axis::Row ? Axis::Col : Axis::Row; }
inline Axis axis_from(int v) {
    if (v != 0 && v != 1) throw LayoutError("axis must be 0 or 1");
    return v == 0 ? Axis::Row : Axis::Col;
}
inline int axis_index(Axis a) { return a == Axis::Row ? 0 : 1; }

/// Slot layout of a packed logical vector.
struct VecLayout {
    size_t len = 0;
    Axis axis = Axis::Row;
    uint32_t slot_size = 0;
    uint32_t ct_size = 0;
};

/// Slot layout of a packed logical matrix (rows x cols).
struct MatLayout {
    size_t rows = 0;
    size_t cols = 0;
    Axis axis = Axis::Row;
    uint32_t slot_size = 0;
    uint32_t ct_size = 0;
};

/// Packs a 1-D vector into B slots.
/// Axis 0: zero-pad to S, then replicate the padded block B/S times.
/// Axis 1: repeat each element S times, then zero-pad to B.
std::vector<double> pack1d(std::span<const double> x, Axis axis, uint32_t s, uint32_t b);

/// Packs an m x n matrix into B slots: transpose when axis is 1, zero-pad to
/// S x S, flatten row-major, zero-pad to B.
std::vector<double> pack2d(const std::vector<std::vector<double>>& x, Axis axis, uint32_t s,
                           uint32_t b);

/// Exact inverses on the logical region; padding slots are ignored.
std::vector<double> unpack1d(std::span<const double> packed, const VecLayout& layout);
std::vector<std::vector<double>> unpack2d(std::span<const double> packed,
                                          const MatLayout& layout);

} // namespace hetrain::pack
