#include "hetrain/pack/packing.hpp"

#include <string>

namespace hetrain::pack {

namespace {

void check_segments(uint32_t s, uint32_t b, const char* op) {
    if (s == 0 || b == 0 || s > b || b % s != 0)
        throw LayoutError(std::string(op) + ": segment width " + std::to_string(s) +
                          " does not tile ciphertext size " + std::to_string(b));
}

} // namespace

std::vector<double> pack1d(std::span<const double> x, Axis axis, uint32_t s, uint32_t b) {
    check_segments(s, b, "pack1d");
    const size_t n = x.size();
    std::vector<double> out(b, 0.0);
    if (axis == Axis::Row) {
        if (n > s)
            throw CapacityError("pack1d: " + std::to_string(n) +
                                " elements exceed segment width " + std::to_string(s));
        for (uint32_t seg = 0; seg < b / s; ++seg)
            for (size_t i = 0; i < n; ++i) out[seg * s + i] = x[i];
    } else {
        if (n > b / s)
            throw CapacityError("pack1d: " + std::to_string(n) + " elements exceed " +
                                std::to_string(b / s) + " segments");
        for (size_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < s; ++j) out[i * s + j] = x[i];
    }
    return out;
}

std::vector<double> pack2d(const std::vector<std::vector<double>>& x, Axis axis, uint32_t s,
                           uint32_t b) {
    check_segments(s, b, "pack2d");
    if (static_cast<uint64_t>(s) * s > b)
        throw LayoutError("pack2d: S*S exceeds ciphertext size");
    const size_t m = x.size();
    const size_t n = m == 0 ? 0 : x[0].size();
    for (const auto& row : x)
        if (row.size() != n) throw LayoutError("pack2d: ragged matrix");
    if (m > s || n > s)
        throw CapacityError("pack2d: " + std::to_string(m) + "x" + std::to_string(n) +
                            " matrix exceeds segment width " + std::to_string(s));

    std::vector<double> out(b, 0.0);
    // Row r of the (possibly transposed) matrix occupies segment r.
    for (size_t r = 0; r < (axis == Axis::Row ? m : n); ++r)
        for (size_t c = 0; c < (axis == Axis::Row ? n : m); ++c)
            out[r * s + c] = axis == Axis::Row ? x[r][c] : x[c][r];
    return out;
}

std::vector<double> unpack1d(std::span<const double> packed, const VecLayout& layout) {
    check_segments(layout.slot_size, layout.ct_size, "unpack1d");
    if (packed.size() != layout.ct_size)
        throw LayoutError("unpack1d: packed width does not match layout");
    const size_t n = layout.len;
    const uint32_t s = layout.slot_size;
    if (layout.axis == Axis::Row) {
        if (n > s) throw LayoutError("unpack1d: logical length exceeds segment width");
        return {packed.begin(), packed.begin() + static_cast<ptrdiff_t>(n)};
    }
    if (n > layout.ct_size / s)
        throw LayoutError("unpack1d: logical length exceeds segment count");
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = packed[i * s];
    return out;
}

std::vector<std::vector<double>> unpack2d(std::span<const double> packed,
                                          const MatLayout& layout) {
    check_segments(layout.slot_size, layout.ct_size, "unpack2d");
    if (packed.size() != layout.ct_size)
        throw LayoutError("unpack2d: packed width does not match layout");
    const uint32_t s = layout.slot_size;
    if (layout.rows > s || layout.cols > s)
        throw LayoutError("unpack2d: logical dims exceed segment width");
    std::vector<std::vector<double>> out(layout.rows, std::vector<double>(layout.cols));
    for (size_t r = 0; r < layout.rows; ++r)
        for (size_t c = 0; c < layout.cols; ++c)
            out[r][c] = layout.axis == Axis::Row ? packed[r * s + c] : packed[c * s + r];
    return out;
}

} // namespace hetrain::pack
