#include "hetrain/pack/he_linalg.hpp"

#include <string>

namespace hetrain::pack {

namespace {

void check_sum_args(const he::Ciphertext& c, uint32_t s, const char* op) {
    const uint32_t b = c.size();
    if (s == 0 || b % s != 0 || !he::is_pow2(s) || !he::is_pow2(b / s))
        throw LayoutError(std::string(op) + ": segment width " + std::to_string(s) +
                          " does not tile ciphertext size " + std::to_string(b));
}

} // namespace

he::Ciphertext sum_cols(const he::Context& ctx, const he::Ciphertext& c, uint32_t s) {
    check_sum_args(c, s, "sum_cols");
    if (c.level < 2)
        throw LevelExhaustedError("sum_cols: level exhausted (have " + std::to_string(c.level) +
                                  ", need 2); bootstrap required");
    const uint32_t b = c.size();

    // Fold: after log2(S) rounds each segment head holds its segment sum.
    he::Ciphertext acc = c;
    for (uint32_t stride = 1; stride < s; stride *= 2)
        acc = ctx.add(acc, ctx.rotate(acc, stride));

    // Keep the segment heads only; everything else is straddled garbage.
    std::vector<double> head_mask(b, 0.0);
    for (uint32_t g = 0; g < b / s; ++g) head_mask[g * s] = 1.0;
    acc = ctx.mult_plain(acc, head_mask);

    // Broadcast the head into the rest of its segment.
    for (uint32_t stride = 1; stride < s; stride *= 2)
        acc = ctx.add(acc, ctx.rotate(acc, -static_cast<int64_t>(stride)));
    return acc;
}

he::Ciphertext sum_rows(const he::Context& ctx, const he::Ciphertext& c, uint32_t s) {
    check_sum_args(c, s, "sum_rows");
    if (c.level < 1)
        throw LevelExhaustedError("sum_rows: level exhausted (have 0, need 1)");
    he::Ciphertext acc = c;
    for (uint32_t stride = s; stride < c.size(); stride *= 2)
        acc = ctx.add(acc, ctx.rotate(acc, stride));
    return acc;
}

he::Ciphertext he_matvec(const he::Context& ctx, const he::Ciphertext& w_ct, Axis w_axis,
                         const he::Ciphertext& x_ct, Axis x_axis, uint32_t s) {
    if (w_axis != x_axis)
        throw LayoutError("he_matvec: weight axis " + std::to_string(axis_index(w_axis)) +
                          " does not match input axis " + std::to_string(axis_index(x_axis)));
    he::Ciphertext prod = ctx.mult(w_ct, x_ct);
    return w_axis == Axis::Row ? sum_cols(ctx, prod, s) : sum_rows(ctx, prod, s);
}

he::Ciphertext he_bias_add(const he::Context& ctx, const he::Ciphertext& y_ct, Axis y_axis,
                           const he::Ciphertext& b_ct, Axis b_axis) {
    if (y_axis != b_axis)
        throw LayoutError("he_bias_add: bias axis " + std::to_string(axis_index(b_axis)) +
                          " does not match value axis " + std::to_string(axis_index(y_axis)));
    return ctx.add(y_ct, b_ct);
}

} // namespace hetrain::pack
