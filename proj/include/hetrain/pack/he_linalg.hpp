#pragma once

#include "hetrain/he/context.hpp"
#include "hetrain/pack/packing.hpp"

namespace hetrain::pack {

/// Sums all slots within each S-wide segment and broadcasts the sum back
/// into every slot of that segment. Implemented as a log2(S) rotate-and-add
/// fold, a segment-head plaintext mask (the single level spent here) and a
/// log2(S) broadcast. Requires level >= 2.
he::Ciphertext sum_cols(const he::Context& ctx, const he::Ciphertext& c, uint32_t s);

/// Element-wise sum across segments: output slot (g, j) holds the sum of
/// slot j over all segments. Rotate-and-add with strides S..B/2; level-free
/// but requires level >= 1.
he::Ciphertext sum_rows(const he::Context& ctx, const he::Ciphertext& c, uint32_t s);

/// Packed homomorphic matrix-vector product: Mult followed by SumCols for
/// axis-0 weights or SumRows for axis-1 weights. The vector operand must be
/// packed on the same axis as the weights; the result lands on the opposite
/// axis with clean (zero) padding.
he::Ciphertext he_matvec(const he::Context& ctx, const he::Ciphertext& w_ct, Axis w_axis,
                         const he::Ciphertext& x_ct, Axis x_axis, uint32_t s);

/// Bias addition; both operands must share a layout axis.
he::Ciphertext he_bias_add(const he::Context& ctx, const he::Ciphertext& y_ct, Axis y_axis,
                           const he::Ciphertext& b_ct, Axis b_axis);

} // namespace hetrain::pack
