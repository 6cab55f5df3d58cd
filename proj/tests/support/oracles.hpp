#pragma once

// Independent reference computations the tests check the library against.
// Everything here is written as plain slot/index loops straight from the
// definitions; none of it calls into the packed/homomorphic code paths.

#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Per-segment sum broadcast into every slot of the segment.
std::vector<double> sum_cols_ref(const std::vector<double>& slots, uint32_t s);

// Element-wise sum across segments, replicated into every segment.
std::vector<double> sum_rows_ref(const std::vector<double>& slots, uint32_t s);

// Dense mat-vec product W (m x n) times x (n).
std::vector<double> matvec_ref(const std::vector<std::vector<double>>& w,
                               const std::vector<double>& x);

double silu_ref(double x);
double silu_deriv_ref(double x);

// Horner evaluation of a monomial-basis polynomial (constant term first).
double poly_ref(const std::vector<double>& coeffs, double x);

// Central finite difference (f(x+eps) - f(x-eps)) / (2 eps).
double central_diff(const std::function<double(double)>& f, double x, double eps);

} // namespace oracle
