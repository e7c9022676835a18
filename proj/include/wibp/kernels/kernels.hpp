#pragma once

// Batched arithmetic kernels over structure-of-arrays point blocks.
//
// A block of `count` points in R^dim is stored coordinate-major: coordinate i
// of point j lives at block[i * stride + j]. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant picked at runtime.
// The variants perform the same floating-point operations in the same order
// per lane, so their outputs are bitwise identical (see test_kernels.cpp).

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace wibp::kernels {

enum class Isa { scalar, avx2 };

struct Moments {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t selected = 0;
};

struct KernelTable {
  Isa isa;

  // out[j] = sum_i w[i] * (block[i, j] - shift[i]), accumulated in i order.
  void (*affine_dot)(const double* block, std::size_t stride, std::size_t dim, std::size_t count,
                     const double* w, const double* shift, double* out);

  // out[j] = sum_i scale[i] * (block[i, j] - center[i])^2, accumulated in i order.
  void (*weighted_sqdist)(const double* block, std::size_t stride, std::size_t dim,
                          std::size_t count, const double* center, const double* scale,
                          double* out);

  // block[:, j] -= <u, block[:, j]> u for a unit vector u.
  void (*reject_direction)(double* block, std::size_t stride, std::size_t dim, std::size_t count,
                           const double* u);

  // out[j] = a[j] - b[j] * c[j]
  void (*mul_sub)(const double* a, const double* b, const double* c, std::size_t count,
                  double* out);

  // Sum and sum of squares of values[j] over mask[j] != 0. Four interleaved
  // partial sums (lane = j mod 4) combined as (l0 + l1) + (l2 + l3).
  Moments (*masked_moments)(const double* values, const std::uint8_t* mask, std::size_t count);

  // mask[j] = (in[j] < bound) ? 1 : 0  (and-ed into mask when accumulate)
  void (*less_than)(const double* in, double bound, std::size_t count, std::uint8_t* mask,
                    bool accumulate);
};

const KernelTable& scalar_table();
bool avx2_available();
const KernelTable& table(Isa isa);

/// The table used by library code. Defaults to the best supported ISA; the
/// WIBP_ISA environment variable ("scalar" / "avx2") or select() override it.
const KernelTable& active();
void select(Isa isa);
Isa active_isa();
std::string_view isa_name(Isa isa);
Isa parse_isa(std::string_view name);

}  // namespace wibp::kernels
