#include "wibp/kernels/kernels.hpp"

namespace wibp::kernels {
namespace {

void affine_dot(const double* block, std::size_t stride, std::size_t dim, std::size_t count,
                const double* w, const double* shift, double* out) {
  for (std::size_t j = 0; j < count; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double* row = block + i * stride;
    for (std::size_t j = 0; j < count; ++j) out[j] = out[j] + w[i] * (row[j] - shift[i]);
  }
}

void weighted_sqdist(const double* block, std::size_t stride, std::size_t dim, std::size_t count,
                     const double* center, const double* scale, double* out) {
  for (std::size_t j = 0; j < count; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double* row = block + i * stride;
    for (std::size_t j = 0; j < count; ++j) {
      const double d = row[j] - center[i];
      out[j] = out[j] + scale[i] * (d * d);
    }
  }
}

void reject_direction(double* block, std::size_t stride, std::size_t dim, std::size_t count,
                      const double* u) {
  for (std::size_t j = 0; j < count; ++j) {
    double t = 0.0;
    for (std::size_t i = 0; i < dim; ++i) t = t + u[i] * block[i * stride + j];
    for (std::size_t i = 0; i < dim; ++i) block[i * stride + j] = block[i * stride + j] - t * u[i];
  }
}

void mul_sub(const double* a, const double* b, const double* c, std::size_t count, double* out) {
  for (std::size_t j = 0; j < count; ++j) out[j] = a[j] - b[j] * c[j];
}

Moments masked_moments(const double* values, const std::uint8_t* mask, std::size_t count) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  double q[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t selected = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const double v = mask[j] ? values[j] : 0.0;
    s[j % 4] = s[j % 4] + v;
    q[j % 4] = q[j % 4] + v * v;
    selected += mask[j] ? 1 : 0;
  }
  return {(s[0] + s[1]) + (s[2] + s[3]), (q[0] + q[1]) + (q[2] + q[3]), selected};
}

void less_than(const double* in, double bound, std::size_t count, std::uint8_t* mask,
               bool accumulate) {
  for (std::size_t j = 0; j < count; ++j) {
    const std::uint8_t m = in[j] < bound ? 1 : 0;
    mask[j] = accumulate ? static_cast<std::uint8_t>(mask[j] & m) : m;
  }
}

const KernelTable kScalar{Isa::scalar,   affine_dot, weighted_sqdist, reject_direction,
                          mul_sub,       masked_moments, less_than};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace wibp::kernels
