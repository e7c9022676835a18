#include <immintrin.h>

#include <cstring>

#include "kernels_impl.hpp"

namespace wibp::kernels::detail {
namespace {

void affine_dot(const double* block, std::size_t stride, std::size_t dim, std::size_t count,
                const double* w, const double* shift, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < dim; ++i) {
      const __m256d x = _mm256_loadu_pd(block + i * stride + j);
      const __m256d d = _mm256_sub_pd(x, _mm256_set1_pd(shift[i]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[i]), d));
    }
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < count; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc = acc + w[i] * (block[i * stride + j] - shift[i]);
    out[j] = acc;
  }
}

void weighted_sqdist(const double* block, std::size_t stride, std::size_t dim, std::size_t count,
                     const double* center, const double* scale, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < dim; ++i) {
      const __m256d x = _mm256_loadu_pd(block + i * stride + j);
      const __m256d d = _mm256_sub_pd(x, _mm256_set1_pd(center[i]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(scale[i]), _mm256_mul_pd(d, d)));
    }
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < count; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = block[i * stride + j] - center[i];
      acc = acc + scale[i] * (d * d);
    }
    out[j] = acc;
  }
}

void reject_direction(double* block, std::size_t stride, std::size_t dim, std::size_t count,
                      const double* u) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    __m256d t = _mm256_setzero_pd();
    for (std::size_t i = 0; i < dim; ++i) {
      t = _mm256_add_pd(t, _mm256_mul_pd(_mm256_set1_pd(u[i]), _mm256_loadu_pd(block + i * stride + j)));
    }
    for (std::size_t i = 0; i < dim; ++i) {
      double* p = block + i * stride + j;
      _mm256_storeu_pd(p, _mm256_sub_pd(_mm256_loadu_pd(p), _mm256_mul_pd(t, _mm256_set1_pd(u[i]))));
    }
  }
  for (; j < count; ++j) {
    double t = 0.0;
    for (std::size_t i = 0; i < dim; ++i) t = t + u[i] * block[i * stride + j];
    for (std::size_t i = 0; i < dim; ++i) block[i * stride + j] = block[i * stride + j] - t * u[i];
  }
}

void mul_sub(const double* a, const double* b, const double* c, std::size_t count, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(a + j),
                                    _mm256_mul_pd(_mm256_loadu_pd(b + j), _mm256_loadu_pd(c + j)));
    _mm256_storeu_pd(out + j, r);
  }
  for (; j < count; ++j) out[j] = a[j] - b[j] * c[j];
}

inline __m256d mask4(const std::uint8_t* m) {
  // all-ones lanes where m[k] != 0
  int packed;
  std::memcpy(&packed, m, sizeof(packed));
  const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
  return _mm256_castsi256_pd(_mm256_cmpgt_epi64(wide, _mm256_setzero_si256()));
}

Moments masked_moments(const double* values, const std::uint8_t* mask, std::size_t count) {
  __m256d s = _mm256_setzero_pd();
  __m256d q = _mm256_setzero_pd();
  std::size_t selected = 0;
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d v = _mm256_and_pd(_mm256_loadu_pd(values + j), mask4(mask + j));
    s = _mm256_add_pd(s, v);
    q = _mm256_add_pd(q, _mm256_mul_pd(v, v));
    selected += static_cast<std::size_t>(mask[j] != 0) + (mask[j + 1] != 0) + (mask[j + 2] != 0) +
                (mask[j + 3] != 0);
  }
  alignas(32) double sl[4];
  alignas(32) double ql[4];
  _mm256_store_pd(sl, s);
  _mm256_store_pd(ql, q);
  for (; j < count; ++j) {
    const double v = mask[j] ? values[j] : 0.0;
    sl[j % 4] = sl[j % 4] + v;
    ql[j % 4] = ql[j % 4] + v * v;
    selected += mask[j] ? 1 : 0;
  }
  return {(sl[0] + sl[1]) + (sl[2] + sl[3]), (ql[0] + ql[1]) + (ql[2] + ql[3]), selected};
}

void less_than(const double* in, double bound, std::size_t count, std::uint8_t* mask,
               bool accumulate) {
  std::size_t j = 0;
  const __m256d b = _mm256_set1_pd(bound);
  for (; j + 4 <= count; j += 4) {
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(in + j), b, _CMP_LT_OQ));
    for (int k = 0; k < 4; ++k) {
      const std::uint8_t m = static_cast<std::uint8_t>((bits >> k) & 1);
      mask[j + k] = accumulate ? static_cast<std::uint8_t>(mask[j + k] & m) : m;
    }
  }
  for (; j < count; ++j) {
    const std::uint8_t m = in[j] < bound ? 1 : 0;
    mask[j] = accumulate ? static_cast<std::uint8_t>(mask[j] & m) : m;
  }
}

const KernelTable kAvx2{Isa::avx2, affine_dot, weighted_sqdist, reject_direction,
                        mul_sub,   masked_moments, less_than};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace wibp::kernels::detail
