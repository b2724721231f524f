#include "rignn/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

// Mul+add (no FMA contraction) so per-lane results match the scalar
// reference bit for bit; only horizontal reductions reorder sums.
namespace rignn::kernels {
namespace {

void axpy_v(std::size_t n, double a, const double* x, double* y) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, vx));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double dot_v(std::size_t n, const double* x, const double* y) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vy = _mm256_loadu_pd(y + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void vadd_v(std::size_t n, const double* x, const double* y, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i,
                         _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) out[i] = x[i] + y[i];
}

void vmul_v(std::size_t n, const double* x, const double* y, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i,
                         _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

void vscale_v(std::size_t n, double a, const double* x, double* out) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = a * x[i];
}

void matmul_acc_v(std::size_t r, std::size_t k, std::size_t c,
                  const double* A, const double* B, double* C) {
    for (std::size_t i = 0; i < r; ++i) {
        double* crow = C + i * c;
        for (std::size_t p = 0; p < k; ++p) {
            const double a = A[i * k + p];
            if (a == 0.0) continue;
            axpy_v(c, a, B + p * c, crow);
        }
    }
}

}  // namespace

const Ops& avx2() {
    static const Ops ops{axpy_v, dot_v, vadd_v, vmul_v, vscale_v, matmul_acc_v,
                         "avx2"};
    return ops;
}

bool avx2_available() { return __builtin_cpu_supports("avx2"); }

}  // namespace rignn::kernels

#else

namespace rignn::kernels {
const Ops& avx2() { return scalar(); }
bool avx2_available() { return false; }
}  // namespace rignn::kernels

#endif
