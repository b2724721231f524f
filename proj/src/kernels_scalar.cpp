#include "rignn/kernels.hpp"

namespace rignn::kernels {
namespace {

void axpy_s(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_s(std::size_t n, const double* x, const double* y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void vadd_s(std::size_t n, const double* x, const double* y, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + y[i];
}

void vmul_s(std::size_t n, const double* x, const double* y, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void vscale_s(std::size_t n, double a, const double* x, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void matmul_acc_s(std::size_t r, std::size_t k, std::size_t c,
                  const double* A, const double* B, double* C) {
    // ikj order: stream over B rows, accumulate into C rows
    for (std::size_t i = 0; i < r; ++i) {
        double* crow = C + i * c;
        for (std::size_t p = 0; p < k; ++p) {
            const double a = A[i * k + p];
            if (a == 0.0) continue;
            const double* brow = B + p * c;
            for (std::size_t j = 0; j < c; ++j) crow[j] += a * brow[j];
        }
    }
}

}  // namespace

const Ops& scalar() {
    static const Ops ops{axpy_s, dot_s, vadd_s, vmul_s, vscale_s, matmul_acc_s,
                         "scalar"};
    return ops;
}

}  // namespace rignn::kernels
