#pragma once

#include <cstddef>

// Dense double-precision inner loops. Scalar reference kernels live in
// kernels_scalar.cpp; AVX2 variants in kernels_avx2.cpp. dispatch() picks
// the widest lane available at runtime; the scalar path is always valid
// and is the correctness reference in the equivalence tests.
namespace rignn::kernels {

struct Ops {
    // y[i] += a * x[i]
    void (*axpy)(std::size_t n, double a, const double* x, double* y);
    double (*dot)(std::size_t n, const double* x, const double* y);
    void (*vadd)(std::size_t n, const double* x, const double* y, double* out);
    void (*vmul)(std::size_t n, const double* x, const double* y, double* out);
    void (*vscale)(std::size_t n, double a, const double* x, double* out);
    // C (r x c) += A (r x k) * B (k x c), all row-major
    void (*matmul_acc)(std::size_t r, std::size_t k, std::size_t c,
                       const double* A, const double* B, double* C);
    const char* name;
};

const Ops& scalar();
const Ops& avx2();     // valid only if avx2_available()
bool avx2_available();

// Active kernel set. Defaults to the best available; override with
// force() (used by tests and the --kernels flag).
const Ops& active();
void force(const char* name);  // "scalar", "avx2", or "auto"

}  // namespace rignn::kernels
