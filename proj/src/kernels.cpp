#include "rignn/kernels.hpp"

#include <cstring>
#include <stdexcept>

namespace rignn::kernels {
namespace {
const Ops* g_active = nullptr;

const Ops& best() { return avx2_available() ? avx2() : scalar(); }
}  // namespace

const Ops& active() {
    if (!g_active) g_active = &best();
    return *g_active;
}

void force(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        g_active = &scalar();
    } else if (std::strcmp(name, "avx2") == 0) {
        if (!avx2_available()) throw std::runtime_error("avx2 not supported on this cpu");
        g_active = &avx2();
    } else if (std::strcmp(name, "auto") == 0) {
        g_active = &best();
    } else {
        throw std::runtime_error(std::string("unknown kernel set: ") + name);
    }
}

}  // namespace rignn::kernels
