#include <atomic>
#include <cstdlib>
#include <string_view>

#include "crowdhub/kernels.hpp"

namespace crowdhub::kernels {
namespace {

const KernelTable* detect() {
    if (const char* env = std::getenv("CROWDHUB_ISA")) {
        const std::string_view want(env);
        if (want == "scalar") return &scalar_kernels();
        if (want == "avx2" && avx2_kernels()) return avx2_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) return t;
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{detect()};
    return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

bool force_isa(Isa isa) {
    const KernelTable* t = isa == Isa::Scalar ? &scalar_kernels() : avx2_kernels();
    if (!t) return false;
    slot().store(t, std::memory_order_release);
    return true;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

}  // namespace crowdhub::kernels
