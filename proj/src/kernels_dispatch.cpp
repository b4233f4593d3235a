#include "busim/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>

namespace busim::kernels {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Backend& active() {
  static const Backend* chosen = nullptr;
  static std::once_flag flag;
  std::call_once(flag, [] {
    const char* force = std::getenv("BUSIM_SIMD");
    if (force != nullptr && std::strcmp(force, "scalar") == 0) {
      chosen = &scalar_backend();
    } else if (force != nullptr && std::strcmp(force, "avx2") == 0) {
      chosen = &avx2_backend();
    } else {
      chosen = avx2_available() ? &avx2_backend() : &scalar_backend();
    }
  });
  return *chosen;
}

}  // namespace busim::kernels
