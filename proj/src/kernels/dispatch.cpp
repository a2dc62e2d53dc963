#include <atomic>
#include <cstdlib>
#include <string>

#include "decolab/kernels.hpp"

namespace decolab::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Table* initial_choice() {
  const char* env = std::getenv("DECOLAB_SIMD");
  if (env && std::string(env) == "scalar") return &scalar_table();
  if (avx2_table() && cpu_has_avx2()) return avx2_table();
  return &scalar_table();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> t{initial_choice()};
  return t;
}

}  // namespace

const Table& active() { return *current().load(std::memory_order_relaxed); }

bool select(const std::string& name) {
  if (name == "scalar") {
    current().store(&scalar_table());
    return true;
  }
  if (name == "avx2" && avx2_table() && cpu_has_avx2()) {
    current().store(avx2_table());
    return true;
  }
  return false;
}

}  // namespace decolab::kernels
