#include "robinsdp/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "robinsdp/errors.hpp"

namespace robinsdp::kernels {

#if defined(ROBINSDP_HAVE_AVX2_TU)
const KernelTable* avx2_table_impl() noexcept;
#endif

namespace {

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("ROBINSDP_SIMD")) {
    if (std::string_view(env) == "scalar") return &scalar_table();
  }
  if (const KernelTable* t = avx2_table(); t != nullptr && cpu_supports_avx2()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("kernel operands differ in length: " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

}  // namespace

const KernelTable* avx2_table() noexcept {
#if defined(ROBINSDP_HAVE_AVX2_TU)
  return avx2_table_impl();
#else
  return nullptr;
#endif
}

bool cpu_supports_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (isa == Isa::scalar) {
    current().store(&scalar_table());
    return;
  }
  const KernelTable* t = avx2_table();
  if (t == nullptr || !cpu_supports_avx2()) {
    throw ValidationError("AVX2 kernels are not available on this machine");
  }
  current().store(t);
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size());
  return active().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void rotate(double c, double s, std::span<double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active().rotate(c, s, x.data(), y.data(), x.size());
}

}  // namespace robinsdp::kernels
