#pragma once

// Data-parallel inner loops shared by the dense linear algebra.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant compiled in its own translation unit. The variant is
// picked once at runtime from the CPU feature bits; setting the environment
// variable ROBINSDP_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace robinsdp::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // (x[i], y[i]) <- (c x[i] - s y[i], s x[i] + c y[i])
  void (*rotate)(double c, double s, double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// Null when the AVX2 translation unit was not built for this target.
const KernelTable* avx2_table() noexcept;

bool cpu_supports_avx2() noexcept;

/// Table used by the free functions below.
const KernelTable& active() noexcept;

/// Overrides the runtime choice. Throws ValidationError when the requested
/// ISA is unavailable on this machine.
void select(Isa isa);

std::string_view isa_name(Isa isa) noexcept;

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void rotate(double c, double s, std::span<double> x, std::span<double> y);

}  // namespace robinsdp::kernels
