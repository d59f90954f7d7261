#pragma once

// Dense double-precision kernels used by the game evaluators and the
// integrators. A scalar reference implementation is always compiled; an
// AVX2+FMA variant is compiled on x86-64 and selected at runtime when the
// CPU supports it. Set SGPLAY_KERNELS=scalar to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace sgplay::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// Returns true when `isa` was compiled in and the running CPU supports it.
bool isa_supported(Isa isa);

// Currently selected instruction set.
Isa active_isa();

// Switches the dispatch target. Throws std::invalid_argument if `isa` is not
// supported on this machine.
void set_isa(Isa isa);

// sum_k a[k] * b[k]; spans must have equal length.
double dot(std::span<const double> a, std::span<const double> b);

// y += alpha * x; spans must have equal length.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// y += alpha * (x - y), i.e. a convex move of y toward x when alpha in [0, 1].
void lerp(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void lerp(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void lerp(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace avx2

}  // namespace sgplay::kernels
