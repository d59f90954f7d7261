#include <atomic>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sgplay/kernels.hpp"

namespace sgplay::kernels {
namespace {

struct KernelTable {
  Isa isa;
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*lerp)(double, std::span<const double>, std::span<double>);
};

constexpr KernelTable kScalarTable{Isa::kScalar, &scalar::dot, &scalar::axpy, &scalar::lerp};
#if defined(SGPLAY_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2, &avx2::dot, &avx2::axpy, &avx2::lerp};
#endif

bool cpu_has_avx2() {
#if defined(SGPLAY_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_for(Isa isa) {
#if defined(SGPLAY_HAVE_AVX2)
  if (isa == Isa::kAvx2) return &kAvx2Table;
#endif
  (void)isa;
  return &kScalarTable;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("SGPLAY_KERNELS")) {
    if (std::string(env) == "scalar") return &kScalarTable;
  }
  return cpu_has_avx2() ? table_for(Isa::kAvx2) : &kScalarTable;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  if (isa == Isa::kScalar) return true;
  return cpu_has_avx2();
}

Isa active_isa() { return current().load(std::memory_order_relaxed)->isa; }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("kernel isa not supported: " + std::string(isa_name(isa)));
  }
  current().store(table_for(isa), std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return current().load(std::memory_order_relaxed)->dot(a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  current().load(std::memory_order_relaxed)->axpy(alpha, x, y);
}

void lerp(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  current().load(std::memory_order_relaxed)->lerp(alpha, x, y);
}

}  // namespace sgplay::kernels
