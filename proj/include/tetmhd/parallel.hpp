#ifndef TETMHD_PARALLEL_HPP
#define TETMHD_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tetmhd {

/// Execution mode for the data-parallel kernels. Serial is the reference
/// implementation; Parallel runs the same per-entity kernels under OpenMP.
/// Results are required to be bitwise identical between the two modes:
/// kernels only write to disjoint per-entity slots and every reduction is
/// performed afterwards in entity-index order.
enum class ExecMode { Serial, Parallel };

inline ExecMode default_exec_mode() {
#ifdef _OPENMP
  return ExecMode::Parallel;
#else
  return ExecMode::Serial;
#endif
}

/// Runs fn(i) for i in [0, n). In parallel mode iterations are distributed
/// over OpenMP threads; fn must not touch shared mutable state.
template <typename Fn>
void parallel_for(ExecMode mode, std::ptrdiff_t n, const Fn& fn) {
#ifdef _OPENMP
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
#else
  (void)mode;
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
}

}  // namespace tetmhd

#endif
