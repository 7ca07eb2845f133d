#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace jumpstop::kernels {

// Data-parallel inner loops of the time-stepping schemes. Each kernel has a
// scalar reference implementation and an AVX2 variant that performs the
// identical arithmetic per node (no FMA contraction), so the two produce
// bit-identical results and the runtime choice never changes artifacts.

/// Upwind drift + centered diffusion rate on a contiguous 1D slice:
///   rate[j] = mu+*(v[j+1]-v[j])/dx - mu-*(v[j]-v[j-1])/dx
///           + hs2[j]*(v[j+1]-2v[j]+v[j-1])/dx^2
/// for j in [1, n-2]; the clamped boundary nodes are handled by the caller.
using DriftDiffusionFn = void (*)(const double* v, const double* mu, const double* half_sig2,
                                  double inv_dx, double inv_dx2, double* rate, size_t n);

/// cand[j] < best[j] ? (best[j]=cand[j], arg[j]=u) : unchanged. Strict
/// comparison keeps the first optimizer in control-grid order.
using SelectFn = void (*)(const double* cand, double* best, int32_t* arg, int32_t u, size_t n);

/// v[j] = max(g[j], cont[j]); stop[j] = g[j] >= cont[j].
using ObstacleFn = void (*)(const double* g, const double* cont, double* v, uint8_t* stop,
                            size_t n);

/// out[j] = v[j] + dt * rate[j]
using AxpyFn = void (*)(const double* v, const double* rate, double dt, double* out, size_t n);

struct KernelTable {
    DriftDiffusionFn drift_diffusion;
    SelectFn select_min;
    SelectFn select_max;
    ObstacleFn obstacle;
    AxpyFn axpy;
    const char* name;
};

extern const KernelTable scalar_table;
#if defined(JUMPSTOP_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif

/// Active table: AVX2 when the CPU supports it, overridable with
/// JUMPSTOP_SIMD=scalar|avx2|auto.
const KernelTable& active();
std::string active_name();

}  // namespace jumpstop::kernels
