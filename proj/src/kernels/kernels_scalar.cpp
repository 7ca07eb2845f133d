#include "jumpstop/kernels.hpp"

#include <algorithm>

namespace jumpstop::kernels {

namespace {

void drift_diffusion_scalar(const double* v, const double* mu, const double* half_sig2,
                            double inv_dx, double inv_dx2, double* rate, size_t n) {
    for (size_t j = 1; j + 1 < n; ++j) {
        double m = mu[j];
        double mp = m > 0 ? m : 0.0;
        double mm = m < 0 ? -m : 0.0;
        double up = v[j + 1] - v[j];
        double dn = v[j] - v[j - 1];
        rate[j] = mp * up * inv_dx - mm * dn * inv_dx + half_sig2[j] * (up - dn) * inv_dx2;
    }
}

void select_min_scalar(const double* cand, double* best, int32_t* arg, int32_t u, size_t n) {
    for (size_t j = 0; j < n; ++j)
        if (cand[j] < best[j]) {
            best[j] = cand[j];
            arg[j] = u;
        }
}

void select_max_scalar(const double* cand, double* best, int32_t* arg, int32_t u, size_t n) {
    for (size_t j = 0; j < n; ++j)
        if (cand[j] > best[j]) {
            best[j] = cand[j];
            arg[j] = u;
        }
}

void obstacle_scalar(const double* g, const double* cont, double* v, uint8_t* stop, size_t n) {
    for (size_t j = 0; j < n; ++j) {
        bool binds = g[j] >= cont[j];
        v[j] = binds ? g[j] : cont[j];
        stop[j] = binds ? 1 : 0;
    }
}

void axpy_scalar(const double* v, const double* rate, double dt, double* out, size_t n) {
    for (size_t j = 0; j < n; ++j) out[j] = v[j] + dt * rate[j];
}

}  // namespace

const KernelTable scalar_table = {drift_diffusion_scalar, select_min_scalar, select_max_scalar,
                                  obstacle_scalar, axpy_scalar, "scalar"};

}  // namespace jumpstop::kernels
