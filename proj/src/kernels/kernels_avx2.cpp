#include "jumpstop/kernels.hpp"

#if defined(JUMPSTOP_HAVE_AVX2)

#include <immintrin.h>

namespace jumpstop::kernels {

namespace {

// Same expression tree as the scalar kernels, vectorized across nodes.
// Deliberately no FMA so results stay bit-identical to the reference.

void drift_diffusion_avx2(const double* v, const double* mu, const double* half_sig2,
                          double inv_dx, double inv_dx2, double* rate, size_t n) {
    if (n < 2) return;
    const __m256d zero = _mm256_setzero_pd();
    const __m256d vinv_dx = _mm256_set1_pd(inv_dx);
    const __m256d vinv_dx2 = _mm256_set1_pd(inv_dx2);
    size_t j = 1;
    for (; j + 4 <= n - 1; j += 4) {
        __m256d m = _mm256_loadu_pd(mu + j);
        __m256d mp = _mm256_max_pd(m, zero);
        __m256d mm = _mm256_max_pd(_mm256_sub_pd(zero, m), zero);
        __m256d vj = _mm256_loadu_pd(v + j);
        __m256d vp = _mm256_loadu_pd(v + j + 1);
        __m256d vm = _mm256_loadu_pd(v + j - 1);
        __m256d up = _mm256_sub_pd(vp, vj);
        __m256d dn = _mm256_sub_pd(vj, vm);
        __m256d adv = _mm256_sub_pd(_mm256_mul_pd(_mm256_mul_pd(mp, up), vinv_dx),
                                    _mm256_mul_pd(_mm256_mul_pd(mm, dn), vinv_dx));
        __m256d dif = _mm256_mul_pd(
            _mm256_mul_pd(_mm256_loadu_pd(half_sig2 + j), _mm256_sub_pd(up, dn)), vinv_dx2);
        _mm256_storeu_pd(rate + j, _mm256_add_pd(adv, dif));
    }
    for (; j + 1 < n; ++j) {
        double m = mu[j];
        double mp = m > 0 ? m : 0.0;
        double mm = m < 0 ? -m : 0.0;
        double up = v[j + 1] - v[j];
        double dn = v[j] - v[j - 1];
        rate[j] = mp * up * inv_dx - mm * dn * inv_dx + half_sig2[j] * (up - dn) * inv_dx2;
    }
}

// _CMP_LT_OQ keeps strict comparison semantics (first optimizer wins ties).
void select_min_avx2(const double* cand, double* best, int32_t* arg, int32_t u, size_t n) {
    size_t j = 0;
    const __m128i uu = _mm_set1_epi32(u);
    for (; j + 4 <= n; j += 4) {
        __m256d c = _mm256_loadu_pd(cand + j);
        __m256d b = _mm256_loadu_pd(best + j);
        __m256d lt = _mm256_cmp_pd(c, b, _CMP_LT_OQ);
        _mm256_storeu_pd(best + j, _mm256_blendv_pd(b, c, lt));
        __m128i mask32 = _mm256_cvtpd_epi32(_mm256_and_pd(lt, _mm256_set1_pd(-1.0)));
        // mask32 lanes are -1 where lt, 0 otherwise
        __m128i a = _mm_loadu_si128(reinterpret_cast<const __m128i*>(arg + j));
        __m128i sel = _mm_cmpeq_epi32(mask32, _mm_set1_epi32(-1));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(arg + j), _mm_blendv_epi8(a, uu, sel));
    }
    for (; j < n; ++j)
        if (cand[j] < best[j]) {
            best[j] = cand[j];
            arg[j] = u;
        }
}

void select_max_avx2(const double* cand, double* best, int32_t* arg, int32_t u, size_t n) {
    size_t j = 0;
    const __m128i uu = _mm_set1_epi32(u);
    for (; j + 4 <= n; j += 4) {
        __m256d c = _mm256_loadu_pd(cand + j);
        __m256d b = _mm256_loadu_pd(best + j);
        __m256d gt = _mm256_cmp_pd(c, b, _CMP_GT_OQ);
        _mm256_storeu_pd(best + j, _mm256_blendv_pd(b, c, gt));
        __m128i mask32 = _mm256_cvtpd_epi32(_mm256_and_pd(gt, _mm256_set1_pd(-1.0)));
        __m128i a = _mm_loadu_si128(reinterpret_cast<const __m128i*>(arg + j));
        __m128i sel = _mm_cmpeq_epi32(mask32, _mm_set1_epi32(-1));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(arg + j), _mm_blendv_epi8(a, uu, sel));
    }
    for (; j < n; ++j)
        if (cand[j] > best[j]) {
            best[j] = cand[j];
            arg[j] = u;
        }
}

void obstacle_avx2(const double* g, const double* cont, double* v, uint8_t* stop, size_t n) {
    size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d gg = _mm256_loadu_pd(g + j);
        __m256d cc = _mm256_loadu_pd(cont + j);
        __m256d binds = _mm256_cmp_pd(gg, cc, _CMP_GE_OQ);
        _mm256_storeu_pd(v + j, _mm256_blendv_pd(cc, gg, binds));
        int bits = _mm256_movemask_pd(binds);
        stop[j] = (bits >> 0) & 1;
        stop[j + 1] = (bits >> 1) & 1;
        stop[j + 2] = (bits >> 2) & 1;
        stop[j + 3] = (bits >> 3) & 1;
    }
    for (; j < n; ++j) {
        bool binds = g[j] >= cont[j];
        v[j] = binds ? g[j] : cont[j];
        stop[j] = binds ? 1 : 0;
    }
}

void axpy_avx2(const double* v, const double* rate, double dt, double* out, size_t n) {
    const __m256d vdt = _mm256_set1_pd(dt);
    size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d r = _mm256_mul_pd(vdt, _mm256_loadu_pd(rate + j));
        _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(v + j), r));
    }
    for (; j < n; ++j) out[j] = v[j] + dt * rate[j];
}

}  // namespace

const KernelTable avx2_table = {drift_diffusion_avx2, select_min_avx2, select_max_avx2,
                                obstacle_avx2, axpy_avx2, "avx2"};

}  // namespace jumpstop::kernels

#endif  // JUMPSTOP_HAVE_AVX2
