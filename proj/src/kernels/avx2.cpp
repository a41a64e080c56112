// SPDX-License-Identifier: Apache-2.0
//
// AVX2 + FMA variants. Functions carry target attributes instead of the
// whole file being built with -mavx2, so shared inline code (std library,
// kernels_impl.hpp) is never emitted with instructions the host may lack.

#include "kernels_impl.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))

#include <immintrin.h>

#include <bit>
#include <cfloat>
#include <cstdint>
#include <limits>

#define VOLSRE_AVX2 __attribute__((target("avx2,fma")))
#define VOLSRE_AVX2_INLINE __attribute__((target("avx2,fma"), always_inline)) inline

namespace volsre::kernels {
namespace {

constexpr double kLn2Hi = 0.693145751953125;
constexpr double kLn2Lo = 1.42860682030941723212e-6;
constexpr double kLog2e = 1.4426950408889634074;
constexpr double kTwo52 = 4503599627370496.0;

VOLSRE_AVX2_INLINE __m256d set1(double v)
{
    return _mm256_set1_pd(v);
}

VOLSRE_AVX2_INLINE __m256d abs_pd(__m256d x)
{
    return _mm256_andnot_pd(set1(-0.0), x);
}

// 2^n for integral n in [-1022, 1023] held as doubles.
VOLSRE_AVX2_INLINE __m256d pow2_pd(__m256d n)
{
    __m256d biased = _mm256_add_pd(n, set1(1023.0 + kTwo52));
    return _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_castpd_si256(biased), 52));
}

VOLSRE_AVX2_INLINE __m256d exp_pd(__m256d x)
{
    const __m256d overflow = set1(709.782712893384);
    const __m256d underflow = set1(-745.1332191019412);
    __m256d xc = _mm256_min_pd(_mm256_max_pd(x, set1(-746.0)), set1(710.0));
    __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, set1(kLog2e)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, set1(kLn2Hi), xc);
    r = _mm256_fnmadd_pd(n, set1(kLn2Lo), r);

    // Taylor series of e^r, |r| <= ln2 / 2, through r^13.
    __m256d p = set1(1.0 / 6227020800.0);
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, set1(0.5));
    p = _mm256_fmadd_pd(p, r, set1(1.0));
    p = _mm256_fmadd_pd(p, r, set1(1.0));

    // Two half-size scalings keep subnormal results and 2^1024 reachable.
    __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, set1(0.5)));
    __m256d n2 = _mm256_sub_pd(n, n1);
    __m256d res = _mm256_mul_pd(_mm256_mul_pd(p, pow2_pd(n1)), pow2_pd(n2));

    res = _mm256_blendv_pd(res, set1(HUGE_VAL), _mm256_cmp_pd(x, overflow, _CMP_GT_OQ));
    res = _mm256_blendv_pd(res, _mm256_setzero_pd(), _mm256_cmp_pd(x, underflow, _CMP_LT_OQ));
    res = _mm256_blendv_pd(res, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
    return res;
}

VOLSRE_AVX2_INLINE __m256d log_pd(__m256d x)
{
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
    const __m256i magic_bits = _mm256_set1_epi64x(0x4330000000000000ll);

    __m256d tiny = _mm256_and_pd(_mm256_cmp_pd(x, set1(DBL_MIN), _CMP_LT_OQ),
                                 _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_GT_OQ));
    __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, set1(18014398509481984.0)), tiny);  // 2^54
    __m256d e_adj = _mm256_and_pd(tiny, set1(-54.0));

    __m256i bits = _mm256_castpd_si256(xs);
    __m256i ebits = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(ebits, magic_bits)), set1(kTwo52));
    e = _mm256_add_pd(_mm256_sub_pd(e, set1(1023.0)), e_adj);

    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
    __m256d big = _mm256_cmp_pd(m, set1(1.4142135623730951), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, set1(1.0)));

    // log m = 2 atanh(s), s = (m - 1) / (m + 1), |s| < 0.172.
    __m256d s = _mm256_div_pd(_mm256_sub_pd(m, set1(1.0)), _mm256_add_pd(m, set1(1.0)));
    __m256d s2 = _mm256_mul_pd(s, s);
    __m256d p = set1(1.0 / 25.0);
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 23.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 21.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 19.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 17.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 15.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 13.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 11.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 9.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 7.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 5.0));
    p = _mm256_fmadd_pd(p, s2, set1(1.0 / 3.0));
    __m256d two_s = _mm256_add_pd(s, s);
    __m256d log_m = _mm256_fmadd_pd(_mm256_mul_pd(two_s, s2), p, two_s);
    __m256d res = _mm256_fmadd_pd(e, set1(kLn2Hi), _mm256_fmadd_pd(e, set1(kLn2Lo), log_m));

    res = _mm256_blendv_pd(res, set1(-HUGE_VAL), _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_EQ_OQ));
    res = _mm256_blendv_pd(res, set1(HUGE_VAL), _mm256_cmp_pd(x, set1(HUGE_VAL), _CMP_EQ_OQ));
    res = _mm256_blendv_pd(res, set1(std::numeric_limits<double>::quiet_NaN()),
                           _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_NGE_UQ));
    return res;
}

VOLSRE_AVX2_INLINE __m256d lipschitz_log_pd(__m256d x, const LipschitzTermParams& p)
{
    __m256d w = _mm256_fmadd_pd(set1(p.gamma), x, _mm256_mul_pd(set1(p.delta), abs_pd(x)));
    __m256d a = _mm256_fmsub_pd(set1(p.scale), w, set1(p.beta));
    return log_pd(_mm256_max_pd(set1(p.beta), a));
}

VOLSRE_AVX2 void log_lipschitz_terms(std::span<const double> x, const LipschitzTermParams& p,
                                     std::span<double> out)
{
    const std::size_t n = x.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out.data() + i, lipschitz_log_pd(_mm256_loadu_pd(x.data() + i), p));
    for (; i < n; ++i)
        out[i] = detail::log_lipschitz_term(x[i], p);
}

VOLSRE_AVX2 LogSum log_lipschitz_sum(std::span<const double> x, const LipschitzTermParams& p)
{
    const std::size_t n = x.size();
    const __m256d neg_inf = set1(-HUGE_VAL);
    __m256d sum = _mm256_setzero_pd();
    __m256d sum_sq = _mm256_setzero_pd();
    std::size_t neg = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
    {
        __m256d t = lipschitz_log_pd(_mm256_loadu_pd(x.data() + i), p);
        __m256d is_neg_inf = _mm256_cmp_pd(t, neg_inf, _CMP_EQ_OQ);
        t = _mm256_andnot_pd(is_neg_inf, t);
        sum = _mm256_add_pd(sum, t);
        sum_sq = _mm256_fmadd_pd(t, t, sum_sq);
        neg += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(is_neg_inf))));
    }
    alignas(32) double s[4], q[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(q, sum_sq);
    LogSum acc{(s[0] + s[1]) + (s[2] + s[3]), (q[0] + q[1]) + (q[2] + q[3]), neg};
    for (; i < n; ++i)
    {
        const double t = detail::log_lipschitz_term(x[i], p);
        if (t == -HUGE_VAL)
        {
            ++acc.neg_inf;
            continue;
        }
        acc.sum += t;
        acc.sum_sq += t * t;
    }
    return acc;
}

VOLSRE_AVX2_INLINE __m256d innovation_pd(__m256d z, __m256d g, __m256d d)
{
    return _mm256_fmadd_pd(g, z, _mm256_mul_pd(d, abs_pd(z)));
}

VOLSRE_AVX2 void implied_lyapunov_terms(const double* z, std::size_t lanes, std::size_t trunc,
                                        const SeriesParams& p, double* out)
{
    const __m256d g = set1(p.gamma);
    const __m256d d = set1(p.delta);
    const __m256d beta = set1(p.beta);
    const __m256d cut = set1(detail::kLogLinearCut);
    const __m256d log_beta = set1(std::log(p.beta));
    std::size_t j = 0;
    for (; j + 4 <= lanes; j += 4)
    {
        __m256d s = _mm256_setzero_pd();
        for (std::size_t k = trunc; k >= 1; --k)
            s = _mm256_fmadd_pd(beta, s, innovation_pd(_mm256_loadu_pd(z + k * lanes + j), g, d));
        __m256d w0 = innovation_pd(_mm256_loadu_pd(z + j), g, d);
        __m256d l1 = _mm256_fmadd_pd(set1(0.5), s, log_pd(_mm256_mul_pd(set1(0.5), w0)));
        __m256d e = exp_pd(_mm256_min_pd(l1, cut));
        __m256d t = log_pd(_mm256_max_pd(beta, _mm256_sub_pd(e, beta)));
        __m256d res = _mm256_blendv_pd(t, l1, _mm256_cmp_pd(l1, cut, _CMP_GT_OQ));
        res = _mm256_blendv_pd(res, log_beta, _mm256_cmp_pd(w0, _mm256_setzero_pd(), _CMP_NGT_UQ));
        _mm256_storeu_pd(out + j, res);
    }
    for (; j < lanes; ++j)
        out[j] = detail::implied_lyapunov_term(z + j, lanes, trunc, p);
}

VOLSRE_AVX2 void gradient_series(const double* z, std::size_t lanes, std::size_t L, const SeriesParams& p,
                                 double* grad)
{
    const __m256d alpha = set1(p.alpha);
    const __m256d beta = set1(p.beta);
    const __m256d g = set1(p.gamma);
    const __m256d d = set1(p.delta);
    const __m256d one = set1(1.0);
    const __m256d half = set1(0.5);
    std::size_t j = 0;
    for (; j + 4 <= lanes; j += 4)
    {
        __m256d y = set1(p.alpha / (1.0 - p.beta));
        for (std::size_t s = 0; s < L; ++s)
            y = _mm256_add_pd(_mm256_fmadd_pd(beta, y, alpha), innovation_pd(_mm256_loadu_pd(z + s * lanes + j), g, d));
        __m256d g0 = _mm256_setzero_pd(), g1 = g0, g2 = g0, g3 = g0;
        for (std::size_t s = L; s < 2 * L; ++s)
        {
            __m256d zs = _mm256_loadu_pd(z + s * lanes + j);
            __m256d w = innovation_pd(zs, g, d);
            __m256d v = _mm256_fnmadd_pd(half, w, beta);
            g0 = _mm256_fmadd_pd(v, g0, one);
            g1 = _mm256_fmadd_pd(v, g1, y);
            g2 = _mm256_fmadd_pd(v, g2, zs);
            g3 = _mm256_fmadd_pd(v, g3, abs_pd(zs));
            y = _mm256_add_pd(_mm256_fmadd_pd(beta, y, alpha), w);
        }
        _mm256_storeu_pd(grad + j, g0);
        _mm256_storeu_pd(grad + lanes + j, g1);
        _mm256_storeu_pd(grad + 2 * lanes + j, g2);
        _mm256_storeu_pd(grad + 3 * lanes + j, g3);
    }
    for (; j < lanes; ++j)
        detail::gradient_series_lane(z + j, lanes, L, p, grad + j, lanes);
}

}  // namespace

namespace detail {

const KernelTable* avx2_table_if_built()
{
    static const KernelTable table{"avx2", &log_lipschitz_terms, &log_lipschitz_sum, &implied_lyapunov_terms,
                                   &gradient_series};
    return &table;
}

// Test hooks for the vector math.
VOLSRE_AVX2 void avx2_exp(const double* in, double* out, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(in + i)));
    for (; i < n; ++i)
        out[i] = std::exp(in[i]);
}

VOLSRE_AVX2 void avx2_log(const double* in, double* out, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, log_pd(_mm256_loadu_pd(in + i)));
    for (; i < n; ++i)
        out[i] = std::log(in[i]);
}

}  // namespace detail
}  // namespace volsre::kernels

#else

namespace volsre::kernels::detail {

const KernelTable* avx2_table_if_built()
{
    return nullptr;
}

void avx2_exp(const double*, double*, std::size_t) {}
void avx2_log(const double*, double*, std::size_t) {}

}  // namespace volsre::kernels::detail

#endif
