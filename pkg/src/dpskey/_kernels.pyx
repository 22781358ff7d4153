# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Kato coefficients and the (mu, t) key-length grid.

Same contract as ``_pykernels``. Kato coefficients use C ``long double``
(80-bit on x86-64); everything else runs in double.
"""

from libc.math cimport ceil, exp, expm1, floor, fmax, fmin, INFINITY, log2, sqrt
from libc.math cimport sqrtl

import numpy as np

cdef double LAMBDA = 3.0 + sqrt(5.0)
cdef long double SQRT2L = sqrtl(2.0)


cdef inline long double _a_prime(long double n, long double m,
                                 long double ln_eps) noexcept nogil:
    cdef long double sn = sqrtl(n)
    cdef long double inner = 9.0 * m * (n - m) - 2.0 * n * ln_eps
    cdef long double num = (216.0 * sn * m * (n - m) * ln_eps
                            - 48.0 * n * sn * ln_eps * ln_eps
                            + 27.0 * SQRT2L * (n - 2.0 * m)
                            * sqrtl(-n * n * ln_eps * inner))
    return num / (4.0 * (9.0 * n - 8.0 * ln_eps) * inner)


cdef inline long double _b(long double a, long double n,
                           long double ln_eps) noexcept nogil:
    cdef long double rad = 18.0 * a * a * n - (16.0 * a * a + 24.0 * a * sqrtl(n)
                                               + 9.0 * n) * ln_eps
    return sqrtl(rad) / (3.0 * sqrtl(2.0 * n))


def kato_prime(double n, double m, double log_inv_eps):
    """Unclamped optimal Kato pair ``(a', b')`` in extended precision."""
    cdef long double ln_eps = -(<long double>log_inv_eps)
    cdef long double a = _a_prime(n, m, ln_eps)
    return <double>a, <double>_b(a, n, ln_eps)


def kato_star(double n, double m, double log_inv_eps):
    """Clamped Kato pair ``(a*, b*)`` in extended precision."""
    cdef long double ln_eps = -(<long double>log_inv_eps)
    cdef long double a = _a_prime(n, m, ln_eps)
    cdef long double floor_a = -sqrtl(n) / 2.0
    if a < floor_a:
        a = floor_a
    return <double>a, <double>_b(a, n, ln_eps)


cdef inline double _tail(double x, int n) noexcept nogil:
    # P[Poisson(x) >= n] for n in {2, 3}
    cdef double term, acc, head
    cdef int k
    if x < 1.0:
        term = exp(-x)
        for k in range(1, n + 1):
            term = term * x / k
        acc = 0.0
        for k in range(n, n + 40):
            acc += term
            if term < 1e-18 * acc:
                break
            term = term * x / (k + 1)
        return acc
    head = 1.0 + x
    if n == 3:
        head += 0.5 * x * x
    return 1.0 - exp(-x) * head


cdef inline double _entropy(double x) noexcept nogil:
    if x <= 0.0:
        return 0.0
    if x > 0.5:
        return 1.0
    return -x * log2(x) - (1.0 - x) * log2(1.0 - x)


cdef double _ell_point(double mu, double q1, double q2, double q3, double t, double eta,
                       double n_em, double e_bit, double h_e, double zeta, double zeta_prime,
                       double L1, double L2, double ec_factor, int method,
                       bint asymptotic) noexcept nogil:
    cdef double lam = LAMBDA
    cdef double n_det = n_em * 2.0 * eta * mu * exp(-2.0 * eta * mu)
    cdef double n_code = t * n_det
    cdef double n_samp = (1.0 - t) * n_det
    cdef double tn = t * n_em
    cdef double n_ph, g1, g2, g3, d1, big_d, m, sn, second
    cdef long double a, b, ln_eps, floor_a
    if n_code <= 0.0:
        return -INFINITY
    n_ph = lam * t * e_bit * n_samp / (1.0 - t)
    if asymptotic:
        n_ph += tn * q2 + lam * sqrt(tn * q1 * tn * q3)
        zeta = 0.0
        zeta_prime = 0.0
    else:
        g1 = 0.5 * (L2 + sqrt(L2 * L2 + 8.0 * tn * q1 * L2))
        g2 = 0.5 * (L2 + sqrt(L2 * L2 + 8.0 * tn * q2 * L2))
        g3 = 0.5 * (L2 + sqrt(L2 * L2 + 8.0 * tn * q3 * L2))
        d1 = sqrt(2.0 * n_det * L1)
        big_d = fmax(lam / (1.0 - t) + 1.0, 1.0 / t + lam + 1.0)
        n_ph += tn * q2 + g2 + t * big_d * d1
        if method == 0:
            if n_det < 2.0:
                return -INFINITY
            m = fmin(ceil(tn * q3 + g3), floor((n_det - 1.0) / 2.0))
            ln_eps = -(<long double>L1)
            a = _a_prime(n_det, m, ln_eps)
            floor_a = -sqrtl(n_det) / 2.0
            if a < floor_a:
                a = floor_a
            b = _b(a, n_det, ln_eps)
            sn = sqrt(n_det)
            second = ((tn * q3 + g3) * (1.0 + 2.0 * (<double>a) / sn)
                      + ((<double>b) - (<double>a)) * sn)
            n_ph += lam * sqrt((tn * q1 + g1 + d1) * second)
        else:
            n_ph += lam * tn * sqrt((q1 + (g1 + d1) / tn) * (q3 + (g3 + d1) / tn))
    return (n_code * (1.0 - _entropy(n_ph / n_code)) - zeta
            - ec_factor * n_code * h_e - zeta_prime)


def ell_grid(mu, t, double eta, double n_em, double e_bit, double zeta,
             double zeta_prime, double log_inv_eps1, double log_inv_eps2,
             double ec_factor, int method, bint asymptotic):
    """Net key length on the outer grid ``mu x t``; see ``_pykernels.ell_grid``."""
    cdef double[::1] mu_v = np.ascontiguousarray(mu, dtype=np.float64)
    cdef double[::1] t_v = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t nm = mu_v.shape[0], nt = t_v.shape[0], i, j
    cdef double x, q1, q2, q3, h_e = _entropy(e_bit)
    out = np.empty((nm, nt), dtype=np.float64)
    cdef double[:, ::1] out_v = out
    with nogil:
        for i in range(nm):
            # block tails depend on mu only
            x = 3.0 * mu_v[i]
            q1 = -expm1(-x)
            q2 = _tail(x, 2)
            q3 = _tail(x, 3)
            for j in range(nt):
                out_v[i, j] = _ell_point(mu_v[i], q1, q2, q3, t_v[j], eta, n_em, e_bit,
                                         h_e, zeta, zeta_prime, log_inv_eps1,
                                         log_inv_eps2, ec_factor, method, asymptotic)
    return out
