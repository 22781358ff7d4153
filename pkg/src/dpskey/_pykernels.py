"""numpy implementation of the hot kernels.

Mirrors ``_kernels.pyx`` function for function. It is selected at import when
the compiled extension is missing or ``DPSKEY_PURE_PYTHON=1`` is set.
"""

import math

import numpy as np

LAMBDA = 3.0 + math.sqrt(5.0)

_LD = np.longdouble
_SERIES_TERMS = 40


def _kato_a_prime(n, m, ln_eps):
    sn = np.sqrt(n)
    inner = 9 * m * (n - m) - 2 * n * ln_eps
    num = (
        216 * sn * m * (n - m) * ln_eps
        - 48 * n * sn * ln_eps * ln_eps
        + 27 * np.sqrt(_LD(2)) * (n - 2 * m) * np.sqrt(-n * n * ln_eps * inner)
    )
    den = 4 * (9 * n - 8 * ln_eps) * inner
    return num / den


def _kato_b(a, n, ln_eps):
    sn = np.sqrt(n)
    rad = 18 * a * a * n - (16 * a * a + 24 * a * sn + 9 * n) * ln_eps
    return np.sqrt(rad) / (3 * np.sqrt(2 * n))


def kato_prime(n, m, log_inv_eps):
    """Unclamped optimal Kato pair ``(a', b')`` in extended precision."""
    n, m, ln_eps = _LD(n), _LD(m), -_LD(log_inv_eps)
    a = _kato_a_prime(n, m, ln_eps)
    return float(a), float(_kato_b(a, n, ln_eps))


def kato_star(n, m, log_inv_eps):
    """Clamped Kato pair ``(a*, b*)`` in extended precision."""
    n, m, ln_eps = _LD(n), _LD(m), -_LD(log_inv_eps)
    a = np.maximum(-np.sqrt(n) / 2, _kato_a_prime(n, m, ln_eps))
    return float(a), float(_kato_b(a, n, ln_eps))


def _poisson_tails(x):
    """q1, q2, q3 for Poisson mean ``x`` (array), cancellation-free for small x."""
    q1 = -np.expm1(-x)
    small = x < 1.0
    xs = np.where(small, x, 0.5)
    ex = np.exp(-xs)
    out = [q1]
    for n, head in ((2, lambda: 1.0 + x), (3, lambda: 1.0 + x + 0.5 * x * x)):
        term = ex * xs**n / math.factorial(n)
        acc = np.zeros_like(x)
        for k in range(n, n + _SERIES_TERMS):
            acc += term
            term = term * xs / (k + 1)
        complement = 1.0 - np.exp(-x) * head()
        out.append(np.where(small, acc, complement))
    return out


def _entropy(x):
    xc = np.clip(x, 1e-300, 0.5)
    h = -xc * np.log2(xc) - (1.0 - xc) * np.log2(1.0 - xc)
    h = np.where(x <= 0.0, 0.0, h)
    return np.where(x > 0.5, 1.0, h)


def ell_grid(mu, t, eta, n_em, e_bit, zeta, zeta_prime, log_inv_eps1,
             log_inv_eps2, ec_factor, method, asymptotic):
    """Net key length on the outer grid ``mu x t``.

    ``method`` is 0 for the Kato bound and 1 for the Azuma-only bound. Grid
    points where fewer than two rounds are detected come back as ``-inf``.
    """
    mu = np.asarray(mu, dtype=float)[:, None]
    t = np.asarray(t, dtype=float)[None, :]
    lam = LAMBDA
    L1, L2 = float(log_inv_eps1), float(log_inv_eps2)

    x = 3.0 * mu
    q1, q2, q3 = _poisson_tails(x)
    n_det = n_em * 2.0 * eta * mu * np.exp(-2.0 * eta * mu)
    n_det = np.broadcast_to(n_det, np.broadcast_shapes(mu.shape, t.shape))
    n_code = t * n_det
    n_samp = (1.0 - t) * n_det
    tn = t * n_em

    bit_term = lam * t * e_bit * n_samp / (1.0 - t)
    if asymptotic:
        n_ph = bit_term + tn * q2 + lam * np.sqrt(tn * q1 * tn * q3)
        zeta = zeta_prime = 0.0
    else:
        def gamma(q):
            return 0.5 * (L2 + np.sqrt(L2 * L2 + 8.0 * tn * q * L2))

        g1, g2, g3 = gamma(q1), gamma(q2), gamma(q3)
        d1 = np.sqrt(2.0 * n_det * L1)
        big_d = np.maximum(lam / (1.0 - t) + 1.0, 1.0 / t + lam + 1.0)
        n_ph = bit_term + tn * q2 + g2 + t * big_d * d1
        if method == 0:
            safe = n_det >= 2.0
            nd = np.where(safe, n_det, 2.0)
            m = np.minimum(np.ceil(tn * q3 + g3), np.floor((nd - 1.0) / 2.0))
            ndl = nd.astype(_LD)
            ln_eps = -_LD(L1)
            a = np.maximum(-np.sqrt(ndl) / 2, _kato_a_prime(ndl, m.astype(_LD), ln_eps))
            b = _kato_b(a, ndl, ln_eps)
            a, b = a.astype(float), b.astype(float)
            sn = np.sqrt(nd)
            second = (tn * q3 + g3) * (1.0 + 2.0 * a / sn) + (b - a) * sn
            n_ph = n_ph + lam * np.sqrt((tn * q1 + g1 + d1) * second)
            n_ph = np.where(safe, n_ph, np.inf)
        else:
            n_ph = n_ph + lam * tn * np.sqrt(
                (q1 + (g1 + d1) / tn) * (q3 + (g3 + d1) / tn))

    ratio = np.where(n_code > 0.0, n_ph / np.where(n_code > 0.0, n_code, 1.0), np.inf)
    h_e = float(_entropy(np.asarray(float(e_bit))))
    ell = (n_code * (1.0 - _entropy(ratio)) - zeta
           - ec_factor * n_code * h_e - zeta_prime)
    if method == 0 and not asymptotic:
        ell = np.where(n_det >= 2.0, ell, -np.inf)
    return np.where(n_code > 0.0, ell, -np.inf)
