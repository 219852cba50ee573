"""Modified Bessel function of the second kind, K_nu(x), with a log-domain companion.

The evaluation strategy is the classical three-piece one:

* reduce the order to ``nu = n + mu`` with ``|mu| <= 1/2`` (K is even in its
  order, so negative orders cost nothing),
* for ``x <= 2`` sum Temme's series for ``K_mu`` and ``K_{mu+1}``,
* for ``x > 2`` evaluate the Steed continued fraction for the same pair,
  carrying the factor ``exp(x)`` symbolically so the tail never underflows,
* march the three-term recurrence ``K_{v+1} = K_{v-1} + (2 v / x) K_v``
  upward (stable for K) with power-of-two renormalisation so intermediate
  values never overflow.

``bessel_k`` returns a double and raises :class:`DoubleRangeError` when the
true result is not representable; ``log_bessel_k`` always succeeds and is the
function the rest of the package uses for normalising constants.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import zeta as _zeta

__all__ = ["DoubleRangeError", "bessel_k", "log_bessel_k"]

_EPS = 2.220446049250313e-16
_MAXIT = 10000
_LN2 = math.log(2.0)
# exp() overflows above this; 0x1p1024 is the first non-representable magnitude
_LOG_DBL_MAX = 709.782712893384
# below this even subnormals flush to zero
_LOG_DBL_TINY = -745.0


class DoubleRangeError(ArithmeticError):
    """The exact result lies outside the representable double range."""


def _gamma_series_coeffs(nmax: int = 26) -> list[float]:
    # Taylor coefficients a_k of 1/Gamma(1+z) = sum a_k z^k, built from
    # log Gamma(1+z) = -euler*z + sum_{k>=2} (-1)^k zeta(k) z^k / k
    # and exponentiated term by term.  All inputs are library constants, so
    # no hand-copied decimal tables are involved.
    b = [0.0] * (nmax + 1)
    b[1] = float(np.euler_gamma)
    for k in range(2, nmax + 1):
        b[k] = (-1.0) ** (k + 1) * float(_zeta(k, 1)) / k
    a = [0.0] * (nmax + 1)
    a[0] = 1.0
    for n in range(1, nmax + 1):
        acc = 0.0
        for j in range(1, n + 1):
            acc += j * b[j] * a[n - j]
        a[n] = acc / n
    return a


_INV_GAMMA_COEFFS = _gamma_series_coeffs()
# split once into the even/odd sub-series used by _temme_gammas
_GAM1_COEFFS = [-c for c in _INV_GAMMA_COEFFS[1::2]]
_GAM2_COEFFS = list(_INV_GAMMA_COEFFS[0::2])


def _temme_gammas(mu: float) -> tuple[float, float, float, float]:
    """Return (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2.

    gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) and
    gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2, both continued through
    mu = 0.  Evaluating them from the even/odd halves of the 1/Gamma(1+z)
    Taylor series sidesteps the cancellation the raw quotient suffers near
    mu = 0.
    """
    m2 = mu * mu
    gam1 = 0.0
    for c in reversed(_GAM1_COEFFS):
        gam1 = gam1 * m2 + c
    gam2 = 0.0
    for c in reversed(_GAM2_COEFFS):
        gam2 = gam2 * m2 + c
    gampl = gam2 - mu * gam1
    gammi = gam2 + mu * gam1
    return gam1, gam2, gampl, gammi


def _k_temme_pair(mu: float, x: float) -> tuple[float, float]:
    # (K_mu(x), K_{mu+1}(x)) by Temme's series; requires 0 < x <= 2, |mu| <= 1/2
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < 1e-15 else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 + e * e / 6.0 if abs(e) < 1e-6 else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    ee = math.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    c = 1.0
    d2 = x2 * x2
    total1 = p
    mu2 = mu * mu
    for i in range(1, _MAXIT + 1):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d2 / i
        p /= i - mu
        q /= i + mu
        delta = c * ff
        total += delta
        total1 += c * (p - i * ff)
        if abs(delta) < abs(total) * _EPS:
            break
    else:  # pragma: no cover - series converges in < 30 terms for x <= 2
        raise RuntimeError("series for K did not converge")
    return total, total1 * (2.0 / x)


def _k_cf2_pair_scaled(mu: float, x: float) -> tuple[float, float]:
    # (e^x K_mu(x), e^x K_{mu+1}(x)) by Steed's continued fraction; x > 2
    mu2 = mu * mu
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu2
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT + 1):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:  # pragma: no cover - CF2 converges quickly for x > 2
        raise RuntimeError("continued fraction for K did not converge")
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) / s
    kmu1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, kmu1


def _bessel_k_parts(nu: float, x: float) -> tuple[float, int, float]:
    """K_nu(x) decomposed as mantissa * 2**pow2 * exp(-xs).

    The mantissa stays within a few hundred binary orders of unity, so the
    caller can take logs or reassemble without intermediate overflow.
    """
    if math.isnan(nu) or math.isinf(nu):
        raise ValueError("order must be finite")
    if math.isnan(x) or not x > 0.0 or math.isinf(x):
        raise ValueError("argument must be finite and positive")
    anu = abs(nu)
    n = int(anu + 0.5)
    mu = anu - n
    if x <= 2.0:
        kmu, kmu1 = _k_temme_pair(mu, x)
        xs = 0.0
    else:
        kmu, kmu1 = _k_cf2_pair_scaled(mu, x)
        xs = x
    pow2 = 0
    for i in range(1, n):
        kmu, kmu1 = kmu1, kmu + (2.0 * (mu + i) / x) * kmu1
        if kmu1 > 8.98846567431158e307 * 2.0 ** -512:  # keep headroom
            kmu = math.ldexp(kmu, -512)
            kmu1 = math.ldexp(kmu1, -512)
            pow2 += 512
    mant = kmu if n == 0 else kmu1
    return mant, pow2, xs


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind, K_nu(x).

    Parameters
    ----------
    nu : float
        Order; any finite real.  K is even in ``nu``.
    x : float
        Argument; must be finite and strictly positive.

    Returns
    -------
    float
        K_nu(x).

    Raises
    ------
    ValueError
        If ``x <= 0`` or either input is not finite.
    DoubleRangeError
        If the true value overflows the double range or underflows to zero.
    """
    mant, pow2, xs = _bessel_k_parts(nu, x)
    if pow2 == 0 and xs == 0.0:
        return mant
    if xs == 0.0:
        # pure power-of-two rescale, exact when representable
        log_k = math.log(mant) + pow2 * _LN2
        if log_k > _LOG_DBL_MAX:
            raise DoubleRangeError("K_nu(x) overflows double precision")
        return math.ldexp(mant, pow2)
    log_k = math.log(mant) + pow2 * _LN2 - xs
    if log_k > _LOG_DBL_MAX:
        raise DoubleRangeError("K_nu(x) overflows double precision")
    if log_k < _LOG_DBL_TINY:
        raise DoubleRangeError("K_nu(x) underflows double precision")
    if pow2 == 0:
        return mant * math.exp(-xs) if xs < 708.0 else math.exp(log_k)
    return math.exp(log_k)


def log_bessel_k(nu: float, x: float) -> float:
    """Natural log of K_nu(x), usable far beyond the double range of K itself.

    Same domain as :func:`bessel_k`; never raises a range error because the
    logarithm stays representable for every admissible input.
    """
    mant, pow2, xs = _bessel_k_parts(nu, x)
    return math.log(mant) + pow2 * _LN2 - xs
