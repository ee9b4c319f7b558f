"""Complex-argument special functions used by the two-photon amplitudes.

Everything here is implemented from series, recurrences or rational
approximations; no external special-function library is used at runtime.
The complex error function is evaluated through the Faddeeva function
w(z) = exp(-z^2) erfc(-iz) (Weideman rational approximation for moderate
arguments, a Laplace continued fraction for large ones), which keeps all
intermediate factors bounded.  `erf_damped` is the workhorse for the
transition-amplitude kernels: it returns exp(-c^2) erf(x + i c) for real
x, c without ever forming the exponentially large pieces.

Series truncation policy: a series stops once |term| < 1e-16 * |partial
sum| for three consecutive terms; series longer than 10 000 terms raise
ConvergenceError.
"""

import math

import numpy as np

from .errors import ConvergenceError, DomainError, NearSingularError

_SQRT_PI = math.sqrt(math.pi)
_SERIES_RTOL = 1e-16
_SERIES_CAP = 10_000

# ---------------------------------------------------------------------------
# gamma function
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, 9 coefficients (double-precision standard set).
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos_gamma(x):
    # valid for x >= 0.5
    acc = _LANCZOS_C[0]
    for i, ci in enumerate(_LANCZOS_C[1:], start=1):
        acc += ci / (x - 1.0 + i)
    t = x - 0.5 + _LANCZOS_G
    return math.sqrt(2.0 * math.pi) * t ** (x - 0.5) * math.exp(-t) * acc


def gamma_real(x):
    """Gamma(x) for real x > 0 via the Lanczos approximation (g=7, n=9).

    Accurate to better than 1e-13 relative over the positive axis.
    """
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma_real requires x > 0, got {x}")
    if x < 0.5:
        # reflection keeps the Lanczos core on x >= 0.5
        return math.pi / (math.sin(math.pi * x) * _lanczos_gamma(1.0 - x))
    return _lanczos_gamma(x)


def log_gamma_real(x):
    """log Gamma(x) for x > 0, safe where Gamma itself would overflow."""
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma_real requires x > 0, got {x}")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma_real(1.0 - x)
    acc = _LANCZOS_C[0]
    for i, ci in enumerate(_LANCZOS_C[1:], start=1):
        acc += ci / (x - 1.0 + i)
    t = x - 0.5 + _LANCZOS_G
    return 0.5 * math.log(2.0 * math.pi) + (x - 0.5) * math.log(t) - t + math.log(acc)


def _gamma_signed(x):
    """Gamma at any real non-pole point; returns value (may be negative)."""
    if x > 0.0:
        return gamma_real(x)
    if x == math.floor(x):
        raise DomainError(f"gamma pole at non-positive integer {x}")
    return math.pi / (math.sin(math.pi * x) * gamma_real(1.0 - x))


# ---------------------------------------------------------------------------
# Faddeeva function and error functions
# ---------------------------------------------------------------------------

def _weideman_coeffs(n_terms=48):
    m = 2 * n_terms
    ind = np.arange(-m + 1, m, dtype=float)
    big_l = math.sqrt(n_terms / math.sqrt(2.0))
    theta = (math.pi / m) * ind
    t = big_l * np.tan(0.5 * theta)
    f = np.zeros(ind.size + 1)
    f[1:] = np.exp(-t * t) * (big_l * big_l + t * t)
    coefs = np.fft.fft(np.fft.fftshift(f)).real / (2 * m)
    return big_l, np.flipud(coefs[1 : n_terms + 1])


_WEIDEMAN_L, _WEIDEMAN_A = _weideman_coeffs(48)
_CF_RADIUS = 7.0
_CF_DEPTH = 16


def faddeeva_w(z):
    """Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0.

    Weideman's 48-term rational approximation for |z| < 7, the Laplace
    continued fraction beyond.  Lower half-plane arguments use
    w(z) = 2 exp(-z^2) - w(-z), which grows like exp(|Im z|^2) and can
    legitimately overflow.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)

    lower = z.imag < 0.0
    zu = np.where(lower, -z, z)

    big = np.abs(zu) >= _CF_RADIUS
    if np.any(big):
        zb = zu[big]
        r = np.zeros_like(zb)
        for n in range(_CF_DEPTH, 0, -1):
            r = (0.5 * n) / (zb - r)
        out[big] = (1j / _SQRT_PI) / (zb - r)
    if np.any(~big):
        zs = zu[~big]
        lam = (_WEIDEMAN_L + 1j * zs) / (_WEIDEMAN_L - 1j * zs)
        poly = np.polyval(_WEIDEMAN_A, lam)
        out[~big] = 2.0 * poly / (_WEIDEMAN_L - 1j * zs) ** 2 + (
            1.0 / _SQRT_PI
        ) / (_WEIDEMAN_L - 1j * zs)
    if np.any(lower):
        out[lower] = 2.0 * np.exp(-z[lower] ** 2) - out[lower]
    return out[0] if scalar else out


def _erf_series(z):
    # Maclaurin series; used only for |z| <= 0.5 where it is exact to eps
    z = np.asarray(z, dtype=complex)
    term = z.copy()
    acc = z.copy()
    z2 = z * z
    for n in range(1, 40):
        term = term * (-z2) / n
        acc = acc + term / (2 * n + 1)
        if np.all(np.abs(term) <= 1e-18 * (np.abs(acc) + 1e-300)):
            break
    return acc * (2.0 / _SQRT_PI)


def erf_complex(z):
    """Error function of a complex argument.

    Entire function; absolute error below 1e-13 for |z| <= 12.  Maclaurin
    series for small |z|, otherwise quadrant reduction onto
    erf(z) = 1 - exp(-z^2) w(iz) with the Faddeeva kernel.  The exp(-z^2)
    factor genuinely grows like exp(Im(z)^2); overflow sets in only past
    |Im z| ~ 26.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)

    small = np.abs(z) <= 0.5
    if np.any(small):
        out[small] = _erf_series(z[small])
    rest = ~small
    if np.any(rest):
        zr = z[rest]
        # map onto Re >= 0, Im >= 0; undo with erf(-z) = -erf(z), erf(conj z) = conj erf(z)
        sgn_re = np.where(zr.real < 0.0, -1.0, 1.0)
        zq = zr * sgn_re
        conj = zq.imag < 0.0
        zq = np.where(conj, np.conj(zq), zq)
        w = faddeeva_w(1j * zq)
        val = 1.0 - np.exp(-zq * zq) * w
        val = np.where(conj, np.conj(val), val)
        out[rest] = sgn_re * val
    return out[0] if scalar else out


def erfi_complex(z):
    """Imaginary error function, exactly -i * erf(i z)."""
    return -1j * erf_complex(1j * np.asarray(z, dtype=complex))


def erf_damped(x, c):
    """exp(-c^2) * erf(x + i c) for real x, c, with no large intermediates.

    erf(x + ic) grows like exp(c^2); amplitude formulas always pair it
    with a Gaussian resonance factor exp(-c^2).  Using
    erf(z) = 1 - exp(-z^2) w(iz) the product collapses to

        exp(-c^2) - exp(-x^2) exp(-2icx) w(-c + ix)     (x >= 0)

    where every factor has modulus <= 1 (w is bounded on the upper half
    plane), so the result is accurate for arbitrarily large |c|.
    """
    x = np.asarray(x, dtype=float)
    c = np.asarray(c, dtype=float)
    x, c = np.broadcast_arrays(x, c)
    sgn = np.where(x < 0.0, -1.0, 1.0)
    xa = np.abs(x)
    # w argument -sgn*c + i|x| always lies in the closed upper half plane
    w = faddeeva_w(-sgn * c + 1j * xa)
    val = np.exp(-c * c) - np.exp(-xa * xa) * np.exp(-2j * c * x) * w
    return sgn * val


# ---------------------------------------------------------------------------
# generalized Laguerre polynomials
# ---------------------------------------------------------------------------

def laguerre_generalized(n, alpha, x):
    """L_n^alpha(x) by the stable three-term recurrence.

    Works elementwise on array x.  n must be a non-negative integer.
    """
    if n != int(n) or n < 0:
        raise DomainError(f"laguerre_generalized requires integer n >= 0, got {n}")
    n = int(n)
    x = np.asarray(x, dtype=float)
    lk_m1 = np.ones_like(x)
    if n == 0:
        return lk_m1 if lk_m1.ndim else float(lk_m1)
    lk = 1.0 + alpha - x
    for k in range(1, n):
        lk, lk_m1 = ((2 * k + 1 + alpha - x) * lk - (k + alpha) * lk_m1) / (k + 1), lk
    return lk if lk.ndim else float(lk)


# ---------------------------------------------------------------------------
# Gauss hypergeometric function
# ---------------------------------------------------------------------------

def _hyp2f1_series(a, b, c, z):
    """Raw Gauss series with the package truncation policy; |z| must be < 1."""
    term = complex(1.0)
    acc = complex(1.0)
    tiny_run = 0
    for k in range(_SERIES_CAP):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        acc += term
        if abs(term) < _SERIES_RTOL * abs(acc):
            tiny_run += 1
            if tiny_run >= 3:
                return acc
        else:
            tiny_run = 0
    raise ConvergenceError(
        f"2F1 series exceeded {_SERIES_CAP} terms at z={z} (a={a}, b={b}, c={c})"
    )


def _is_nonpositive_int(v, tol=1e-12):
    return v <= tol and abs(v - round(v)) < tol


def _hyp2f1_taylor_step(a, b, c, z0, f0, f1, z1):
    """Advance (2F1, d/dz 2F1) from z0 to z1 by the hypergeometric ODE.

    Uses the Taylor recurrence implied by
    z(1-z) F'' + [c - (a+b+1) z] F' - ab F = 0, valid for any parameter
    degeneracies; the step must stay inside the disc of analyticity
    around z0 (singular points 0 and 1).  With d_k = F^(k)(z0) h^k / k!
    the ladder reads

        d_{k+2} = h ( A_k d_{k+1} + (k+a)(k+b) h d_k / (k+1) )
                  / ( z0 (1-z0) (k+2) ),
        A_k = k (2 z0 - 1) + (a+b+1) z0 - c.
    """
    h = z1 - z0
    q = z0 * (1.0 - z0)
    d_prev = f0
    d_cur = f1 * h
    acc = d_prev + d_cur
    dacc = d_cur  # sum of k * d_k, to be divided by h at the end
    for k in range(_SERIES_CAP):
        a_k = k * (2.0 * z0 - 1.0) + (a + b + 1.0) * z0 - c
        d_next = h * (a_k * d_cur + (k + a) * (k + b) * h * d_prev / (k + 1.0)) / (
            q * (k + 2.0)
        )
        acc += d_next
        dacc += (k + 2.0) * d_next
        if (
            abs(d_next) < _SERIES_RTOL * abs(acc)
            and abs(d_cur) < _SERIES_RTOL * abs(acc)
        ):
            return acc, dacc / h
        d_prev, d_cur = d_cur, d_next
    raise ConvergenceError(f"2F1 Taylor step failed to converge at z={z1}")


def _continuation_path(z):
    """Waypoints from a small-|z| seed to z that keep clear of z = 1.

    The principal branch is fixed by detouring through the half plane of
    Im(z); targets with Im(z) = 0 lie left of the cut and need no detour.
    """
    start = 0.35 * z / abs(z)
    # straight leg is safe unless it brushes the z = 1 point
    if z.real > 0.4 and abs(z.imag) < 0.6 and abs(z - 1.0) < max(1.5, abs(z)):
        s = 1.0 if z.imag >= 0.0 else -1.0
        return [0.35j * s, 1.0 + 1.2j * s, z]
    return [start, z]


def _hyp2f1_continued(a, b, c, z):
    """Analytic continuation by Taylor-stepping along a cut-avoiding path."""
    path = _continuation_path(z)
    z0 = path[0]
    f0 = _hyp2f1_series(a, b, c, z0)
    f1 = (a * b / c) * _hyp2f1_series(a + 1.0, b + 1.0, c + 1.0, z0)
    for target in path[1:]:
        while z0 != target:
            step = 0.55 * min(abs(z0), abs(z0 - 1.0))
            if abs(target - z0) <= step:
                z1 = target
            else:
                z1 = z0 + step * (target - z0) / abs(target - z0)
            f0, f1 = _hyp2f1_taylor_step(a, b, c, z0, f0, f1, z1)
            z0 = z1
    return f0


def hyp2f1_complex(a, b, c, z):
    """Gauss hypergeometric 2F1(a, b; c; z) on the principal branch.

    Direct series where it converges well, the Pfaff transformation
    z -> z/(z-1) where that helps, and ODE-based Taylor continuation for
    the remaining region.  The branch cut runs along [1, inf); arguments
    closer than 1e-8 to the cut raise NearSingularError rather than
    returning a value of uncertain branch.
    """
    if _is_nonpositive_int(c):
        raise DomainError(f"hyp2f1_complex pole: c={c} is a non-positive integer")
    z = complex(z)
    if z == 0.0:
        return complex(1.0)
    if z.real >= 1.0 - 1e-8 and abs(z.imag) < 1e-8:
        raise NearSingularError(
            f"2F1 argument {z} is within 1e-8 of the branch cut [1, inf)"
        )
    # terminating series: exact polynomial, any z
    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        n = int(round(-min(a, b)))
        term = complex(1.0)
        acc = complex(1.0)
        for k in range(n):
            term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
            acc += term
        return acc
    if abs(z) <= 0.65:
        return _hyp2f1_series(a, b, c, z)
    zp = z / (z - 1.0)
    if abs(zp) <= 0.65:
        # Pfaff: 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))
        return (1.0 - z) ** (-a) * _hyp2f1_series(a, c - b, c, zp)
    if abs(zp) < abs(z) and abs(zp) <= 0.9:
        return (1.0 - z) ** (-a) * _hyp2f1_continued(a, c - b, c, zp)
    return _hyp2f1_continued(a, b, c, z)


def hyp2f1_regularized(a, b, c, z):
    """2F1(a, b; c; z) / Gamma(c), finite for every real c.

    For c = 0, -1, -2, ... the ratio stays finite; the limit is evaluated
    through the index-shifted series
    (a)_{m+1} (b)_{m+1} / (m+1)! * z^{m+1} * 2F1(a+m+1, b+m+1; m+2; z)
    with m = -c.
    """
    z = complex(z)
    if not _is_nonpositive_int(c):
        return hyp2f1_complex(a, b, c, z) / _gamma_signed(c)
    m = int(round(-c))
    poch_a = 1.0
    poch_b = 1.0
    for k in range(m + 1):
        poch_a *= a + k
        poch_b *= b + k
    pref = poch_a * poch_b / gamma_real(m + 2.0) * z ** (m + 1)
    if pref == 0.0:
        return complex(0.0)
    return pref * hyp2f1_complex(a + m + 1.0, b + m + 1.0, m + 2.0, z)


# ---------------------------------------------------------------------------
# Appell F1 (terminating case)
# ---------------------------------------------------------------------------

def appell_f1_terminating(a, b1, b2, c, x, y):
    """Appell F1(a; b1, b2; c; x, y) with b1, b2 non-positive integers.

    The double series terminates, so the value is an exact finite sum.
    Evaluated as a single sum over the x-index with a terminating inner
    2F1 in y, which avoids accumulating the full double grid.
    """
    for name, bv in (("b1", b1), ("b2", b2)):
        if bv > 0 or bv != int(bv):
            raise DomainError(
                f"appell_f1_terminating requires non-positive integer {name}, got {bv}"
            )
    b1 = int(b1)
    b2 = int(b2)
    x = complex(x)
    y = complex(y)
    acc = complex(0.0)
    outer = complex(1.0)  # (a)_m (b1)_m x^m / ((c)_m m!)
    for m in range(-b1 + 1):
        # inner terminating 2F1(a+m, b2; c+m; y)
        inner = complex(1.0)
        t = complex(1.0)
        for n in range(-b2):
            t *= (a + m + n) * (b2 + n) / ((c + m + n) * (n + 1)) * y
            inner += t
        acc += outer * inner
        outer *= (a + m) * (b1 + m) / ((c + m) * (m + 1)) * x
    return acc
