"""Inner loops over Matsubara indices.

Two interchangeable implementations live here: numba-compiled loops with
Neumaier compensated accumulation, and plain numpy versions that use
``math.fsum``. The numba path is used when numba imports and the environment
variable ``QKRAMERS_DISABLE_NUMBA`` is unset (or falsy).

All series kernels take arrays indexed by ``n = 0..N`` as stored in a
Matsubara table and skip the ``n = 0`` entry unless stated otherwise.
"""

import math
import os
from types import SimpleNamespace

import numpy as np

DISABLE_ENV = "QKRAMERS_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None


def _numba_requested():
    flag = os.environ.get(DISABLE_ENV, "").strip().lower()
    return flag in ("", "0", "false", "no", "off")


# --------------------------------------------------------------------------
# scalar closed forms (plain math; also compiled as the numba building blocks)


def drude_g_scalar(b, a, gamma, s):
    m = min(a, b)
    y = abs(a - b) * s
    phi = 1.0 if y == 0.0 else -math.expm1(-y) / y
    val = math.exp(-m * s) * (math.exp(-y) - m * s * phi)
    return gamma * a * a * val / (a + b)


def drude_f_scalar(nu, a, gamma, s):
    b = abs(nu)
    m = min(a, b)
    y = abs(a - b) * s
    phi = 1.0 if y == 0.0 else -math.expm1(-y) / y
    return gamma * a * a * nu * s * math.exp(-m * s) * phi / (a + b)


# --------------------------------------------------------------------------
# numpy implementations


def _phi_np(x):
    """expm1(x)/x with the removable singularity filled in."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = x != 0.0
    out[nz] = np.expm1(x[nz]) / x[nz]
    return out


def drude_g_np(b, a, gamma, s):
    """Cosine coefficient g_n(s) for |nu_n| = b, Drude cutoff a."""
    b = np.asarray(b, dtype=float)
    m = np.minimum(a, b)
    d = np.abs(a - b)
    val = np.exp(-m * s) * (np.exp(-d * s) - m * s * _phi_np(-d * s))
    return gamma * a * a * val / (a + b)


def drude_f_np(nu, a, gamma, s):
    """Sine coefficient f_n(s) for signed nu_n, Drude cutoff a."""
    nu = np.asarray(nu, dtype=float)
    b = np.abs(nu)
    m = np.minimum(a, b)
    d = np.abs(a - b)
    return gamma * a * a * nu * s * np.exp(-m * s) * _phi_np(-d * s) / (a + b)


def _sum_np(x):
    return math.fsum(np.asarray(x, dtype=float).tolist())


def _sum_log1p_np(x):
    return _sum_np(np.log1p(x))


def _c1_partial_np(nu, u, gamma, a, s):
    return _sum_np(u[1:] * drude_g_np(nu[1:], a, gamma, s))


def _c2_partial_np(nu, u, gamma, a, s):
    return _sum_np(nu[1:] * u[1:] * drude_f_np(nu[1:], a, gamma, s))


def _cos_sum_np(coef, nu, sigma):
    return _sum_np(coef[1:] * np.cos(nu[1:] * sigma))


def _sin_sum_np(coef, nu, sigma):
    return _sum_np(coef[1:] * np.sin(nu[1:] * sigma))


def _path_functionals_np(nu, gamma, a, s, wx, block=256):
    n_total = nu.shape[0]
    fvals = np.empty(n_total)
    gvals = np.empty(n_total)
    for start in range(0, n_total, block):
        sl = slice(start, min(start + block, n_total))
        col = nu[sl][:, None]
        fvals[sl] = drude_f_np(col, a, gamma, s[None, :]) @ wx
        gvals[sl] = drude_g_np(np.abs(col), a, gamma, s[None, :]) @ wx
    return fvals, gvals


numpy_impl = SimpleNamespace(
    name="numpy",
    compensated_sum=_sum_np,
    sum_log1p=_sum_log1p_np,
    c1_partial=_c1_partial_np,
    c2_partial=_c2_partial_np,
    cos_sum=_cos_sum_np,
    sin_sum=_sin_sum_np,
    path_functionals=_path_functionals_np,
)


# --------------------------------------------------------------------------
# numba implementations


def _build_numba():
    njit = numba.njit(cache=True, fastmath=False)

    g_coeff = njit(drude_g_scalar)
    f_coeff = njit(drude_f_scalar)

    @njit
    def neumaier(x):
        total = 0.0
        comp = 0.0
        for i in range(x.shape[0]):
            v = x[i]
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
        return total + comp

    @njit
    def sum_log1p(x):
        total = 0.0
        comp = 0.0
        for i in range(x.shape[0]):
            v = math.log1p(x[i])
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
        return total + comp

    @njit
    def c1_partial(nu, u, gamma, a, s):
        total = 0.0
        comp = 0.0
        for n in range(1, nu.shape[0]):
            v = u[n] * g_coeff(nu[n], a, gamma, s)
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
        return total + comp

    @njit
    def c2_partial(nu, u, gamma, a, s):
        total = 0.0
        comp = 0.0
        for n in range(1, nu.shape[0]):
            v = nu[n] * u[n] * f_coeff(nu[n], a, gamma, s)
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
        return total + comp

    @njit
    def cos_sum(coef, nu, sigma):
        total = 0.0
        comp = 0.0
        for n in range(1, nu.shape[0]):
            v = coef[n] * math.cos(nu[n] * sigma)
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
        return total + comp

    @njit
    def sin_sum(coef, nu, sigma):
        total = 0.0
        comp = 0.0
        for n in range(1, nu.shape[0]):
            v = coef[n] * math.sin(nu[n] * sigma)
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
        return total + comp

    @njit
    def path_functionals(nu, gamma, a, s, wx):
        n_total = nu.shape[0]
        fvals = np.empty(n_total)
        gvals = np.empty(n_total)
        for n in range(n_total):
            fs = 0.0
            gs = 0.0
            b = abs(nu[n])
            for j in range(s.shape[0]):
                fs += wx[j] * f_coeff(nu[n], a, gamma, s[j])
                gs += wx[j] * g_coeff(b, a, gamma, s[j])
            fvals[n] = fs
            gvals[n] = gs
        return fvals, gvals

    def _c1(nu, u, gamma, a, s):
        return c1_partial(nu, u, float(gamma), float(a), float(s))

    def _c2(nu, u, gamma, a, s):
        return c2_partial(nu, u, float(gamma), float(a), float(s))

    def _as_f8(x):
        return np.ascontiguousarray(x, dtype=np.float64)

    return SimpleNamespace(
        name="numba",
        compensated_sum=lambda x: neumaier(_as_f8(x)),
        sum_log1p=lambda x: sum_log1p(_as_f8(x)),
        c1_partial=_c1,
        c2_partial=_c2,
        cos_sum=lambda coef, nu, sigma: cos_sum(_as_f8(coef), nu, float(sigma)),
        sin_sum=lambda coef, nu, sigma: sin_sum(_as_f8(coef), nu, float(sigma)),
        path_functionals=lambda nu, gamma, a, s, wx: path_functionals(
            nu, float(gamma), float(a), _as_f8(s), _as_f8(wx)
        ),
    )


numba_impl = _build_numba() if numba is not None else None


def implementations():
    """All importable backends keyed by name."""
    out = {"numpy": numpy_impl}
    if numba_impl is not None:
        out["numba"] = numba_impl
    return out


active = numba_impl if (numba_impl is not None and _numba_requested()) else numpy_impl
BACKEND = active.name

compensated_sum = active.compensated_sum
sum_log1p = active.sum_log1p
c1_partial = active.c1_partial
c2_partial = active.c2_partial
cos_sum = active.cos_sum
sin_sum = active.sin_sum
path_functionals = active.path_functionals
