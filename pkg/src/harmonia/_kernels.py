"""Hot numeric kernels: numba-jitted loops with a pure-numpy fallback.

The numpy path is selected by setting HARMONIA_NUMBA=0 in the environment;
HARMONIA_NUMBA=1 makes a missing numba an import error. Default is numba
when importable. Both paths are exported so they can be compared directly
(see benchmarks/bench_kernels.py and tests/test_kernels.py).
"""

import os

import numpy as np

_flag = os.environ.get("HARMONIA_NUMBA", "").strip().lower()
_forbid = _flag in ("0", "false", "off", "no")
_require = _flag in ("1", "true", "on", "yes")

HAS_NUMBA = False
if not _forbid:
    try:
        import numba

        HAS_NUMBA = True
    except ImportError:
        if _require:
            raise
        HAS_NUMBA = False


def backend_name():
    return "numba" if HAS_NUMBA else "numpy"


def barycentric_eval_numpy(nodes, weights, values, pts, chunk=8192):
    """Barycentric interpolation of the polynomial through (nodes, values) at pts.

    All inputs are 1d float64; evaluation is exact when a point coincides
    with a node (the 0/0 is resolved by snapping to the stored value).
    """
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    out = np.empty(pts.shape, dtype=np.float64)
    for start in range(0, pts.size, chunk):
        p = pts[start:start + chunk]
        diff = p[:, None] - nodes[None, :]
        exact = diff == 0.0
        hit = exact.any(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = weights[None, :] / diff
            res = (w @ values) / w.sum(axis=1)
        if hit.any():
            res[hit] = values[exact.argmax(axis=1)[hit]]
        out[start:start + chunk] = res
    return out


def weighted_interp_sum_numpy(nodes, weights, values, pts, coeffs, chunk=8192):
    """sum_i coeffs[i] * interp(pts[i]) without materializing the interpolants."""
    total = 0.0
    for start in range(0, pts.size, chunk):
        vals = barycentric_eval_numpy(nodes, weights, values, pts[start:start + chunk])
        total += float(vals @ coeffs[start:start + chunk])
    return total


if HAS_NUMBA:

    @numba.njit(cache=True, parallel=True)
    def _bary_nb(nodes, weights, values, pts, out):
        m = nodes.shape[0]
        for i in numba.prange(pts.shape[0]):
            p = pts[i]
            num = 0.0
            den = 0.0
            res = 0.0
            hit = False
            for j in range(m):
                d = p - nodes[j]
                if d == 0.0:
                    res = values[j]
                    hit = True
                    break
                t = weights[j] / d
                num += t * values[j]
                den += t
            if not hit:
                res = num / den
            out[i] = res

    @numba.njit(cache=True, parallel=True)
    def _wsum_nb(nodes, weights, values, pts, coeffs):
        m = nodes.shape[0]
        total = 0.0
        for i in numba.prange(pts.shape[0]):
            p = pts[i]
            num = 0.0
            den = 0.0
            res = 0.0
            hit = False
            for j in range(m):
                d = p - nodes[j]
                if d == 0.0:
                    res = values[j]
                    hit = True
                    break
                t = weights[j] / d
                num += t * values[j]
                den += t
            if not hit:
                res = num / den
            total += coeffs[i] * res
        return total

    def barycentric_eval_numba(nodes, weights, values, pts):
        pts = np.ascontiguousarray(pts, dtype=np.float64)
        out = np.empty(pts.shape, dtype=np.float64)
        _bary_nb(nodes, weights, values, pts, out)
        return out

    def weighted_interp_sum_numba(nodes, weights, values, pts, coeffs):
        pts = np.ascontiguousarray(pts, dtype=np.float64)
        coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
        return float(_wsum_nb(nodes, weights, values, pts, coeffs))

    barycentric_eval = barycentric_eval_numba
    weighted_interp_sum = weighted_interp_sum_numba
else:
    barycentric_eval_numba = None
    weighted_interp_sum_numba = None
    barycentric_eval = barycentric_eval_numpy
    weighted_interp_sum = weighted_interp_sum_numpy
