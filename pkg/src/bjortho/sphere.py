"""Maximizing a linear functional over the unit sphere of an arbitrary norm.

Works only with norm evaluations, so corners and flat faces are handled the
same way as smooth spheres: each step is an exact angular search in the
2-plane spanned by the current point and a probe direction.
"""

from __future__ import annotations

import math

import numpy as np

from .optimize import golden_section

ANGLE_TOL = 1e-13


def _plane_step(norm, c, z, d, phase):
    """Best point of the 2-plane span{z, d} for the real functional Re(conj(phase) <w, c>)."""
    lz = (np.conj(phase) * np.vdot(c, z)).real
    ld = (np.conj(phase) * np.vdot(c, d)).real
    # positive half-circle of the functional in this plane
    center = math.atan2(ld, lz)
    lo, hi = center - math.pi / 2, center + math.pi / 2

    def neg_ratio(theta):
        w = math.cos(theta) * z + math.sin(theta) * d
        nw = norm(w)
        return -(math.cos(theta) * lz + math.sin(theta) * ld) / nw if nw > 0 else 0.0

    theta, val = golden_section(neg_ratio, lo, hi, xtol=ANGLE_TOL)
    w = math.cos(theta) * z + math.sin(theta) * d
    return w / norm(w), -val


def maximize_pairing(norm, c, start=None, rng=None, rtol=1e-15, max_rounds=200, n_random=2):
    """Return ``(z, value)`` with ``||z|| = 1`` maximizing ``|<z, c>|``.

    ``norm`` is any callable norm with ``dim``/``is_complex`` attributes (a
    ``NormOracle``). The value is the dual norm of ``c``. Ascent is monotone.
    """
    c = np.asarray(c)
    n = c.shape[0]
    cplx = bool(getattr(norm, "is_complex", np.iscomplexobj(c)))
    dtype = complex if cplx else float
    c = c.astype(dtype)
    rng = np.random.default_rng(rng)
    if not np.any(c):
        z = np.zeros(n, dtype=dtype)
        z[0] = 1
        return z / norm(z), 0.0

    z = c.copy() if start is None else np.asarray(start, dtype=dtype).copy()
    if abs(np.vdot(c, z)) == 0 or not np.any(z):
        z = c.copy()
    z = z / norm(z)
    value = abs(np.vdot(c, z))

    eye = np.eye(n, dtype=dtype)
    base_dirs = [c / np.linalg.norm(c)] + list(eye)
    if cplx:
        base_dirs += list(1j * eye)

    for _ in range(max_rounds):
        start_value = value
        dirs = list(base_dirs)
        for _ in range(n_random):
            d = rng.standard_normal(n)
            if cplx:
                d = d + 1j * rng.standard_normal(n)
            dirs.append(d)
        for d in dirs:
            # real-orthogonalize against z; skip directions parallel to it
            d = d - (np.vdot(z, d).real / np.vdot(z, z).real) * z
            dn = np.linalg.norm(d)
            if dn < 1e-12 * np.linalg.norm(z):
                continue
            d = d / dn * np.linalg.norm(z)
            pz = np.vdot(c, z)
            phase = pz / abs(pz)
            w, _ = _plane_step(norm, c, z, d, phase)
            wv = abs(np.vdot(c, w))
            if wv > value:
                z, value = w, wv
        if value - start_value <= rtol * value:
            break
    return z, float(value)
