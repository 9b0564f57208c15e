"""Pure Python/NumPy reference kernels.

Same algorithms as the compiled core, kept in lockstep so the parity
tests can compare them directly. The tracking loop uses plain floats;
NumPy's per-call overhead would dominate at these tiny sizes.
"""

from math import acos, sqrt

import numpy as np

# Monomial order for cubic polynomials on the sphere, exponents of
# (x, y, z): 1, x, y, z, x2, xy, xz, y2, yz, z2,
# x3, x2y, x2z, xy2, xyz, xz2, y3, y2z, yz2, z3.
MONOMIAL_EXPONENTS = (
    (0, 0, 0),
    (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2),
    (3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1), (1, 0, 2),
    (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3),
)
N_MONOMIALS = len(MONOMIAL_EXPONENTS)

_PSD_TOL = 1e-8
_MAX_STEP = 0.5
_ARMIJO = 1e-4


def eval_cubic(c, x, y, z):
    """Value, gradient (3,) and Hessian (6: xx,xy,xz,yy,yz,zz)."""
    v = (
        c[0] + c[1] * x + c[2] * y + c[3] * z
        + c[4] * x * x + c[5] * x * y + c[6] * x * z
        + c[7] * y * y + c[8] * y * z + c[9] * z * z
        + c[10] * x * x * x + c[11] * x * x * y + c[12] * x * x * z
        + c[13] * x * y * y + c[14] * x * y * z + c[15] * x * z * z
        + c[16] * y * y * y + c[17] * y * y * z + c[18] * y * z * z
        + c[19] * z * z * z
    )
    gx = (
        c[1] + 2 * c[4] * x + c[5] * y + c[6] * z
        + 3 * c[10] * x * x + 2 * c[11] * x * y + 2 * c[12] * x * z
        + c[13] * y * y + c[14] * y * z + c[15] * z * z
    )
    gy = (
        c[2] + c[5] * x + 2 * c[7] * y + c[8] * z
        + c[11] * x * x + 2 * c[13] * x * y + c[14] * x * z
        + 3 * c[16] * y * y + 2 * c[17] * y * z + c[18] * z * z
    )
    gz = (
        c[3] + c[6] * x + c[8] * y + 2 * c[9] * z
        + c[12] * x * x + c[14] * x * y + 2 * c[15] * x * z
        + c[17] * y * y + 2 * c[18] * y * z + 3 * c[19] * z * z
    )
    hxx = 2 * c[4] + 6 * c[10] * x + 2 * c[11] * y + 2 * c[12] * z
    hxy = c[5] + 2 * c[11] * x + 2 * c[13] * y + c[14] * z
    hxz = c[6] + 2 * c[12] * x + c[14] * y + 2 * c[15] * z
    hyy = 2 * c[7] + 2 * c[13] * x + 6 * c[16] * y + 2 * c[17] * z
    hyz = c[8] + c[14] * x + 2 * c[17] * y + 2 * c[18] * z
    hzz = 2 * c[9] + 2 * c[15] * x + 2 * c[18] * y + 6 * c[19] * z
    return v, (gx, gy, gz), (hxx, hxy, hxz, hyy, hyz, hzz)


def _value_only(c, x, y, z):
    return (
        c[0] + c[1] * x + c[2] * y + c[3] * z
        + c[4] * x * x + c[5] * x * y + c[6] * x * z
        + c[7] * y * y + c[8] * y * z + c[9] * z * z
        + c[10] * x * x * x + c[11] * x * x * y + c[12] * x * x * z
        + c[13] * x * y * y + c[14] * x * y * z + c[15] * x * z * z
        + c[16] * y * y * y + c[17] * y * y * z + c[18] * y * z * z
        + c[19] * z * z * z
    )


def _tangent_basis(mx, my, mz):
    ax, ay, az = abs(mx), abs(my), abs(mz)
    if ax <= ay and ax <= az:
        t1x, t1y, t1z = 1.0 - mx * mx, -mx * my, -mx * mz
    elif ay <= az:
        t1x, t1y, t1z = -my * mx, 1.0 - my * my, -my * mz
    else:
        t1x, t1y, t1z = -mz * mx, -mz * my, 1.0 - mz * mz
    nrm = sqrt(t1x * t1x + t1y * t1y + t1z * t1z)
    t1x, t1y, t1z = t1x / nrm, t1y / nrm, t1z / nrm
    t2x = my * t1z - mz * t1y
    t2y = mz * t1x - mx * t1z
    t2z = mx * t1y - my * t1x
    return t1x, t1y, t1z, t2x, t2y, t2z


def _retract(mx, my, mz, dx, dy, dz):
    px, py, pz = mx + dx, my + dy, mz + dz
    nrm = sqrt(px * px + py * py + pz * pz)
    return px / nrm, py / nrm, pz / nrm


def minimize_cubic_sphere(c, m0, tol, max_iter):
    """Projected Newton on the unit sphere.

    Returns (m, value, converged). Falls back to capped steepest descent
    when the tangent Hessian is not usable and to a negative-curvature
    line search near saddles and fold shoulders, where the gradient is
    noise but the curvature still points downhill.
    """
    mx, my, mz = m0
    v = 0.0
    for _ in range(max_iter):
        v, (gx, gy, gz), (hxx, hxy, hxz, hyy, hyz, hzz) = eval_cubic(c, mx, my, mz)
        t1x, t1y, t1z, t2x, t2y, t2z = _tangent_basis(mx, my, mz)
        g1 = gx * t1x + gy * t1y + gz * t1z
        g2 = gx * t2x + gy * t2y + gz * t2z
        gm = gx * mx + gy * my + gz * mz
        # H t1 and H t2
        a1x = hxx * t1x + hxy * t1y + hxz * t1z
        a1y = hxy * t1x + hyy * t1y + hyz * t1z
        a1z = hxz * t1x + hyz * t1y + hzz * t1z
        a2x = hxx * t2x + hxy * t2y + hxz * t2z
        a2y = hxy * t2x + hyy * t2y + hyz * t2z
        a2z = hxz * t2x + hyz * t2y + hzz * t2z
        h11 = t1x * a1x + t1y * a1y + t1z * a1z - gm
        h12 = t2x * a1x + t2y * a1y + t2z * a1z
        h22 = t2x * a2x + t2y * a2y + t2z * a2z - gm
        gn = sqrt(g1 * g1 + g2 * g2)
        tr = h11 + h22
        det = h11 * h22 - h12 * h12
        disc = tr * tr - 4.0 * det
        lmin = 0.5 * (tr - sqrt(disc if disc > 0.0 else 0.0))
        if gn <= tol and lmin >= -_PSD_TOL:
            return (mx, my, mz), v, True
        if lmin < -_PSD_TOL and gn < 0.1 * -lmin:
            # saddle or fold shoulder: the curvature gain dominates any
            # gradient step, so line-search the negative direction
            if abs(h12) > 1e-300:
                e1, e2 = lmin - h22, h12
                en = sqrt(e1 * e1 + e2 * e2)
                e1, e2 = e1 / en, e2 / en
            elif h11 < h22:
                e1, e2 = 1.0, 0.0
            else:
                e1, e2 = 0.0, 1.0
            dx = _MAX_STEP * (e1 * t1x + e2 * t2x)
            dy = _MAX_STEP * (e1 * t1y + e2 * t2y)
            dz = _MAX_STEP * (e1 * t1z + e2 * t2z)
            alpha = 1.0
            px, py, pz = mx, my, mz
            for _bt in range(60):
                px, py, pz = _retract(mx, my, mz, alpha * dx, alpha * dy, alpha * dz)
                if _value_only(c, px, py, pz) < v:
                    break
                qx, qy, qz = _retract(mx, my, mz, -alpha * dx, -alpha * dy, -alpha * dz)
                if _value_only(c, qx, qy, qz) < v:
                    px, py, pz = qx, qy, qz
                    break
                alpha *= 0.5
            mx, my, mz = px, py, pz
            continue
        newton = det > 1e-14 and h11 > 0.0
        if newton:
            d1 = (-g1 * h22 + g2 * h12) / det
            d2 = (-g2 * h11 + g1 * h12) / det
            if d1 * g1 + d2 * g2 >= 0.0:
                newton = False
        if not newton:
            # steepest descent scaled to the step cap; small gradients on
            # near-fold shoulders otherwise crawl for thousands of steps
            gs = _MAX_STEP / gn
            d1, d2 = -g1 * gs, -g2 * gs
        dn = sqrt(d1 * d1 + d2 * d2)
        if dn > _MAX_STEP:
            d1 *= _MAX_STEP / dn
            d2 *= _MAX_STEP / dn
        slope = d1 * g1 + d2 * g2
        dx = d1 * t1x + d2 * t2x
        dy = d1 * t1y + d2 * t2y
        dz = d1 * t1z + d2 * t2z
        if -slope <= 1e-13 * (1.0 + abs(v)):
            # predicted decrease below float resolution of V: bare step
            mx, my, mz = _retract(mx, my, mz, dx, dy, dz)
            continue
        alpha = 1.0
        px, py, pz = mx, my, mz
        for _bt in range(60):
            px, py, pz = _retract(mx, my, mz, alpha * dx, alpha * dy, alpha * dz)
            if _value_only(c, px, py, pz) <= v + _ARMIJO * alpha * slope:
                break
            alpha *= 0.5
        mx, my, mz = px, py, pz
    v = _value_only(c, mx, my, mz)
    return (mx, my, mz), v, False


def track_cubic_sphere(cb, cp, ce, s_grid, m0, tol, max_iter, cont_bound, out_m, out_v):
    """Warm-started minimization along the schedule grid.

    Coefficients at s are (1-s)*cb + s*cp + s*(1-s)*ce. Returns
    (status, index): status 0 clean, 1 non-convergence, 2 continuity
    violation; index points at the first offending grid point (-1 when
    clean). Tracking continues past failures so the full trajectory is
    always recorded.
    """
    mx, my, mz = float(m0[0]), float(m0[1]), float(m0[2])
    status = 0
    bad = -1
    c = [0.0] * N_MONOMIALS
    for k in range(len(s_grid)):
        s = float(s_grid[k])
        wb, wp, we = 1.0 - s, s, s * (1.0 - s)
        for i in range(N_MONOMIALS):
            c[i] = wb * cb[i] + wp * cp[i] + we * ce[i]
        pmx, pmy, pmz = mx, my, mz
        (mx, my, mz), v, conv = minimize_cubic_sphere(c, (mx, my, mz), tol, max_iter)
        if not conv and status == 0:
            status, bad = 1, k
        if k > 0:
            dot = pmx * mx + pmy * my + pmz * mz
            dot = 1.0 if dot > 1.0 else (-1.0 if dot < -1.0 else dot)
            if acos(dot) > cont_bound and status == 0:
                status, bad = 2, k
        out_m[k, 0], out_m[k, 1], out_m[k, 2] = mx, my, mz
        out_v[k] = v
    return status, bad


def apply_clause_ops(psi, n, positions, mats, out):
    """Accumulate the embedded clause-operator action into ``out``.

    ``positions`` holds each clause's bit positions inside the basis
    index, most significant first; ``mats`` the per-clause matrices.
    """
    C, b = positions.shape
    d = 1 << b
    t = psi.reshape((2,) * n)
    for ci in range(C):
        qubits = [n - 1 - int(p) for p in positions[ci]]
        moved = np.moveaxis(t, qubits, range(b)).reshape(d, -1)
        res = mats[ci] @ moved
        res = np.moveaxis(res.reshape((2,) * n), range(b), qubits)
        out += res.reshape(-1)
