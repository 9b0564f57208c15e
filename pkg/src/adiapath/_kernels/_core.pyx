# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: cubic-on-sphere tracking and clause-operator action.

Mirrors _ref.py step for step; keep the two in lockstep.
"""

from libc.math cimport acos, fabs, sqrt

N_MONOMIALS = 20

cdef double _PSD_TOL = 1e-8
cdef double _MAX_STEP = 0.5
cdef double _ARMIJO = 1e-4


cdef inline double _value_only(double* c, double x, double y, double z) noexcept nogil:
    return (
        c[0] + c[1] * x + c[2] * y + c[3] * z
        + c[4] * x * x + c[5] * x * y + c[6] * x * z
        + c[7] * y * y + c[8] * y * z + c[9] * z * z
        + c[10] * x * x * x + c[11] * x * x * y + c[12] * x * x * z
        + c[13] * x * y * y + c[14] * x * y * z + c[15] * x * z * z
        + c[16] * y * y * y + c[17] * y * y * z + c[18] * y * z * z
        + c[19] * z * z * z
    )


cdef inline double _eval_cubic(double* c, double x, double y, double z,
                               double* g, double* h) noexcept nogil:
    # g: (gx, gy, gz); h: (xx, xy, xz, yy, yz, zz)
    g[0] = (
        c[1] + 2 * c[4] * x + c[5] * y + c[6] * z
        + 3 * c[10] * x * x + 2 * c[11] * x * y + 2 * c[12] * x * z
        + c[13] * y * y + c[14] * y * z + c[15] * z * z
    )
    g[1] = (
        c[2] + c[5] * x + 2 * c[7] * y + c[8] * z
        + c[11] * x * x + 2 * c[13] * x * y + c[14] * x * z
        + 3 * c[16] * y * y + 2 * c[17] * y * z + c[18] * z * z
    )
    g[2] = (
        c[3] + c[6] * x + c[8] * y + 2 * c[9] * z
        + c[12] * x * x + c[14] * x * y + 2 * c[15] * x * z
        + c[17] * y * y + 2 * c[18] * y * z + 3 * c[19] * z * z
    )
    h[0] = 2 * c[4] + 6 * c[10] * x + 2 * c[11] * y + 2 * c[12] * z
    h[1] = c[5] + 2 * c[11] * x + 2 * c[13] * y + c[14] * z
    h[2] = c[6] + 2 * c[12] * x + c[14] * y + 2 * c[15] * z
    h[3] = 2 * c[7] + 2 * c[13] * x + 6 * c[16] * y + 2 * c[17] * z
    h[4] = c[8] + c[14] * x + 2 * c[17] * y + 2 * c[18] * z
    h[5] = 2 * c[9] + 2 * c[15] * x + 2 * c[18] * y + 6 * c[19] * z
    return _value_only(c, x, y, z)


cdef inline void _tangent_basis(double mx, double my, double mz, double* t) noexcept nogil:
    # t: (t1x, t1y, t1z, t2x, t2y, t2z)
    cdef double ax = fabs(mx), ay = fabs(my), az = fabs(mz)
    cdef double nrm
    if ax <= ay and ax <= az:
        t[0] = 1.0 - mx * mx; t[1] = -mx * my; t[2] = -mx * mz
    elif ay <= az:
        t[0] = -my * mx; t[1] = 1.0 - my * my; t[2] = -my * mz
    else:
        t[0] = -mz * mx; t[1] = -mz * my; t[2] = 1.0 - mz * mz
    nrm = sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2])
    t[0] /= nrm; t[1] /= nrm; t[2] /= nrm
    t[3] = my * t[2] - mz * t[1]
    t[4] = mz * t[0] - mx * t[2]
    t[5] = mx * t[1] - my * t[0]


cdef inline void _retract(double mx, double my, double mz,
                          double dx, double dy, double dz, double* p) noexcept nogil:
    cdef double px = mx + dx, py = my + dy, pz = mz + dz
    cdef double nrm = sqrt(px * px + py * py + pz * pz)
    p[0] = px / nrm; p[1] = py / nrm; p[2] = pz / nrm


cdef int _minimize(double* c, double* m, double tol, int max_iter, double* v_out) noexcept nogil:
    """Projected Newton with descent fallbacks; 1 on convergence. See _ref."""
    cdef double mx = m[0], my = m[1], mz = m[2]
    cdef double g[3]
    cdef double h[6]
    cdef double t[6]
    cdef double p[3]
    cdef double q[3]
    cdef double v, g1, g2, gm, h11, h12, h22, gn, tr, det, disc, lmin
    cdef double e1, e2, en, d1, d2, dn, gs, slope, alpha, dx, dy, dz
    cdef double a1x, a1y, a1z, a2x, a2y, a2z
    cdef int it, bt
    cdef bint newton
    for it in range(max_iter):
        v = _eval_cubic(c, mx, my, mz, g, h)
        _tangent_basis(mx, my, mz, t)
        g1 = g[0] * t[0] + g[1] * t[1] + g[2] * t[2]
        g2 = g[0] * t[3] + g[1] * t[4] + g[2] * t[5]
        gm = g[0] * mx + g[1] * my + g[2] * mz
        a1x = h[0] * t[0] + h[1] * t[1] + h[2] * t[2]
        a1y = h[1] * t[0] + h[3] * t[1] + h[4] * t[2]
        a1z = h[2] * t[0] + h[4] * t[1] + h[5] * t[2]
        a2x = h[0] * t[3] + h[1] * t[4] + h[2] * t[5]
        a2y = h[1] * t[3] + h[3] * t[4] + h[4] * t[5]
        a2z = h[2] * t[3] + h[4] * t[4] + h[5] * t[5]
        h11 = t[0] * a1x + t[1] * a1y + t[2] * a1z - gm
        h12 = t[3] * a1x + t[4] * a1y + t[5] * a1z
        h22 = t[3] * a2x + t[4] * a2y + t[5] * a2z - gm
        gn = sqrt(g1 * g1 + g2 * g2)
        tr = h11 + h22
        det = h11 * h22 - h12 * h12
        disc = tr * tr - 4.0 * det
        lmin = 0.5 * (tr - sqrt(disc if disc > 0.0 else 0.0))
        if gn <= tol and lmin >= -_PSD_TOL:
            m[0] = mx; m[1] = my; m[2] = mz
            v_out[0] = v
            return 1
        if lmin < -_PSD_TOL and gn < 0.1 * -lmin:
            # saddle or fold shoulder: the curvature gain dominates any
            # gradient step, so line-search the negative direction
            if fabs(h12) > 1e-300:
                e1 = lmin - h22; e2 = h12
                en = sqrt(e1 * e1 + e2 * e2)
                e1 /= en; e2 /= en
            elif h11 < h22:
                e1 = 1.0; e2 = 0.0
            else:
                e1 = 0.0; e2 = 1.0
            dx = _MAX_STEP * (e1 * t[0] + e2 * t[3])
            dy = _MAX_STEP * (e1 * t[1] + e2 * t[4])
            dz = _MAX_STEP * (e1 * t[2] + e2 * t[5])
            alpha = 1.0
            p[0] = mx; p[1] = my; p[2] = mz
            for bt in range(60):
                _retract(mx, my, mz, alpha * dx, alpha * dy, alpha * dz, p)
                if _value_only(c, p[0], p[1], p[2]) < v:
                    break
                _retract(mx, my, mz, -alpha * dx, -alpha * dy, -alpha * dz, q)
                if _value_only(c, q[0], q[1], q[2]) < v:
                    p[0] = q[0]; p[1] = q[1]; p[2] = q[2]
                    break
                alpha *= 0.5
            mx = p[0]; my = p[1]; mz = p[2]
            continue
        newton = det > 1e-14 and h11 > 0.0
        if newton:
            d1 = (-g1 * h22 + g2 * h12) / det
            d2 = (-g2 * h11 + g1 * h12) / det
            if d1 * g1 + d2 * g2 >= 0.0:
                newton = 0
        if not newton:
            # steepest descent scaled to the step cap; small gradients on
            # near-fold shoulders otherwise crawl for thousands of steps
            gs = _MAX_STEP / gn
            d1 = -g1 * gs; d2 = -g2 * gs
        dn = sqrt(d1 * d1 + d2 * d2)
        if dn > _MAX_STEP:
            d1 *= _MAX_STEP / dn
            d2 *= _MAX_STEP / dn
        slope = d1 * g1 + d2 * g2
        dx = d1 * t[0] + d2 * t[3]
        dy = d1 * t[1] + d2 * t[4]
        dz = d1 * t[2] + d2 * t[5]
        if -slope <= 1e-13 * (1.0 + fabs(v)):
            # predicted decrease below float resolution of V: bare step
            _retract(mx, my, mz, dx, dy, dz, p)
            mx = p[0]; my = p[1]; mz = p[2]
            continue
        alpha = 1.0
        p[0] = mx; p[1] = my; p[2] = mz
        for bt in range(60):
            _retract(mx, my, mz, alpha * dx, alpha * dy, alpha * dz, p)
            if _value_only(c, p[0], p[1], p[2]) <= v + _ARMIJO * alpha * slope:
                break
            alpha *= 0.5
        mx = p[0]; my = p[1]; mz = p[2]
    m[0] = mx; m[1] = my; m[2] = mz
    v_out[0] = _value_only(c, mx, my, mz)
    return 0


def minimize_cubic_sphere(double[::1] c, m0, double tol, int max_iter):
    """Single minimization; mirrors _ref.minimize_cubic_sphere."""
    cdef double m[3]
    cdef double v = 0.0
    m[0] = m0[0]; m[1] = m0[1]; m[2] = m0[2]
    cdef int conv = _minimize(&c[0], m, tol, max_iter, &v)
    return (m[0], m[1], m[2]), v, bool(conv)


def track_cubic_sphere(double[::1] cb, double[::1] cp, double[::1] ce,
                       double[::1] s_grid, m0, double tol, int max_iter,
                       double cont_bound, double[:, ::1] out_m, double[::1] out_v):
    """Warm-started minimization along the schedule grid; see _ref."""
    cdef double c[20]
    cdef double m[3]
    cdef double v = 0.0
    cdef double s, wb, wp, we, dot, pmx, pmy, pmz
    cdef Py_ssize_t k, i
    cdef int status = 0, conv
    cdef Py_ssize_t bad = -1
    m[0] = m0[0]; m[1] = m0[1]; m[2] = m0[2]
    for k in range(s_grid.shape[0]):
        s = s_grid[k]
        wb = 1.0 - s; wp = s; we = s * (1.0 - s)
        for i in range(20):
            c[i] = wb * cb[i] + wp * cp[i] + we * ce[i]
        pmx = m[0]; pmy = m[1]; pmz = m[2]
        conv = _minimize(c, m, tol, max_iter, &v)
        if conv == 0 and status == 0:
            status = 1; bad = k
        if k > 0:
            dot = pmx * m[0] + pmy * m[1] + pmz * m[2]
            if dot > 1.0:
                dot = 1.0
            elif dot < -1.0:
                dot = -1.0
            if acos(dot) > cont_bound and status == 0:
                status = 2; bad = k
        out_m[k, 0] = m[0]; out_m[k, 1] = m[1]; out_m[k, 2] = m[2]
        out_v[k] = v
    return status, int(bad)


def apply_clause_ops(double complex[::1] psi, int n, long long[:, ::1] positions,
                     double complex[:, :, ::1] mats, double complex[::1] out):
    """Accumulate embedded clause-operator action into ``out``; see _ref."""
    cdef Py_ssize_t C = positions.shape[0]
    cdef int b = <int> positions.shape[1]
    cdef int d = 1 << b
    cdef Py_ssize_t rest = (<Py_ssize_t> 1) << (n - b)
    cdef long long offs[256]
    cdef long long pos_asc[32]
    cdef double complex x[256]
    cdef double complex acc
    cdef Py_ssize_t ci, r
    cdef long long base, off, pkey
    cdef int t, l, row, col, j
    if d > 256:
        raise ValueError("clause arity too large for the compiled kernel")
    for ci in range(C):
        for t in range(d):
            off = 0
            for l in range(b):
                off |= ((t >> (b - 1 - l)) & 1) << positions[ci, l]
            offs[t] = off
        for l in range(b):
            pos_asc[l] = positions[ci, l]
        # insertion sort ascending (b is tiny)
        for l in range(1, b):
            pkey = pos_asc[l]
            j = l - 1
            while j >= 0 and pos_asc[j] > pkey:
                pos_asc[j + 1] = pos_asc[j]
                j -= 1
            pos_asc[j + 1] = pkey
        with nogil:
            for r in range(rest):
                base = r
                for l in range(b):
                    base = ((base >> pos_asc[l]) << (pos_asc[l] + 1)) | (
                        base & (((<long long> 1) << pos_asc[l]) - 1)
                    )
                for t in range(d):
                    x[t] = psi[base + offs[t]]
                for row in range(d):
                    acc = 0
                    for col in range(d):
                        acc = acc + mats[ci, row, col] * x[col]
                    out[base + offs[row]] = out[base + offs[row]] + acc
