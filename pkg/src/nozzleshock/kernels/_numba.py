"""Compiled versions of the hot loops.

Every function here has a twin with the same signature in ``_numpy``.
"""
import math

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def _w4(w):
    # four-point Lagrange weights for nodes -1, 0, 1, 2
    return (
        -w * (w - 1.0) * (w - 2.0) / 6.0,
        (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0,
        -(w + 1.0) * w * (w - 2.0) / 2.0,
        (w + 1.0) * w * (w - 1.0) / 6.0,
    )


@njit(cache=True)
def _pidx(n, period, t):
    q = t / period
    s = (q - math.floor(q)) * n
    i = int(math.floor(s))
    w = s - i
    if i >= n:
        i -= n
    return i, w


@njit(cache=True)
def _pcol(a, n, period, t, col):
    i, w = _pidx(n, period, t)
    c0, c1, c2, c3 = _w4(w)
    return (c0 * a[(i - 1 + n) % n, col] + c1 * a[i, col]
            + c2 * a[(i + 1) % n, col] + c3 * a[(i + 2) % n, col])


@njit(cache=True)
def _p1(f, n, period, t):
    i, w = _pidx(n, period, t)
    c0, c1, c2, c3 = _w4(w)
    return (c0 * f[(i - 1 + n) % n] + c1 * f[i]
            + c2 * f[(i + 1) % n] + c3 * f[(i + 2) % n])


@njit(cache=True)
def _uidx(m, x0, h, x):
    s = (x - x0) / h
    i = int(math.floor(s))
    if i < 1:
        i = 1
    elif i > m - 3:
        i = m - 3
    return i, s - i


@njit(cache=True)
def _u1(f, x0, h, x):
    i, w = _uidx(f.shape[0], x0, h, x)
    c0, c1, c2, c3 = _w4(w)
    return c0 * f[i - 1] + c1 * f[i] + c2 * f[i + 1] + c3 * f[i + 2]


@njit(cache=True)
def bicubic_scalar(field, n, period, x0, h, t, x):
    """Cubic in x (clamped stencil) times periodic cubic in t."""
    k, wx = _uidx(field.shape[1], x0, h, x)
    a0, a1, a2, a3 = _w4(wx)
    i, wt = _pidx(n, period, t)
    b0, b1, b2, b3 = _w4(wt)
    acc = 0.0
    for r, b in (((i - 1 + n) % n, b0), (i, b1), ((i + 1) % n, b2), ((i + 2) % n, b3)):
        acc += b * (a0 * field[r, k - 1] + a1 * field[r, k]
                    + a2 * field[r, k + 1] + a3 * field[r, k + 2])
    return acc


@njit(cache=True)
def periodic_cubic(f, n, period, tq):
    out = np.empty(tq.shape[0])
    for q in range(tq.shape[0]):
        out[q] = _p1(f, n, period, tq[q])
    return out


@njit(cache=True)
def uniform_cubic(f, x0, h, xq):
    out = np.empty(xq.shape[0])
    for q in range(xq.shape[0]):
        out[q] = _u1(f, x0, h, xq[q])
    return out


@njit(cache=True)
def bicubic(field, n, period, x0, h, tq, xq):
    out = np.empty(tq.shape[0])
    for q in range(tq.shape[0]):
        out[q] = bicubic_scalar(field, n, period, x0, h, tq[q], xq[q])
    return out


@njit(cache=True)
def _rk4_coeff(inv_lam, rate, n, period, t, delta, m0, m1, m2):
    k1t = _pcol(inv_lam, n, period, t, m0)
    k1i = _pcol(rate, n, period, t, m0)
    t2 = t + 0.5 * delta * k1t
    k2t = _pcol(inv_lam, n, period, t2, m1)
    k2i = _pcol(rate, n, period, t2, m1)
    t3 = t + 0.5 * delta * k2t
    k3t = _pcol(inv_lam, n, period, t3, m1)
    k3i = _pcol(rate, n, period, t3, m1)
    t4 = t + delta * k3t
    k4t = _pcol(inv_lam, n, period, t4, m2)
    k4i = _pcol(rate, n, period, t4, m2)
    dt = delta / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
    dj = delta / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
    return t + dt, dj


@njit(cache=True)
def march_linear(inv_lam, rate, n, period, start, hx, direction):
    """March a frozen-coefficient transport equation across x columns.

    ``inv_lam`` and ``rate`` hold 1/lambda and source/lambda on the
    half-node grid (shape ``(n, 2M+1)``).  ``direction=+1`` starts at
    column 0, ``-1`` at column M.  Returns rows t_0..t_n (t_n = T).
    """
    m_half = inv_lam.shape[1]
    m = (m_half - 1) // 2
    out = np.empty((n + 1, m + 1))
    dt = period / n
    prev = np.empty(n)
    for j in range(n):
        prev[j] = start[j]
    k = 0 if direction > 0 else m
    for j in range(n):
        out[j, k] = prev[j]
    out[n, k] = prev[0]
    new = np.empty(n + 1)
    for _ in range(m):
        k_new = k + direction
        delta = (k - k_new) * hx
        m0 = 2 * k_new
        m1 = k_new + k
        m2 = 2 * k
        for j in range(n + 1):
            tf, dj = _rk4_coeff(inv_lam, rate, n, period, j * dt, delta, m0, m1, m2)
            new[j] = _p1(prev, n, period, tf) - dj
        for j in range(n):
            prev[j] = new[j]
            out[j, k_new] = new[j]
        out[n, k_new] = new[n]
        k = k_new
    return out


@njit(cache=True)
def _coeff_at(a, n, period, x0h, hh, t, x):
    return bicubic_scalar(a, n, period, x0h, hh, t, x)


@njit(cache=True)
def _substep(inv_lam, rate, n, period, x0h, hh, t, x, s):
    # RK4 substep of length s from (t, x) using interpolated coefficients
    k1t = _coeff_at(inv_lam, n, period, x0h, hh, t, x)
    k1i = _coeff_at(rate, n, period, x0h, hh, t, x)
    t2 = t + 0.5 * s * k1t
    k2t = _coeff_at(inv_lam, n, period, x0h, hh, t2, x + 0.5 * s)
    k2i = _coeff_at(rate, n, period, x0h, hh, t2, x + 0.5 * s)
    t3 = t + 0.5 * s * k2t
    k3t = _coeff_at(inv_lam, n, period, x0h, hh, t3, x + 0.5 * s)
    k3i = _coeff_at(rate, n, period, x0h, hh, t3, x + 0.5 * s)
    t4 = t + s * k3t
    k4t = _coeff_at(inv_lam, n, period, x0h, hh, t4, x + s)
    k4i = _coeff_at(rate, n, period, x0h, hh, t4, x + s)
    return (t + s / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t),
            s / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i))


@njit(cache=True)
def trace_to_curve(inv_lam, rate, n, period, x0, hx, curve, xtol):
    """Follow forward characteristics from column 0 until x = curve(t).

    Returns ``(t_hit, x_hit, integral, status)`` with one entry per row
    t_0..t_n.  ``status`` is 0 on success, 1 if the start already lies
    right of the curve, 2 if no crossing is found inside the grid.
    """
    m = (inv_lam.shape[1] - 1) // 2
    dt = period / n
    hh = 0.5 * hx
    t_hit = np.empty(n + 1)
    x_hit = np.empty(n + 1)
    integ = np.empty(n + 1)
    status = 0
    for j in range(n + 1):
        t = j * dt
        acc = 0.0
        x = x0
        g = x - _p1(curve, n, period, t)
        if g >= 0.0:
            return t_hit, x_hit, integ, 1
        found = False
        for k in range(m):
            tn, dj = _rk4_coeff(inv_lam, rate, n, period, t, hx, 2 * k, 2 * k + 1, 2 * k + 2)
            xn = x0 + (k + 1) * hx
            gn = xn - _p1(curve, n, period, tn)
            if gn >= 0.0:
                # crossing within (x, xn]: regula falsi with bisection guard
                lo = 0.0
                hi = hx
                glo = g
                ghi = gn
                s = hi
                ts = tn
                js = dj
                for _ in range(200):
                    if hi - lo < xtol:
                        break
                    s = lo - glo * (hi - lo) / (ghi - glo)
                    if not (lo < s < hi) or (s - lo) < 0.01 * (hi - lo) or (hi - s) < 0.01 * (hi - lo):
                        s = 0.5 * (lo + hi)
                    ts, js = _substep(inv_lam, rate, n, period, x0, hh, t, x, s)
                    gs = x + s - _p1(curve, n, period, ts)
                    if gs >= 0.0:
                        hi = s
                        ghi = gs
                    else:
                        lo = s
                        glo = gs
                    if abs(gs) < 1e-15:
                        break
                t_hit[j] = ts
                x_hit[j] = x + s
                integ[j] = acc + js
                found = True
                break
            t = tn
            acc += dj
            x = xn
            g = gn
        if not found:
            status = 2
            t_hit[j] = np.nan
            x_hit[j] = np.nan
            integ[j] = np.nan
    return t_hit, x_hit, integ, status


@njit(cache=True)
def _win(col, nw, dt, t):
    # cubic interpolation on a one-sided time window; zero for t < 0
    s = t / dt
    i = int(math.floor(s))
    if i > nw - 2:
        i = nw - 2
    w = s - i
    c0, c1, c2, c3 = _w4(w)
    acc = 0.0
    for idx, c in ((i - 1, c0), (i, c1), (i + 1, c2), (i + 2, c3)):
        if idx >= 0:
            acc += c * col[idx]
    return acc


@njit(cache=True)
def march_supersonic(in1, in2, dt, ustar, slope, hx, tol_sonic, n_iter):
    """March perturbation invariants of the supersonic flow in x.

    ``in1``, ``in2`` are inlet values on the time window t_j = j*dt.
    Background velocity and relative slope are given per column.
    Returns ``(phi1, phi2, status)``; status 1 flags a sonic breakdown.
    """
    nw = in1.shape[0] - 1
    mx = ustar.shape[0]
    p1 = np.zeros((nw + 1, mx))
    p2 = np.zeros((nw + 1, mx))
    for j in range(nw + 1):
        p1[j, 0] = in1[j]
        p2[j, 0] = in2[j]
    for k in range(mx - 1):
        ua = ustar[k]
        ub = ustar[k + 1]
        ca1 = -slope[k] / (2.0 * ua - 2.0)
        ca2 = -slope[k] / (2.0 * ua + 2.0)
        cb1 = -slope[k + 1] / (2.0 * ub - 2.0)
        cb2 = -slope[k + 1] / (2.0 * ub + 2.0)
        c1 = p1[:, k]
        c2 = p2[:, k]
        for j in range(nw + 1):
            tj = j * dt
            n1 = c1[j]
            n2 = c2[j]
            f1 = tj - hx / (ua - 1.0 + 0.5 * (n1 + n2))
            f2 = tj - hx / (ua + 1.0 + 0.5 * (n1 + n2))
            for _ in range(n_iter):
                q11 = _win(c1, nw, dt, f1)
                q12 = _win(c2, nw, dt, f1)
                q21 = _win(c1, nw, dt, f2)
                q22 = _win(c2, nw, dt, f2)
                sf1 = q11 + q12
                sf2 = q21 + q22
                lf1 = ua - 1.0 + 0.5 * sf1
                lf2 = ua + 1.0 + 0.5 * sf2
                sn = n1 + n2
                ln1 = ub - 1.0 + 0.5 * sn
                ln2 = ub + 1.0 + 0.5 * sn
                if lf1 <= tol_sonic or ln1 <= tol_sonic:
                    return p1, p2, 1
                f1 = tj - 0.5 * hx * (1.0 / ln1 + 1.0 / lf1)
                f2 = tj - 0.5 * hx * (1.0 / ln2 + 1.0 / lf2)
                n1 = q11 + 0.5 * hx * (ca1 * sf1 / lf1 + cb1 * sn / ln1)
                n2 = q22 + 0.5 * hx * (ca2 * sf2 / lf2 + cb2 * sn / ln2)
            p1[j, k + 1] = n1
            p2[j, k + 1] = n2
    return p1, p2, 0


@njit(cache=True)
def _slope(shape_code, coeffs, x):
    if shape_code == 0:
        return coeffs[0]
    a = 0.0
    da = 0.0
    for i in range(coeffs.shape[0] - 1, -1, -1):
        da = da * x + a
        a = a * x + coeffs[i]
    return da / a


@njit(cache=True)
def _steady_rhs(shape_code, coeffs, x, rho, u):
    k = _slope(shape_code, coeffs, x)
    den = u * u - 1.0
    return -k * rho * u * u / den, k * u / den


@njit(cache=True)
def rk4_branch(shape_code, coeffs, x0, x1, n_steps, rho0, u0, tol_sonic):
    """Classical RK4 for the steady ODE pair on a uniform grid.

    Returns ``(x, rho, u, status)``; status is the index of the first
    node that came within ``tol_sonic`` of sonic or crossed it, or -1.
    """
    h = (x1 - x0) / n_steps
    xs = np.empty(n_steps + 1)
    rs = np.empty(n_steps + 1)
    us = np.empty(n_steps + 1)
    xs[0] = x0
    rs[0] = rho0
    us[0] = u0
    r = rho0
    u = u0
    for i in range(n_steps):
        x = x0 + i * h
        a1, b1 = _steady_rhs(shape_code, coeffs, x, r, u)
        a2, b2 = _steady_rhs(shape_code, coeffs, x + 0.5 * h, r + 0.5 * h * a1, u + 0.5 * h * b1)
        a3, b3 = _steady_rhs(shape_code, coeffs, x + 0.5 * h, r + 0.5 * h * a2, u + 0.5 * h * b2)
        a4, b4 = _steady_rhs(shape_code, coeffs, x + h, r + h * a3, u + h * b3)
        r = r + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        u = u + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        xs[i + 1] = x0 + (i + 1) * h
        rs[i + 1] = r
        us[i + 1] = u
        # a step may jump over the singularity, so watch the regime sign as well
        if abs(u - 1.0) < tol_sonic or not np.isfinite(u) or (u - 1.0) * (u0 - 1.0) <= 0.0 or not r > 0.0:
            return xs, rs, us, i + 1
    return xs, rs, us, -1


@njit(cache=True)
def _hll(rl, ml, rr, mr):
    ul = ml / rl
    ur = mr / rr
    sl = min(ul - 1.0, ur - 1.0)
    sr = max(ul + 1.0, ur + 1.0)
    fl0 = ml
    fl1 = ml * ul + rl
    fr0 = mr
    fr1 = mr * ur + rr
    if sl >= 0.0:
        return fl0, fl1
    if sr <= 0.0:
        return fr0, fr1
    inv = 1.0 / (sr - sl)
    return ((sr * fl0 - sl * fr0 + sl * sr * (rr - rl)) * inv,
            (sr * fl1 - sl * fr1 + sl * sr * (mr - ml)) * inv)


@njit(cache=True)
def hll_step(rho, m, a_face, a_cell, dx, dt, ghost_l, ghost_r):
    """One forward-Euler HLL step on area-weighted variables.

    ``ghost_l`` and ``ghost_r`` are (rho, m) pairs for the boundary
    cells.  Returns new ``(rho, m)``.
    """
    nc = rho.shape[0]
    f0 = np.empty(nc + 1)
    f1 = np.empty(nc + 1)
    for i in range(nc + 1):
        if i == 0:
            rl, ml = ghost_l[0], ghost_l[1]
        else:
            rl, ml = rho[i - 1], m[i - 1]
        if i == nc:
            rr, mr = ghost_r[0], ghost_r[1]
        else:
            rr, mr = rho[i], m[i]
        a, b = _hll(rl, ml, rr, mr)
        f0[i] = a
        f1[i] = b
    rn = np.empty(nc)
    mn = np.empty(nc)
    lam = dt / dx
    for i in range(nc):
        da = a_face[i + 1] - a_face[i]
        rn[i] = rho[i] - lam * (a_face[i + 1] * f0[i + 1] - a_face[i] * f0[i]) / a_cell[i]
        mn[i] = m[i] - lam * (a_face[i + 1] * f1[i + 1] - a_face[i] * f1[i] - da * rho[i]) / a_cell[i]
    return rn, mn


@njit(cache=True)
def shock_rhs(t, psi, uf, n, period, sx0, sh, rf, vf, px0, ph, lx, lu, lr, rx, rr, xstar):
    """Shock speed F at (t, x* + psi) from the sampled fields.

    ``uf`` is the subsonic mismatch U, ``rf``/``vf`` the supersonic
    density and velocity perturbations; ``lx, lu, lr`` and ``rx, rr``
    the left and right background branches.
    """
    x = xstar + psi
    U = bicubic_scalar(uf, n, period, sx0, sh, t, x)
    rb = bicubic_scalar(rf, n, period, px0, ph, t, x)
    ub = bicubic_scalar(vf, n, period, px0, ph, t, x)
    ul = np.interp(x, lx, lu)
    rl = np.interp(x, lx, lr)
    rrx = np.interp(x, rx, rr)
    return ul + ub - math.sqrt(rrx / (rl + rb)) * math.exp(0.5 * U)


@njit(cache=True)
def shock_flow(t0, x0, tau, n_steps, uf, n, period, sx0, sh, rf, vf, px0, ph,
               lx, lu, lr, rx, rr, xstar):
    """RK4 trajectory of the shock ODE; returns all n_steps + 1 samples."""
    h = tau / n_steps
    out = np.empty(n_steps + 1)
    x = x0
    out[0] = x
    for i in range(n_steps):
        t = t0 + i * h
        k1 = shock_rhs(t, x, uf, n, period, sx0, sh, rf, vf, px0, ph, lx, lu, lr, rx, rr, xstar)
        k2 = shock_rhs(t + 0.5 * h, x + 0.5 * h * k1, uf, n, period, sx0, sh, rf, vf, px0, ph,
                       lx, lu, lr, rx, rr, xstar)
        k3 = shock_rhs(t + 0.5 * h, x + 0.5 * h * k2, uf, n, period, sx0, sh, rf, vf, px0, ph,
                       lx, lu, lr, rx, rr, xstar)
        k4 = shock_rhs(t + h, x + h * k3, uf, n, period, sx0, sh, rf, vf, px0, ph,
                       lx, lu, lr, rx, rr, xstar)
        x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = x
    return out


@njit(cache=True)
def _coef(tab, t0, th, x, fam):
    return _u1(tab[0], t0, th, x), _u1(tab[2 + fam], t0, th, x)


@njit(cache=True)
def _left_sweep(p1, p2, q1, q2, x0, h, t1, dt, bt, b0, bh, in1, in2, nb, period,
                corr, tol, o1, o2):
    m = p1.shape[0]
    xmax = x0 + (m - 1) * h
    for j in range(m):
        x = x0 + j * h
        for fam in range(2):
            sgn = -1.0 if fam == 0 else 1.0
            ub, cx = _coef(bt, b0, bh, x, fam)
            lam = ub + sgn + 0.5 * (p1[j] + p2[j])
            for _ in range(3):
                xm = min(max(x - 0.5 * dt * lam, x0), xmax)
                um = _u1(bt[0], b0, bh, xm)
                lam = um + sgn + 0.5 * (_u1(p1, x0, h, xm) + _u1(p2, x0, h, xm))
                if corr:
                    lam = 0.5 * (lam + um + sgn + 0.5 * (_u1(q1, x0, h, xm) + _u1(q2, x0, h, xm)))
            if lam <= tol:
                return 1
            xf = x - dt * lam
            if xf >= x0:
                f1 = _u1(p1, x0, h, xf)
                f2 = _u1(p2, x0, h, xf)
                tau = dt
            else:
                tau = (x - x0) / lam
                xf = x0
                f1 = _p1(in1, nb, period, t1 - tau)
                f2 = _p1(in2, nb, period, t1 - tau)
            _, cf = _coef(bt, b0, bh, xf, fam)
            base = f1 if fam == 0 else f2
            if corr:
                val = base + 0.5 * tau * (cf * (f1 + f2) + cx * (q1[j] + q2[j]))
            else:
                val = base + tau * cf * (f1 + f2)
            if fam == 0:
                o1[j] = val
            else:
                o2[j] = val
    return 0


@njit(cache=True)
def _right_lam(r1, r2, go, ho, q1, q2, gq, hq, L, bt, b0, bh, x, lam0, sgn, dt, corr):
    lam = lam0
    for _ in range(3):
        xm = min(max(x - 0.5 * dt * lam, go), L)
        um = _u1(bt[0], b0, bh, xm)
        lam = um + sgn + 0.5 * (_u1(r1, go, ho, xm) + _u1(r2, go, ho, xm))
        if corr:
            xq = min(max(xm, gq), L)
            lam = 0.5 * (lam + um + sgn + 0.5 * (_u1(q1, gq, hq, xq) + _u1(q2, gq, hq, xq)))
    return lam


@njit(cache=True)
def _right_sweep(r1, r2, go, q1, q2, gq, gn, t1, dt, L, rt, r0, rh, l1, l2, lx0, lh,
                 lt, lt0, lth, ex, nb, period, w0, corr, tol, o1, o2):
    """One pass over the subsonic nodes; returns (shock speed, status)."""
    nn = r1.shape[0] - 1
    ho = (L - go) / nn
    hq = (L - gq) / nn
    hn = (L - gn) / nn
    # (a) second family at the outlet node
    ub, cx = _coef(rt, r0, rh, L, 1)
    lam = _right_lam(r1, r2, go, ho, q1, q2, gq, hq, L, rt, r0, rh, L,
                     ub + 1.0 + 0.5 * (r1[nn] + r2[nn]), 1.0, dt, corr)
    if lam <= tol:
        return 0.0, 1
    xf = L - dt * lam
    if xf < go:
        return 0.0, 4
    f1 = _u1(r1, go, ho, xf)
    f2 = _u1(r2, go, ho, xf)
    _, cf = _coef(rt, r0, rh, xf, 1)
    if corr:
        o2[nn] = f2 + 0.5 * dt * (cf * (f1 + f2) + cx * (q1[nn] + q2[nn]))
    else:
        o2[nn] = f2 + dt * cf * (f1 + f2)
    # (b) first family everywhere, outlet crossings use the new outlet value of phi2
    for k in range(nn + 1):
        x = gn + k * hn
        ub, cx = _coef(rt, r0, rh, x, 0)
        xs = min(max(x, go), L)
        lam = _right_lam(r1, r2, go, ho, q1, q2, gq, hq, L, rt, r0, rh, x,
                         ub - 1.0 + 0.5 * (_u1(r1, go, ho, xs) + _u1(r2, go, ho, xs)), -1.0, dt,
                         corr)
        if lam >= -tol:
            return 0.0, 1
        xf = x - dt * lam
        if xf <= L:
            if xf < go:
                return 0.0, 4
            f1 = _u1(r1, go, ho, xf)
            f2 = _u1(r2, go, ho, xf)
            tau = dt
        else:
            tau = (L - x) / (-lam)
            xf = L
            f2 = r2[nn] + (1.0 - tau / dt) * (o2[nn] - r2[nn])
            f1 = f2 + _p1(ex, nb, period, t1 - tau)
        _, cf = _coef(rt, r0, rh, xf, 0)
        if corr:
            o1[k] = f1 + 0.5 * tau * (cf * (f1 + f2) + cx * (q1[k] + q2[k]))
        else:
            o1[k] = f1 + tau * cf * (f1 + f2)
    # (c) jump conditions at the shock with the incoming first invariant
    p1 = _u1(l1, lx0, lh, gn)
    p2 = _u1(l2, lx0, lh, gn)
    ul = _u1(lt[0], lt0, lth, gn) + 0.5 * (p1 + p2)
    rl = _u1(lt[1], lt0, lth, gn) * math.exp(0.5 * (p2 - p1))
    if ul <= 1.0 + tol:
        return 0.0, 1
    ur_b = _u1(rt[0], r0, rh, gn)
    rr_b = _u1(rt[1], r0, rh, gn)
    target = ur_b - math.log(rr_b) + o1[0]
    lrl = math.log(rl)
    if ul - lrl - target <= 0.0:
        return 0.0, 3
    w = w0 if w0 > 1.0 else 1.5
    for _ in range(60):
        f = 1.0 / w + ul - w - lrl - 2.0 * math.log(w) - target
        df = -1.0 / (w * w) - 1.0 - 2.0 / w
        wn = w - f / df
        if wn <= 1.0:
            wn = 0.5 * (w + 1.0)
        if abs(wn - w) < 1e-15 * w:
            w = wn
            break
        w = wn
    v = ul - w
    ur = v + 1.0 / w
    rr = rl * w * w
    if ur >= 1.0 - tol or ur <= 0.0:
        return v, 3
    o2[0] = ur + math.log(rr) - ur_b - math.log(rr_b)
    # (d) second family at interior nodes, feet may cross the shock path
    vbar = (gn - go) / dt
    for k in range(1, nn):
        x = gn + k * hn
        ub, cx = _coef(rt, r0, rh, x, 1)
        xs = min(max(x, go), L)
        lam = _right_lam(r1, r2, go, ho, q1, q2, gq, hq, L, rt, r0, rh, x,
                         ub + 1.0 + 0.5 * (_u1(r1, go, ho, xs) + _u1(r2, go, ho, xs)), 1.0, dt,
                         corr)
        if lam <= tol:
            return v, 1
        if lam - vbar <= 0.0:
            return v, 3
        tc = (x - gn) / (lam - vbar)
        if tc < dt:
            fr = 1.0 - tc / dt
            f1 = r1[0] + fr * (o1[0] - r1[0])
            f2 = r2[0] + fr * (o2[0] - r2[0])
            xf = x - tc * lam
            tau = tc
        else:
            xf = x - dt * lam
            f1 = _u1(r1, go, ho, xf)
            f2 = _u1(r2, go, ho, xf)
            tau = dt
        _, cf = _coef(rt, r0, rh, xf, 1)
        if corr:
            o2[k] = f2 + 0.5 * tau * (cf * (f1 + f2) + cx * (q1[k] + q2[k]))
        else:
            o2[k] = f2 + tau * cf * (f1 + f2)
    return v, 0


@njit(cache=True)
def _flush(a):
    # keep decaying tails out of the subnormal range
    for i in range(a.shape[0]):
        if abs(a[i]) < 1e-200:
            a[i] = 0.0


@njit(cache=True)
def ibvp_step(t0, dt, l1, l2, lx0, lh, g, v, r1, r2, L, lt, lt0, lth, rt, r0, rh,
              in1, in2, ex, nb, period, g_lo, g_hi, tol):
    """One predictor-corrector step of the tracked-shock evolution.

    Returns ``(l1, l2, gamma, v, r1, r2, status)``; status is 0 on
    success, 1 near-sonic speeds, 2 shock outside ``(g_lo, g_hi)``, 3
    jump conditions without an admissible root, 4 a characteristic foot
    outside the old domain.  ``lt`` and ``rt`` are uniform tables with
    rows ``u*, rho*`` and the first- and second-family source
    coefficients of the supersonic and subsonic backgrounds.
    """
    t1 = t0 + dt
    a1 = np.empty_like(l1)
    a2 = np.empty_like(l2)
    b1 = np.empty_like(l1)
    b2 = np.empty_like(l2)
    s1 = np.empty_like(r1)
    s2 = np.empty_like(r2)
    n1 = np.empty_like(r1)
    n2 = np.empty_like(r2)
    st = _left_sweep(l1, l2, l1, l2, lx0, lh, t1, dt, lt, lt0, lth, in1, in2, nb,
                     period, False, tol, a1, a2)
    if st == 0:
        st = _left_sweep(l1, l2, a1, a2, lx0, lh, t1, dt, lt, lt0, lth, in1, in2, nb,
                         period, True, tol, b1, b2)
    if st != 0:
        return b1, b2, g, v, n1, n2, st
    w0 = _u1(lt[0], lt0, lth, g) + 0.5 * (_u1(l1, lx0, lh, g) + _u1(l2, lx0, lh, g)) - v
    gp = g + dt * v
    if not g_lo < gp < g_hi:
        return b1, b2, gp, v, n1, n2, 2
    vp, st = _right_sweep(r1, r2, g, r1, r2, g, gp, t1, dt, L, rt, r0, rh, b1, b2, lx0, lh,
                          lt, lt0, lth, ex, nb, period, w0, False, tol, s1, s2)
    if st != 0:
        return b1, b2, gp, vp, n1, n2, st
    gn = g + 0.5 * dt * (v + vp)
    if not g_lo < gn < g_hi:
        return b1, b2, gn, vp, n1, n2, 2
    vn, st = _right_sweep(r1, r2, g, s1, s2, gp, gn, t1, dt, L, rt, r0, rh, b1, b2, lx0, lh,
                          lt, lt0, lth, ex, nb, period, w0, True, tol, n1, n2)
    for a in (b1, b2, n1, n2):
        _flush(a)
    return b1, b2, gn, vn, n1, n2, st
