"""Pure-numpy versions of the hot loops (vectorized where natural)."""
import math

import numpy as np

NAME = "numpy"


def _w4(w):
    return (
        -w * (w - 1.0) * (w - 2.0) / 6.0,
        (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0,
        -(w + 1.0) * w * (w - 2.0) / 2.0,
        (w + 1.0) * w * (w - 1.0) / 6.0,
    )


def _pidx(n, period, t):
    q = np.asarray(t, dtype=float) / period
    s = (q - np.floor(q)) * n
    i = np.floor(s).astype(np.int64)
    w = s - i
    i = np.where(i >= n, i - n, i)
    return i, w


def _uidx(m, x0, h, x):
    s = (np.asarray(x, dtype=float) - x0) / h
    i = np.clip(np.floor(s).astype(np.int64), 1, m - 3)
    return i, s - i


def periodic_cubic(f, n, period, tq):
    i, w = _pidx(n, period, tq)
    c = _w4(w)
    return (c[0] * f[(i - 1) % n] + c[1] * f[i]
            + c[2] * f[(i + 1) % n] + c[3] * f[(i + 2) % n])


def _pcol(a, n, period, t, col):
    i, w = _pidx(n, period, t)
    c = _w4(w)
    return (c[0] * a[(i - 1) % n, col] + c[1] * a[i, col]
            + c[2] * a[(i + 1) % n, col] + c[3] * a[(i + 2) % n, col])


def uniform_cubic(f, x0, h, xq):
    i, w = _uidx(f.shape[0], x0, h, xq)
    c = _w4(w)
    return c[0] * f[i - 1] + c[1] * f[i] + c[2] * f[i + 1] + c[3] * f[i + 2]


def bicubic(field, n, period, x0, h, tq, xq):
    k, wx = _uidx(field.shape[1], x0, h, xq)
    a = _w4(wx)
    i, wt = _pidx(n, period, tq)
    b = _w4(wt)
    out = 0.0
    for r, br in zip(((i - 1) % n, i, (i + 1) % n, (i + 2) % n), b):
        out = out + br * (a[0] * field[r, k - 1] + a[1] * field[r, k]
                          + a[2] * field[r, k + 1] + a[3] * field[r, k + 2])
    return np.asarray(out, dtype=float)


def _w4s(w):
    return (-w * (w - 1.0) * (w - 2.0) / 6.0, (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0,
            -(w + 1.0) * w * (w - 2.0) / 2.0, (w + 1.0) * w * (w - 1.0) / 6.0)


def bicubic_scalar(field, n, period, x0, h, t, x):
    # plain-float path; numpy scalar overhead dominates otherwise
    m = field.shape[1]
    s = (x - x0) / h
    k = min(max(int(math.floor(s)), 1), m - 3)
    a = _w4s(s - k)
    q = t / period
    st = (q - math.floor(q)) * n
    i = int(math.floor(st))
    b = _w4s(st - i)
    if i >= n:
        i -= n
    acc = 0.0
    for r, br in zip(((i - 1) % n, i, (i + 1) % n, (i + 2) % n), b):
        row = field[r]
        acc += br * (a[0] * row[k - 1] + a[1] * row[k] + a[2] * row[k + 1] + a[3] * row[k + 2])
    return float(acc)


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
    return (t + delta / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t),
            delta / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i))


def march_linear(inv_lam, rate, n, period, start, hx, direction):
    m = (inv_lam.shape[1] - 1) // 2
    out = np.empty((n + 1, m + 1))
    tj = np.arange(n + 1) * (period / n)
    prev = np.array(start[:n], dtype=float)
    k = 0 if direction > 0 else m
    out[:n, k] = prev
    out[n, k] = prev[0]
    for _ in range(m):
        k_new = k + direction
        delta = (k - k_new) * hx
        tf, dj = _rk4_coeff(inv_lam, rate, n, period, tj, delta, 2 * k_new, k_new + k, 2 * k)
        new = periodic_cubic(prev, n, period, tf) - dj
        out[:, k_new] = new
        prev = new[:n].copy()
        k = k_new
    return out


def _substep(inv_lam, rate, n, period, x0h, hh, t, x, s):
    def ev(a, tt, xx):
        return bicubic(a, n, period, x0h, hh, tt, xx)

    k1t = ev(inv_lam, t, x)
    k1i = ev(rate, t, x)
    t2 = t + 0.5 * s * k1t
    k2t = ev(inv_lam, t2, x + 0.5 * s)
    k2i = ev(rate, t2, x + 0.5 * s)
    t3 = t + 0.5 * s * k2t
    k3t = ev(inv_lam, t3, x + 0.5 * s)
    k3i = ev(rate, t3, x + 0.5 * s)
    t4 = t + s * k3t
    k4t = ev(inv_lam, t4, x + s)
    k4i = ev(rate, t4, x + s)
    return (t + s / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t),
            s / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i))


def trace_to_curve(inv_lam, rate, n, period, x0, hx, curve, xtol):
    m = (inv_lam.shape[1] - 1) // 2
    nr = n + 1
    t = np.arange(nr) * (period / n)
    acc = np.zeros(nr)
    g = x0 - periodic_cubic(curve, n, period, t)
    t_hit = np.full(nr, np.nan)
    x_hit = np.full(nr, np.nan)
    integ = np.full(nr, np.nan)
    if np.any(g >= 0.0):
        return t_hit, x_hit, integ, 1
    active = np.ones(nr, dtype=bool)
    for k in range(m):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        tn, dj = _rk4_coeff(inv_lam, rate, n, period, t[idx], hx, 2 * k, 2 * k + 1, 2 * k + 2)
        xk = x0 + k * hx
        xn = x0 + (k + 1) * hx
        gn = xn - periodic_cubic(curve, n, period, tn)
        hit = gn >= 0.0
        if hit.any():
            h_idx = idx[hit]
            lo = np.zeros(h_idx.size)
            hi = np.full(h_idx.size, hx)
            t0 = t[h_idx]
            ts = tn[hit]
            js = dj[hit]
            s = hi.copy()
            for _ in range(64):
                if np.all(hi - lo < xtol):
                    break
                s = 0.5 * (lo + hi)
                ts, js = _substep(inv_lam, rate, n, period, x0, 0.5 * hx, t0, xk, s)
                gs = xk + s - periodic_cubic(curve, n, period, ts)
                right = gs >= 0.0
                hi = np.where(right, s, hi)
                lo = np.where(right, lo, s)
            t_hit[h_idx] = ts
            x_hit[h_idx] = xk + s
            integ[h_idx] = acc[h_idx] + js
            active[h_idx] = False
        keep = ~hit
        t[idx[keep]] = tn[keep]
        acc[idx[keep]] += dj[keep]
    status = 2 if active.any() else 0
    return t_hit, x_hit, integ, status


def _win(col, nw, dt, t):
    s = t / dt
    i = np.minimum(np.floor(s).astype(np.int64), nw - 2)
    w = s - i
    c = _w4(w)
    out = np.zeros_like(s)
    for off, cc in zip((-1, 0, 1, 2), c):
        idx = i + off
        ok = idx >= 0
        out = out + np.where(ok, cc * col[np.clip(idx, 0, nw)], 0.0)
    return out


def march_supersonic(in1, in2, dt, ustar, slope, hx, tol_sonic, n_iter):
    nw = in1.shape[0] - 1
    mx = ustar.shape[0]
    p1 = np.zeros((nw + 1, mx))
    p2 = np.zeros((nw + 1, mx))
    p1[:, 0] = in1
    p2[:, 0] = in2
    tj = np.arange(nw + 1) * dt
    for k in range(mx - 1):
        ua, ub = ustar[k], ustar[k + 1]
        ca1 = -slope[k] / (2.0 * ua - 2.0)
        ca2 = -slope[k] / (2.0 * ua + 2.0)
        cb1 = -slope[k + 1] / (2.0 * ub - 2.0)
        cb2 = -slope[k + 1] / (2.0 * ub + 2.0)
        c1 = p1[:, k]
        c2 = p2[:, k]
        n1 = c1.copy()
        n2 = c2.copy()
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
            if np.any(lf1 <= tol_sonic) or np.any(ln1 <= tol_sonic):
                return p1, p2, 1
            f1 = tj - 0.5 * hx * (1.0 / ln1 + 1.0 / lf1)
            f2 = tj - 0.5 * hx * (1.0 / ln2 + 1.0 / lf2)
            n1 = q11 + 0.5 * hx * (ca1 * sf1 / lf1 + cb1 * sn / ln1)
            n2 = q22 + 0.5 * hx * (ca2 * sf2 / lf2 + cb2 * sn / ln2)
        p1[:, k + 1] = n1
        p2[:, k + 1] = n2
    return p1, p2, 0


def _slope(shape_code, coeffs, x):
    if shape_code == 0:
        return coeffs[0]
    a = 0.0
    da = 0.0
    for c in coeffs[::-1]:
        da = da * x + a
        a = a * x + c
    return da / a


def _steady_rhs(shape_code, coeffs, x, rho, u):
    k = _slope(shape_code, coeffs, x)
    den = u * u - 1.0
    return -k * rho * u * u / den, k * u / den


def rk4_branch(shape_code, coeffs, x0, x1, n_steps, rho0, u0, tol_sonic):
    coeffs = [float(c) for c in coeffs]
    h = (x1 - x0) / n_steps
    xs = np.empty(n_steps + 1)
    rs = np.empty(n_steps + 1)
    us = np.empty(n_steps + 1)
    xs[0], rs[0], us[0] = x0, rho0, u0
    r, u = float(rho0), float(u0)
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
        if abs(u - 1.0) < tol_sonic or not math.isfinite(u) or (u - 1.0) * (u0 - 1.0) <= 0.0 or not r > 0.0:
            return xs, rs, us, i + 1
    return xs, rs, us, -1


def hll_step(rho, m, a_face, a_cell, dx, dt, ghost_l, ghost_r):
    rl = np.concatenate(([ghost_l[0]], rho))
    ml = np.concatenate(([ghost_l[1]], m))
    rr = np.concatenate((rho, [ghost_r[0]]))
    mr = np.concatenate((m, [ghost_r[1]]))
    ul = ml / rl
    ur = mr / rr
    sl = np.minimum(ul - 1.0, ur - 1.0)
    sr = np.maximum(ul + 1.0, ur + 1.0)
    fl0, fl1 = ml, ml * ul + rl
    fr0, fr1 = mr, mr * ur + rr
    inv = 1.0 / (sr - sl)
    h0 = (sr * fl0 - sl * fr0 + sl * sr * (rr - rl)) * inv
    h1 = (sr * fl1 - sl * fr1 + sl * sr * (mr - ml)) * inv
    f0 = np.where(sl >= 0.0, fl0, np.where(sr <= 0.0, fr0, h0))
    f1 = np.where(sl >= 0.0, fl1, np.where(sr <= 0.0, fr1, h1))
    lam = dt / dx
    da = np.diff(a_face)
    rn = rho - lam * np.diff(a_face * f0) / a_cell
    mn = m - lam * (np.diff(a_face * f1) - da * rho) / a_cell
    return rn, mn


def shock_rhs(t, psi, uf, n, period, sx0, sh, rf, vf, px0, ph, lx, lu, lr, rx, rr, xstar):
    x = xstar + psi
    U = bicubic_scalar(uf, n, period, sx0, sh, t, x)
    rb = bicubic_scalar(rf, n, period, px0, ph, t, x)
    ub = bicubic_scalar(vf, n, period, px0, ph, t, x)
    ul = float(np.interp(x, lx, lu))
    rl = float(np.interp(x, lx, lr))
    rrx = float(np.interp(x, rx, rr))
    return ul + ub - math.sqrt(rrx / (rl + rb)) * math.exp(0.5 * U)


def shock_flow(t0, x0, tau, n_steps, uf, n, period, sx0, sh, rf, vf, px0, ph,
               lx, lu, lr, rx, rr, xstar):
    args = (uf, n, period, sx0, sh, rf, vf, px0, ph, lx, lu, lr, rx, rr, xstar)
    h = tau / n_steps
    out = np.empty(n_steps + 1)
    x = float(x0)
    out[0] = x
    for i in range(n_steps):
        t = t0 + i * h
        k1 = shock_rhs(t, x, *args)
        k2 = shock_rhs(t + 0.5 * h, x + 0.5 * h * k1, *args)
        k3 = shock_rhs(t + 0.5 * h, x + 0.5 * h * k2, *args)
        k4 = shock_rhs(t + h, x + h * k3, *args)
        x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = x
    return out


def _coef(tab, t0, th, x, fam):
    return uniform_cubic(tab[0], t0, th, x), uniform_cubic(tab[2 + fam], t0, th, x)


def _mid_lam(p1, p2, x0, h, q1, q2, xq0, hq, lo, hi, bt, b0, bh, x, lam, sgn, dt, corr):
    for _ in range(3):
        xm = np.clip(x - 0.5 * dt * lam, lo, hi)
        um = uniform_cubic(bt[0], b0, bh, xm)
        lam = um + sgn + 0.5 * (uniform_cubic(p1, x0, h, xm) + uniform_cubic(p2, x0, h, xm))
        if corr:
            xq = np.clip(xm, xq0, hi)
            lam = 0.5 * (lam + um + sgn + 0.5 * (uniform_cubic(q1, xq0, hq, xq)
                                                 + uniform_cubic(q2, xq0, hq, xq)))
    return lam


def _left_sweep(p1, p2, q1, q2, x0, h, t1, dt, bt, b0, bh, in1, in2, nb, period,
                corr, tol):
    m = p1.shape[0]
    x = x0 + h * np.arange(m)
    out = []
    for fam in range(2):
        sgn = -1.0 if fam == 0 else 1.0
        ub, cx = _coef(bt, b0, bh, x, fam)
        lam = _mid_lam(p1, p2, x0, h, q1, q2, x0, h, x0, x[-1], bt, b0, bh, x,
                       ub + sgn + 0.5 * (p1 + p2), sgn, dt, corr)
        if np.any(lam <= tol):
            return None, 1
        xf = x - dt * lam
        inside = xf >= x0
        tau = np.where(inside, dt, (x - x0) / lam)
        xf = np.where(inside, xf, x0)
        f1 = np.where(inside, uniform_cubic(p1, x0, h, xf), periodic_cubic(in1, nb, period, t1 - tau))
        f2 = np.where(inside, uniform_cubic(p2, x0, h, xf), periodic_cubic(in2, nb, period, t1 - tau))
        _, cf = _coef(bt, b0, bh, xf, fam)
        base = f1 if fam == 0 else f2
        if corr:
            out.append(base + 0.5 * tau * (cf * (f1 + f2) + cx * (q1 + q2)))
        else:
            out.append(base + tau * cf * (f1 + f2))
    return out, 0


def _right_sweep(r1, r2, go, q1, q2, gq, gn, t1, dt, L, rt, r0, rh, l1, l2, lx0, lh,
                 lt, lt0, lth, ex, nb, period, w0, corr, tol):
    nn = r1.shape[0] - 1
    ho = (L - go) / nn
    hq = (L - gq) / nn
    hn = (L - gn) / nn
    o1 = np.empty(nn + 1)
    o2 = np.empty(nn + 1)
    x = gn + hn * np.arange(nn + 1)
    x[-1] = L
    xs = np.clip(x, go, L)
    r1s = uniform_cubic(r1, go, ho, xs)
    r2s = uniform_cubic(r2, go, ho, xs)

    def lam_of(xx, init, sgn):
        return _mid_lam(r1, r2, go, ho, q1, q2, gq, hq, go, L, rt, r0, rh, xx, init, sgn, dt, corr)

    # (a) outlet node, second family
    ub, cx = _coef(rt, r0, rh, L, 1)
    lam = float(lam_of(np.array([L]), ub + 1.0 + 0.5 * (r1[nn] + r2[nn]), 1.0)[0])
    if lam <= tol:
        return 0.0, 1, o1, o2
    xf = L - dt * lam
    if xf < go:
        return 0.0, 4, o1, o2
    f1 = float(uniform_cubic(r1, go, ho, xf))
    f2 = float(uniform_cubic(r2, go, ho, xf))
    _, cf = _coef(rt, r0, rh, xf, 1)
    if corr:
        o2[nn] = f2 + 0.5 * dt * (cf * (f1 + f2) + cx * (q1[nn] + q2[nn]))
    else:
        o2[nn] = f2 + dt * cf * (f1 + f2)
    # (b) first family
    ub, cx = _coef(rt, r0, rh, x, 0)
    lam = lam_of(x, ub - 1.0 + 0.5 * (r1s + r2s), -1.0)
    if np.any(lam >= -tol):
        return 0.0, 1, o1, o2
    xf = x - dt * lam
    inside = xf <= L
    if np.any(xf[inside] < go):
        return 0.0, 4, o1, o2
    tau = np.where(inside, dt, (L - x) / (-lam))
    xf = np.where(inside, xf, L)
    f2b = r2[nn] + (1.0 - tau / dt) * (o2[nn] - r2[nn])
    f2 = np.where(inside, uniform_cubic(r2, go, ho, xf), f2b)
    f1 = np.where(inside, uniform_cubic(r1, go, ho, xf), f2b + periodic_cubic(ex, nb, period, t1 - tau))
    _, cf = _coef(rt, r0, rh, xf, 0)
    if corr:
        o1[:] = f1 + 0.5 * tau * (cf * (f1 + f2) + cx * (q1 + q2))
    else:
        o1[:] = f1 + tau * cf * (f1 + f2)
    # (c) jump conditions at the shock
    p1 = float(uniform_cubic(l1, lx0, lh, gn))
    p2 = float(uniform_cubic(l2, lx0, lh, gn))
    ul = float(uniform_cubic(lt[0], lt0, lth, gn)) + 0.5 * (p1 + p2)
    rl = float(uniform_cubic(lt[1], lt0, lth, gn)) * math.exp(0.5 * (p2 - p1))
    if ul <= 1.0 + tol:
        return 0.0, 1, o1, o2
    ur_b = float(uniform_cubic(rt[0], r0, rh, gn))
    rr_b = float(uniform_cubic(rt[1], r0, rh, gn))
    target = ur_b - math.log(rr_b) + o1[0]
    lrl = math.log(rl)
    if ul - lrl - target <= 0.0:
        return 0.0, 3, o1, o2
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
        return v, 3, o1, o2
    o2[0] = ur + math.log(rr) - ur_b - math.log(rr_b)
    # (d) second family at interior nodes
    vbar = (gn - go) / dt
    xi = x[1:nn]
    ub, cx = _coef(rt, r0, rh, xi, 1)
    lam = lam_of(xi, ub + 1.0 + 0.5 * (r1s[1:nn] + r2s[1:nn]), 1.0)
    if np.any(lam <= tol):
        return v, 1, o1, o2
    if np.any(lam - vbar <= 0.0):
        return v, 3, o1, o2
    tc = (xi - gn) / (lam - vbar)
    cross = tc < dt
    fr = 1.0 - tc / dt
    xf = np.where(cross, xi - tc * lam, xi - dt * lam)
    tau = np.where(cross, tc, dt)
    xo = np.clip(xf, go, L)
    f1 = np.where(cross, r1[0] + fr * (o1[0] - r1[0]), uniform_cubic(r1, go, ho, xo))
    f2 = np.where(cross, r2[0] + fr * (o2[0] - r2[0]), uniform_cubic(r2, go, ho, xo))
    _, cf = _coef(rt, r0, rh, xf, 1)
    if corr:
        o2[1:nn] = f2 + 0.5 * tau * (cf * (f1 + f2) + cx * (q1[1:nn] + q2[1:nn]))
    else:
        o2[1:nn] = f2 + tau * cf * (f1 + f2)
    return v, 0, o1, o2


def ibvp_step(t0, dt, l1, l2, lx0, lh, g, v, r1, r2, L, lt, lt0, lth, rt, r0, rh,
              in1, in2, ex, nb, period, g_lo, g_hi, tol):
    t1 = t0 + dt
    empty_l = np.empty_like(l1)
    empty_r = np.empty_like(r1)
    a, st = _left_sweep(l1, l2, l1, l2, lx0, lh, t1, dt, lt, lt0, lth, in1, in2, nb,
                        period, False, tol)
    if st == 0:
        b, st = _left_sweep(l1, l2, a[0], a[1], lx0, lh, t1, dt, lt, lt0, lth,
                            in1, in2, nb, period, True, tol)
    if st != 0:
        return empty_l, empty_l.copy(), g, v, empty_r, empty_r.copy(), st
    b1, b2 = b
    w0 = (float(uniform_cubic(lt[0], lt0, lth, g)) + 0.5 * float(uniform_cubic(l1, lx0, lh, g)
                                                    + uniform_cubic(l2, lx0, lh, g)) - v)
    gp = g + dt * v
    if not g_lo < gp < g_hi:
        return b1, b2, gp, v, empty_r, empty_r.copy(), 2
    vp, st, s1, s2 = _right_sweep(r1, r2, g, r1, r2, g, gp, t1, dt, L, rt, r0, rh, b1, b2,
                                  lx0, lh, lt, lt0, lth, ex, nb, period, w0,
                                  False, tol)
    if st != 0:
        return b1, b2, gp, vp, s1, s2, st
    gn = g + 0.5 * dt * (v + vp)
    if not g_lo < gn < g_hi:
        return b1, b2, gn, vp, s1, s2, 2
    vn, st, n1, n2 = _right_sweep(r1, r2, g, s1, s2, gp, gn, t1, dt, L, rt, r0, rh, b1, b2,
                                  lx0, lh, lt, lt0, lth, ex, nb, period, w0,
                                  True, tol)
    b1, b2, n1, n2 = (np.where(np.abs(a) < 1e-200, 0.0, a) for a in (b1, b2, n1, n2))
    return b1, b2, gn, vn, n1, n2, st
