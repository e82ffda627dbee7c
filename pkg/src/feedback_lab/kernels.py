"""Hot numeric kernels, in paired numba / numpy variants.

Every episode loop and the coupled fixed-point solver live here as plain
functions over float64 arrays.  Each kernel has two interchangeable
implementations:

* ``*_nb``: loop form compiled with ``@njit`` (falls back to the plain
  Python body when numba is unavailable),
* ``*_np``: same control flow with the inner scans vectorized in numpy.

The active variant is selected once at import time from the
``FEEDBACK_LAB_NUMBA`` environment flag (see ``_accel``).  The scalar
arithmetic is written identically in both variants so that trajectories
agree bit for bit across backends; ``tests/test_kernels.py`` enforces
this and ``benchmarks/bench_kernels.py`` times the two sides.

Conventions: noise arrays have length T+1 with slot 0 unused, Markov
modes are 0-based inside kernels, blowup is reported as the 1-based step
index at which the guard tripped (-1 means the horizon was reached).
Piecewise-linear functions are passed as sorted-or-not anchor arrays
``(xs, vs)`` with slope budget L; extension mode 0 evaluates the upper
envelope ``min_i(v_i + L|x - x_i|)``, mode 1 the lower envelope
``max_i(v_i - L|x - x_i|)``, mode 2 their midpoint.  Evaluation checks
for an exact anchor hit first so replaying a stored trajectory through
the same anchors is reproducible to the last bit.
"""

import numpy as np

from ._accel import NUMBA_ENABLED, njit_compile

EXT_UPPER = 0
EXT_LOWER = 1
EXT_MIDPOINT = 2


# ---------------------------------------------------------------------------
# scalar helpers

def _power_body(M, b, y):
    # odd extension M*sign(y)*|y|^b; value 0 at y=0 for every b >= 0
    if y > 0.0:
        return M * y**b
    if y < 0.0:
        return -(M * (-y) ** b)
    return 0.0


power_eval_nb = njit_compile(_power_body)
power_eval_np = _power_body


def _mcshane_body(xs, vs, n, L, mode, x):
    for i in range(n):
        if xs[i] == x:
            return vs[i]
    if mode == 0:
        best = np.inf
        for i in range(n):
            d = x - xs[i]
            if d < 0.0:
                d = -d
            c = vs[i] + L * d
            if c < best:
                best = c
        return best
    if mode == 1:
        best = -np.inf
        for i in range(n):
            d = x - xs[i]
            if d < 0.0:
                d = -d
            c = vs[i] - L * d
            if c > best:
                best = c
        return best
    lo = -np.inf
    hi = np.inf
    for i in range(n):
        d = x - xs[i]
        if d < 0.0:
            d = -d
        a = vs[i] - L * d
        c = vs[i] + L * d
        if a > lo:
            lo = a
        if c < hi:
            hi = c
    return 0.5 * (lo + hi)


mcshane_eval_nb = njit_compile(_mcshane_body)


def mcshane_eval_np(xs, vs, n, L, mode, x):
    xa = xs[:n]
    va = vs[:n]
    hit = xa == x
    if hit.any():
        return float(va[int(np.argmax(hit))])
    d = np.abs(x - xa)
    if mode == 0:
        return float(np.min(va + L * d))
    if mode == 1:
        return float(np.max(va - L * d))
    return 0.5 * (float(np.max(va - L * d)) + float(np.min(va + L * d)))


def _interval_body(xs, vs, n, L, x):
    lo = -np.inf
    hi = np.inf
    for i in range(n):
        d = x - xs[i]
        if d < 0.0:
            d = -d
        a = vs[i] - L * d
        c = vs[i] + L * d
        if a > lo:
            lo = a
        if c < hi:
            hi = c
    return lo, hi


interval_nb = njit_compile(_interval_body)


def interval_np(xs, vs, n, L, x):
    if n == 0:
        return -np.inf, np.inf
    d = np.abs(x - xs[:n])
    return float(np.max(vs[:n] - L * d)), float(np.min(vs[:n] + L * d))


# ---------------------------------------------------------------------------
# parametric episode: recursive least squares + minimum variance input

def _parametric_episode_body(y0, theta, w, M, b, s0, theta0, guard):
    T = w.shape[0] - 1
    ys = np.zeros(T + 1)
    us = np.zeros(T)
    ths = np.zeros(T + 1)
    ys[0] = y0
    ths[0] = theta0
    y = y0
    s = s0
    th = theta0
    blow = -1
    for t in range(T):
        if y > 0.0:
            phi = M * y**b
        elif y < 0.0:
            phi = -(M * (-y) ** b)
        else:
            phi = 0.0
        u = -th * phi
        y1 = theta * phi + u + w[t + 1]
        us[t] = u
        ys[t + 1] = y1
        if y1 != y1 or y1 > guard or y1 < -guard:
            blow = t + 1
            break
        s = s + phi * phi
        th = th + phi * ((y1 - u) - th * phi) / s
        ths[t + 1] = th
        y = y1
    return ys, us, ths, blow


parametric_episode_nb = njit_compile(_parametric_episode_body)
parametric_episode_np = _parametric_episode_body


# ---------------------------------------------------------------------------
# nonparametric episode, fixed realized f + switching NN controller

def _nonparam_fixed_nb_body(y0, fxs, fvs, L, ext_mode, ws, w_bar, eps, ystar,
                            guard, use_controller):
    T = ws.shape[0] - 1
    nf = fxs.shape[0]
    ys = np.zeros(T + 1)
    us = np.zeros(T)
    hy = np.zeros(T)
    hu = np.zeros(T)
    hn = np.zeros(T)
    nh = 0
    ys[0] = y0
    y = y0
    bmin = y0
    bmax = y0
    blow = -1
    for t in range(T):
        if y < bmin:
            bmin = y
        if y > bmax:
            bmax = y
        if use_controller == 0 or nh == 0:
            u = 0.0
        else:
            best = np.inf
            bi = 0
            for i in range(nh):
                d = y - hy[i]
                if d < 0.0:
                    d = -d
                if d < best:
                    best = d
                    bi = i
            fhat = hn[bi] - hu[bi]
            if best > eps:
                u = -fhat + 0.5 * (bmin + bmax)
            else:
                u = -fhat + ystar
        fy = mcshane_eval_nb(fxs, fvs, nf, L, ext_mode, y)
        w = w_bar * ws[t + 1]
        y1 = fy + u + w
        us[t] = u
        ys[t + 1] = y1
        hy[nh] = y
        hu[nh] = u
        hn[nh] = y1
        nh += 1
        if y1 != y1 or y1 > guard or y1 < -guard:
            blow = t + 1
            break
        y = y1
    return ys, us, blow


nonparam_fixed_nb = njit_compile(_nonparam_fixed_nb_body)


def nonparam_fixed_np(y0, fxs, fvs, L, ext_mode, ws, w_bar, eps, ystar,
                      guard, use_controller):
    T = ws.shape[0] - 1
    nf = fxs.shape[0]
    ys = np.zeros(T + 1)
    us = np.zeros(T)
    hy = np.zeros(T)
    hu = np.zeros(T)
    hn = np.zeros(T)
    nh = 0
    ys[0] = y0
    y = y0
    bmin = y0
    bmax = y0
    blow = -1
    for t in range(T):
        if y < bmin:
            bmin = y
        if y > bmax:
            bmax = y
        if use_controller == 0 or nh == 0:
            u = 0.0
        else:
            gaps = np.abs(y - hy[:nh])
            bi = int(np.argmin(gaps))
            fhat = hn[bi] - hu[bi]
            if gaps[bi] > eps:
                u = -fhat + 0.5 * (bmin + bmax)
            else:
                u = -fhat + ystar
        fy = mcshane_eval_np(fxs, fvs, nf, L, ext_mode, y)
        w = w_bar * ws[t + 1]
        y1 = fy + u + w
        us[t] = u
        ys[t + 1] = y1
        hy[nh] = y
        hu[nh] = u
        hn[nh] = y1
        nh += 1
        if y1 != y1 or y1 > guard or y1 < -guard:
            blow = t + 1
            break
        y = y1
    return ys, us, blow


# ---------------------------------------------------------------------------
# nonparametric duel: greedy anchor-committing opponent vs the controller

def _nonparam_duel_nb_body(y0, L, w_bar, budget_c, eps, ystar, guard, T,
                           use_controller):
    ys = np.zeros(T + 1)
    us = np.zeros(T)
    ws = np.zeros(T + 1)
    vsc = np.zeros(T)
    axs = np.zeros(T + 1)
    avs = np.zeros(T + 1)
    na = 0
    hy = np.zeros(T)
    hu = np.zeros(T)
    hn = np.zeros(T)
    nh = 0
    ys[0] = y0
    y = y0
    bmin = y0
    bmax = y0
    blow = -1
    for t in range(T):
        if y < bmin:
            bmin = y
        if y > bmax:
            bmax = y
        if use_controller == 0 or nh == 0:
            u = 0.0
        else:
            best = np.inf
            bi = 0
            for i in range(nh):
                d = y - hy[i]
                if d < 0.0:
                    d = -d
                if d < best:
                    best = d
                    bi = i
            fhat = hn[bi] - hu[bi]
            if best > eps:
                u = -fhat + 0.5 * (bmin + bmax)
            else:
                u = -fhat + ystar
        if na == 0:
            ay = y if y >= 0.0 else -y
            cap = L * ay + budget_c
            lo = -cap
            hi = cap
        else:
            lo, hi = interval_nb(axs, avs, na, L, y)
        dhi = hi + u
        if dhi < 0.0:
            dhi = -dhi
        dlo = lo + u
        if dlo < 0.0:
            dlo = -dlo
        v = hi if dhi >= dlo else lo
        w = w_bar if (v + u) >= 0.0 else -w_bar
        seen = False
        for i in range(na):
            if axs[i] == y:
                seen = True
                break
        if not seen:
            axs[na] = y
            avs[na] = v
            na += 1
        y1 = v + u + w
        us[t] = u
        ws[t + 1] = w
        vsc[t] = v
        ys[t + 1] = y1
        hy[nh] = y
        hu[nh] = u
        hn[nh] = y1
        nh += 1
        if y1 != y1 or y1 > guard or y1 < -guard:
            blow = t + 1
            break
        y = y1
    return ys, us, ws, vsc, axs, avs, na, blow


nonparam_duel_nb = njit_compile(_nonparam_duel_nb_body)


def nonparam_duel_np(y0, L, w_bar, budget_c, eps, ystar, guard, T,
                     use_controller):
    ys = np.zeros(T + 1)
    us = np.zeros(T)
    ws = np.zeros(T + 1)
    vsc = np.zeros(T)
    axs = np.zeros(T + 1)
    avs = np.zeros(T + 1)
    na = 0
    hy = np.zeros(T)
    hu = np.zeros(T)
    hn = np.zeros(T)
    nh = 0
    ys[0] = y0
    y = y0
    bmin = y0
    bmax = y0
    blow = -1
    for t in range(T):
        if y < bmin:
            bmin = y
        if y > bmax:
            bmax = y
        if use_controller == 0 or nh == 0:
            u = 0.0
        else:
            gaps = np.abs(y - hy[:nh])
            bi = int(np.argmin(gaps))
            fhat = hn[bi] - hu[bi]
            if gaps[bi] > eps:
                u = -fhat + 0.5 * (bmin + bmax)
            else:
                u = -fhat + ystar
        if na == 0:
            cap = L * abs(y) + budget_c
            lo = -cap
            hi = cap
        else:
            lo, hi = interval_np(axs, avs, na, L, y)
        v = hi if abs(hi + u) >= abs(lo + u) else lo
        w = w_bar if (v + u) >= 0.0 else -w_bar
        if not (axs[:na] == y).any():
            axs[na] = y
            avs[na] = v
            na += 1
        y1 = v + u + w
        us[t] = u
        ws[t + 1] = w
        vsc[t] = v
        ys[t + 1] = y1
        hy[nh] = y
        hu[nh] = u
        hn[nh] = y1
        nh += 1
        if y1 != y1 or y1 > guard or y1 < -guard:
            blow = t + 1
            break
        y = y1
    return ys, us, ws, vsc, axs, avs, na, blow


# ---------------------------------------------------------------------------
# zero-order-hold integration of dx/dt = f(x) + u over one sampling period

def _rk4_nb_body(fxs, fvs, nf, L, ext_mode, x0, u, h, substeps, guard):
    dt = h / substeps
    xx = x0
    for _ in range(substeps):
        k1 = mcshane_eval_nb(fxs, fvs, nf, L, ext_mode, xx) + u
        k2 = mcshane_eval_nb(fxs, fvs, nf, L, ext_mode, xx + 0.5 * dt * k1) + u
        k3 = mcshane_eval_nb(fxs, fvs, nf, L, ext_mode, xx + 0.5 * dt * k2) + u
        k4 = mcshane_eval_nb(fxs, fvs, nf, L, ext_mode, xx + dt * k3) + u
        xx = xx + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if xx != xx or xx > guard or xx < -guard:
            return xx
    return xx


rk4_mcshane_nb = njit_compile(_rk4_nb_body)


def rk4_mcshane_np(fxs, fvs, nf, L, ext_mode, x0, u, h, substeps, guard):
    dt = h / substeps
    xx = x0
    for _ in range(substeps):
        k1 = mcshane_eval_np(fxs, fvs, nf, L, ext_mode, xx) + u
        k2 = mcshane_eval_np(fxs, fvs, nf, L, ext_mode, xx + 0.5 * dt * k1) + u
        k3 = mcshane_eval_np(fxs, fvs, nf, L, ext_mode, xx + 0.5 * dt * k2) + u
        k4 = mcshane_eval_np(fxs, fvs, nf, L, ext_mode, xx + dt * k3) + u
        xx = xx + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if xx != xx or xx > guard or xx < -guard:
            return xx
    return xx


# ---------------------------------------------------------------------------
# sampled-data episode, fixed f + certainty-equivalence controller

def _sampled_fixed_nb_body(x0, fxs, fvs, L, ext_mode, c, h, substeps, kappa,
                           n_samples, guard, use_controller):
    nf = fxs.shape[0]
    xs = np.zeros(n_samples + 1)
    us = np.zeros(n_samples)
    sx = np.zeros(n_samples)
    su = np.zeros(n_samples)
    s1 = np.zeros(n_samples)
    ns = 0
    xs[0] = x0
    x = x0
    blow = -1
    for k in range(n_samples):
        if use_controller == 0 or ns == 0:
            u = 0.0
        else:
            best = np.inf
            bi = 0
            for i in range(ns):
                d = x - sx[i]
                if d < 0.0:
                    d = -d
                if d < best:
                    best = d
                    bi = i
            ftilde = (s1[bi] - sx[bi]) / h - su[bi]
            u = -ftilde - x / h
            ax = x if x >= 0.0 else -x
            cap = kappa * (L * ax + c)
            if u > cap:
                u = cap
            if u < -cap:
                u = -cap
        x1 = rk4_mcshane_nb(fxs, fvs, nf, L, ext_mode, x, u, h, substeps, guard)
        us[k] = u
        xs[k + 1] = x1
        sx[ns] = x
        su[ns] = u
        s1[ns] = x1
        ns += 1
        if x1 != x1 or x1 > guard or x1 < -guard:
            blow = k + 1
            break
        x = x1
    return xs, us, blow


sampled_fixed_nb = njit_compile(_sampled_fixed_nb_body)


def sampled_fixed_np(x0, fxs, fvs, L, ext_mode, c, h, substeps, kappa,
                     n_samples, guard, use_controller):
    nf = fxs.shape[0]
    xs = np.zeros(n_samples + 1)
    us = np.zeros(n_samples)
    sx = np.zeros(n_samples)
    su = np.zeros(n_samples)
    s1 = np.zeros(n_samples)
    ns = 0
    xs[0] = x0
    x = x0
    blow = -1
    for k in range(n_samples):
        if use_controller == 0 or ns == 0:
            u = 0.0
        else:
            bi = int(np.argmin(np.abs(x - sx[:ns])))
            ftilde = (s1[bi] - sx[bi]) / h - su[bi]
            u = -ftilde - x / h
            cap = kappa * (L * abs(x) + c)
            if u > cap:
                u = cap
            if u < -cap:
                u = -cap
        x1 = rk4_mcshane_np(fxs, fvs, nf, L, ext_mode, x, u, h, substeps, guard)
        us[k] = u
        xs[k + 1] = x1
        sx[ns] = x
        su[ns] = u
        s1[ns] = x1
        ns += 1
        if x1 != x1 or x1 > guard or x1 < -guard:
            blow = k + 1
            break
        x = x1
    return xs, us, blow


# ---------------------------------------------------------------------------
# sampled-data duel: the opponent commits an anchor at every sample point
# and at every integrator evaluation, and drives each period with the
# envelope (upper or lower) that continues the current push direction

def _env_commit_nb_body(axs, avs, na, L, mode, x):
    cap = axs.shape[0]
    for i in range(na):
        if axs[i] == x:
            return avs[i], na
    v = mcshane_eval_nb(axs, avs, na, L, mode, x)
    if na < cap:
        axs[na] = x
        avs[na] = v
        na += 1
    return v, na


_env_commit_nb = njit_compile(_env_commit_nb_body)


def _env_commit_np(axs, avs, na, L, mode, x):
    hit = axs[:na] == x
    if hit.any():
        return float(avs[:na][int(np.argmax(hit))]), na
    v = mcshane_eval_np(axs, avs, na, L, mode, x)
    if na < axs.shape[0]:
        axs[na] = x
        avs[na] = v
        na += 1
    return v, na


def _sampled_duel_nb_body(x0, L, c, h, substeps, kappa, n_samples, guard,
                          use_controller, cap_anchors):
    xs = np.zeros(n_samples + 1)
    us = np.zeros(n_samples)
    vsc = np.zeros(n_samples)
    axs = np.zeros(cap_anchors)
    avs = np.zeros(cap_anchors)
    na = 0
    sx = np.zeros(n_samples)
    su = np.zeros(n_samples)
    s1 = np.zeros(n_samples)
    ns = 0
    xs[0] = x0
    x = x0
    blow = -1
    for k in range(n_samples):
        if use_controller == 0 or ns == 0:
            u = 0.0
        else:
            best = np.inf
            bi = 0
            for i in range(ns):
                d = x - sx[i]
                if d < 0.0:
                    d = -d
                if d < best:
                    best = d
                    bi = i
            ftilde = (s1[bi] - sx[bi]) / h - su[bi]
            u = -ftilde - x / h
            ax = x if x >= 0.0 else -x
            cap = kappa * (L * ax + c)
            if u > cap:
                u = cap
            if u < -cap:
                u = -cap
        ax = x if x >= 0.0 else -x
        box = L * ax + c
        lo, hi = interval_nb(axs, avs, na, L, x)
        if lo < -box:
            lo = -box
        if hi > box:
            hi = box
        dhi = hi + u
        if dhi < 0.0:
            dhi = -dhi
        dlo = lo + u
        if dlo < 0.0:
            dlo = -dlo
        v = hi if dhi >= dlo else lo
        seen = False
        for i in range(na):
            if axs[i] == x:
                seen = True
                break
        if not seen and na < cap_anchors:
            axs[na] = x
            avs[na] = v
            na += 1
        mode = 0 if (v + u) >= 0.0 else 1
        dt = h / substeps
        xx = x
        for _ in range(substeps):
            f1, na = _env_commit_nb(axs, avs, na, L, mode, xx)
            k1 = f1 + u
            f2, na = _env_commit_nb(axs, avs, na, L, mode, xx + 0.5 * dt * k1)
            k2 = f2 + u
            f3, na = _env_commit_nb(axs, avs, na, L, mode, xx + 0.5 * dt * k2)
            k3 = f3 + u
            f4, na = _env_commit_nb(axs, avs, na, L, mode, xx + dt * k3)
            k4 = f4 + u
            xx = xx + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if xx != xx or xx > guard or xx < -guard:
                break
        x1 = xx
        us[k] = u
        vsc[k] = v
        xs[k + 1] = x1
        sx[ns] = x
        su[ns] = u
        s1[ns] = x1
        ns += 1
        if x1 != x1 or x1 > guard or x1 < -guard:
            blow = k + 1
            break
        x = x1
    return xs, us, vsc, axs, avs, na, blow


sampled_duel_nb = njit_compile(_sampled_duel_nb_body)


def sampled_duel_np(x0, L, c, h, substeps, kappa, n_samples, guard,
                    use_controller, cap_anchors):
    xs = np.zeros(n_samples + 1)
    us = np.zeros(n_samples)
    vsc = np.zeros(n_samples)
    axs = np.zeros(cap_anchors)
    avs = np.zeros(cap_anchors)
    na = 0
    sx = np.zeros(n_samples)
    su = np.zeros(n_samples)
    s1 = np.zeros(n_samples)
    ns = 0
    xs[0] = x0
    x = x0
    blow = -1
    for k in range(n_samples):
        if use_controller == 0 or ns == 0:
            u = 0.0
        else:
            bi = int(np.argmin(np.abs(x - sx[:ns])))
            ftilde = (s1[bi] - sx[bi]) / h - su[bi]
            u = -ftilde - x / h
            cap = kappa * (L * abs(x) + c)
            if u > cap:
                u = cap
            if u < -cap:
                u = -cap
        box = L * abs(x) + c
        lo, hi = interval_np(axs, avs, na, L, x)
        if lo < -box:
            lo = -box
        if hi > box:
            hi = box
        v = hi if abs(hi + u) >= abs(lo + u) else lo
        if not (axs[:na] == x).any() and na < cap_anchors:
            axs[na] = x
            avs[na] = v
            na += 1
        mode = 0 if (v + u) >= 0.0 else 1
        dt = h / substeps
        xx = x
        for _ in range(substeps):
            f1, na = _env_commit_np(axs, avs, na, L, mode, xx)
            k1 = f1 + u
            f2, na = _env_commit_np(axs, avs, na, L, mode, xx + 0.5 * dt * k1)
            k2 = f2 + u
            f3, na = _env_commit_np(axs, avs, na, L, mode, xx + 0.5 * dt * k2)
            k3 = f3 + u
            f4, na = _env_commit_np(axs, avs, na, L, mode, xx + dt * k3)
            k4 = f4 + u
            xx = xx + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if xx != xx or xx > guard or xx < -guard:
                break
        x1 = xx
        us[k] = u
        vsc[k] = v
        xs[k + 1] = x1
        sx[ns] = x
        su[ns] = u
        s1[ns] = x1
        ns += 1
        if x1 != x1 or x1 > guard or x1 < -guard:
            blow = k + 1
            break
        x = x1
    return xs, us, vsc, axs, avs, na, blow


# ---------------------------------------------------------------------------
# Markov jump linear episode with residual-matching mode estimation

def _mjls_nb_body(A, B, Kg, P, x0, mode0, munif, W, guard, use_controller):
    T = W.shape[0]
    N = A.shape[0]
    n = A.shape[1]
    m = B.shape[2]
    X = np.zeros((T + 1, n))
    U = np.zeros((T, m))
    modes = np.zeros(T + 1, dtype=np.int64)
    est = np.full(T + 1, -1, dtype=np.int64)
    X[0] = x0
    modes[0] = mode0
    blow = -1
    for t in range(T):
        if t >= 1:
            bestr = np.inf
            bi = 0
            for i in range(N):
                rss = 0.0
                for a in range(n):
                    acc = X[t, a]
                    for j in range(n):
                        acc -= A[i, a, j] * X[t - 1, j]
                    for j in range(m):
                        acc -= B[i, a, j] * U[t - 1, j]
                    rss += acc * acc
                if rss < bestr:
                    bestr = rss
                    bi = i
            est[t] = bi
            ihat = 0
            bestp = P[bi, 0]
            for j in range(1, N):
                if P[bi, j] > bestp:
                    bestp = P[bi, j]
                    ihat = j
        else:
            ihat = 0
        if use_controller != 0:
            for a in range(m):
                acc = 0.0
                for j in range(n):
                    acc += Kg[ihat, a, j] * X[t, j]
                U[t, a] = -acc
        th = modes[t]
        bad = False
        for a in range(n):
            acc = W[t, a]
            for j in range(n):
                acc += A[th, a, j] * X[t, j]
            for j in range(m):
                acc += B[th, a, j] * U[t, j]
            X[t + 1, a] = acc
            if acc != acc or acc > guard or acc < -guard:
                bad = True
        if bad:
            blow = t + 1
            break
        r = munif[t]
        acc = 0.0
        nm = N - 1
        for j in range(N):
            acc += P[th, j]
            if r < acc:
                nm = j
                break
        modes[t + 1] = nm
    return X, U, modes, est, blow


mjls_episode_nb = njit_compile(_mjls_nb_body)


def mjls_episode_np(A, B, Kg, P, x0, mode0, munif, W, guard, use_controller):
    T = W.shape[0]
    N = A.shape[0]
    m = B.shape[2]
    n = A.shape[1]
    X = np.zeros((T + 1, n))
    U = np.zeros((T, m))
    modes = np.zeros(T + 1, dtype=np.int64)
    est = np.full(T + 1, -1, dtype=np.int64)
    X[0] = x0
    modes[0] = mode0
    blow = -1
    for t in range(T):
        if t >= 1:
            preds = A @ X[t - 1] + B @ U[t - 1]
            resid = np.sum((X[t] - preds) ** 2, axis=1)
            bi = int(np.argmin(resid))
            est[t] = bi
            ihat = int(np.argmax(P[bi]))
        else:
            ihat = 0
        if use_controller != 0:
            U[t] = -(Kg[ihat] @ X[t])
        th = modes[t]
        x1 = A[th] @ X[t] + B[th] @ U[t] + W[t]
        X[t + 1] = x1
        if np.any(x1 != x1) or np.any(x1 > guard) or np.any(x1 < -guard):
            blow = t + 1
            break
        r = munif[t]
        acc = 0.0
        nm = N - 1
        for j in range(N):
            acc += P[th, j]
            if r < acc:
                nm = j
                break
        modes[t + 1] = nm
    return X, U, modes, est, blow


def _mjls_step_nb_body(Ai, Bi, x, u, w):
    n = Ai.shape[0]
    m = Bi.shape[1]
    out = np.zeros(n)
    for a in range(n):
        acc = w[a]
        for j in range(n):
            acc += Ai[a, j] * x[j]
        for j in range(m):
            acc += Bi[a, j] * u[j]
        out[a] = acc
    return out


mjls_step_nb = njit_compile(_mjls_step_nb_body)


def mjls_step_np(Ai, Bi, x, u, w):
    return Ai @ x + Bi @ u + w


# ---------------------------------------------------------------------------
# coupled fixed-point solver for the jump-linear stabilizability equations

def _riccati_solve_body(A, B, P, tol, max_iter, div_guard, svd_rtol):
    N = A.shape[0]
    n = A.shape[1]
    m = B.shape[2]
    Ms = np.zeros((N, n, n))
    for i in range(N):
        for a in range(n):
            Ms[i, a, a] = 1.0
    hist = np.zeros(max_iter)
    status = 2
    iters = max_iter
    delta = np.inf
    for k in range(max_iter):
        Mnew = np.zeros((N, n, n))
        for i in range(N):
            S_aa = np.zeros((n, n))
            S_ab = np.zeros((n, m))
            S_bb = np.zeros((m, m))
            for j in range(N):
                p = P[i, j]
                pm = p * Ms[j]
                S_aa = S_aa + A[j].T @ pm @ A[j]
                S_ab = S_ab + A[j].T @ pm @ B[j]
                S_bb = S_bb + B[j].T @ pm @ B[j]
            U, s, Vt = np.linalg.svd(S_bb)
            pinv = np.zeros((m, m))
            if s[0] > 0.0:
                cut = svd_rtol * s[0]
                for a in range(m):
                    if s[a] > cut:
                        pinv = pinv + (1.0 / s[a]) * np.outer(Vt[a], U[:, a])
            X = S_aa - S_ab @ pinv @ S_ab.T
            for a in range(n):
                X[a, a] += 1.0
            Mnew[i] = 0.5 * (X + X.T)
        delta = 0.0
        nrm = 0.0
        for i in range(N):
            for a in range(n):
                for bcol in range(n):
                    d = Mnew[i, a, bcol] - Ms[i, a, bcol]
                    if d < 0.0:
                        d = -d
                    if d > delta:
                        delta = d
                    v = Mnew[i, a, bcol]
                    if v < 0.0:
                        v = -v
                    if v > nrm:
                        nrm = v
        Ms = Mnew
        hist[k] = nrm
        if nrm > div_guard:
            status = 1
            iters = k + 1
            break
        if delta < tol:
            status = 0
            iters = k + 1
            break
    if status == 2:
        lookback = 100
        if max_iter < lookback + 1:
            lookback = max_iter - 1
        growing = lookback > 0
        for k in range(max_iter - lookback, max_iter):
            if hist[k] <= hist[k - 1]:
                growing = False
                break
        if growing:
            status = 1
    return Ms, status, iters, delta


riccati_solve_nb = njit_compile(_riccati_solve_body)
riccati_solve_np = _riccati_solve_body


# ---------------------------------------------------------------------------
# backend registry

VARIANTS = {
    "power_eval": (power_eval_nb, power_eval_np),
    "mcshane_eval": (mcshane_eval_nb, mcshane_eval_np),
    "interval": (interval_nb, interval_np),
    "parametric_episode": (parametric_episode_nb, parametric_episode_np),
    "nonparam_fixed": (nonparam_fixed_nb, nonparam_fixed_np),
    "nonparam_duel": (nonparam_duel_nb, nonparam_duel_np),
    "rk4_mcshane": (rk4_mcshane_nb, rk4_mcshane_np),
    "sampled_fixed": (sampled_fixed_nb, sampled_fixed_np),
    "sampled_duel": (sampled_duel_nb, sampled_duel_np),
    "mjls_episode": (mjls_episode_nb, mjls_episode_np),
    "mjls_step": (mjls_step_nb, mjls_step_np),
    "riccati_solve": (riccati_solve_nb, riccati_solve_np),
}


def select(name):
    nb, np_ = VARIANTS[name]
    return nb if NUMBA_ENABLED else np_


power_eval = select("power_eval")
mcshane_eval = select("mcshane_eval")
interval = select("interval")
parametric_episode = select("parametric_episode")
nonparam_fixed = select("nonparam_fixed")
nonparam_duel = select("nonparam_duel")
rk4_mcshane = select("rk4_mcshane")
sampled_fixed = select("sampled_fixed")
sampled_duel = select("sampled_duel")
mjls_episode = select("mjls_episode")
mjls_step = select("mjls_step")
riccati_solve = select("riccati_solve")


def warm_up():
    """Trigger JIT compilation of every kernel on tiny inputs."""
    xs = np.array([0.0, 1.0])
    vs = np.array([0.0, 1.0])
    power_eval(1.0, 2.0, 1.5)
    mcshane_eval(xs, vs, 2, 1.0, 0, 0.5)
    interval(xs, vs, 2, 1.0, 0.5)
    parametric_episode(0.0, 1.0, np.zeros(3), 1.0, 2.0, 1.0, 1.0, 1e150)
    nonparam_fixed(0.0, xs, vs, 1.0, 0, np.zeros(3), 1.0, 0.1, 0.0, 1e150, 1)
    nonparam_duel(0.1, 1.0, 1.0, 10.0, 0.1, 0.0, 1e150, 3, 1)
    rk4_mcshane(xs, vs, 2, 1.0, 0, 0.5, 0.0, 0.1, 2, 1e150)
    sampled_fixed(0.5, xs, vs, 1.0, 0, 1.0, 0.1, 2, 4.0, 2, 1e150, 1)
    sampled_duel(0.0, 1.0, 1.0, 0.1, 2, 4.0, 2, 1e150, 1, 64)
    A = np.zeros((1, 1, 1))
    Bm = np.ones((1, 1, 1))
    Kg = np.zeros((1, 1, 1))
    P = np.ones((1, 1))
    mjls_episode(A, Bm, Kg, P, np.zeros(1), 0, np.zeros(2), np.zeros((2, 1)),
                 1e150, 1)
    mjls_step(A[0], Bm[0], np.zeros(1), np.zeros(1), np.zeros(1))
    riccati_solve(A, Bm, P, 1e-10, 5, 1e12, 1e-10)
