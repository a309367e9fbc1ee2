"""Hot loops over pairs of surface samples.

Every kernel has a compiled loop version and a vectorized numpy version with
the same signature; :data:`HAVE_NUMBA` picks one at import time.  Both return
per-row partial sums so the caller can reduce them in a fixed order.
"""
import numpy as np

from ._backend import HAVE_NUMBA, njit

TWO_PI = 2.0 * np.pi
SINGULAR_CHORD2 = 1e-14
SINGULAR_DSTAR2 = 1e-6


@njit(inline="always")
def _sweep(c1, c2, total, forward_order):
    if forward_order:
        d = c2 - c1
    else:
        d = total - c1 + c2
    if d < 0.0:
        d = 0.0
    elif d > total:
        d = total
    return d


@njit(inline="always")
def _wrap_signed(x, period):
    x = x % period
    if x > 0.5 * period:
        x -= period
    return x


@njit
def _energy_rows_nb(PX, PY, wX, wY, thX, thY, LaU, LaV, LaT, LbU, LbV, LbT,
                    TU, TV, Ttot, SU, SV, Stot, uX, uY, kapX, tauX,
                    r, alpha, eps_d, tol_far, flags):
    nu, nth = wX.shape
    nv, nph = wY.shape
    rows = np.zeros(nu)
    nflag = 0
    minfar = np.inf
    sing = np.full(4, -1, dtype=np.int64)
    half = 0.5 * alpha
    for i in range(nu):
        acc_i = 0.0
        for j in range(nth):
            ct = np.cos(thX[j])
            onemk = 1.0 - r * kapX[i] * ct
            acc_j = 0.0
            for k in range(nv):
                fo = uY[k] >= uX[i]
                nbf = r * _sweep(TU[i], TV[k], Ttot, fo)
                nbb = r * Ttot - nbf
                ltf = _sweep(LaU[j, i], LaV[j, k], LaT[j], fo)
                ltb = LaT[j] - ltf
                eta1 = _wrap_signed(SV[k] - SU[i], Stot)
                for l in range(nph):
                    eta2 = _wrap_signed(thY[l] - thX[j], TWO_PI)
                    q = eta2 + eta1 * tauX[i]
                    a2 = eta1 * eta1 * onemk * onemk + r * r * q * q
                    if a2 < eps_d:
                        if nflag < flags.shape[0]:
                            flags[nflag, 0] = i
                            flags[nflag, 1] = j
                            flags[nflag, 2] = k
                            flags[nflag, 3] = l
                        nflag += 1
                        continue
                    dx = PX[i, j, 0] - PY[k, l, 0]
                    dy = PX[i, j, 1] - PY[k, l, 1]
                    dz = PX[i, j, 2] - PY[k, l, 2]
                    c2 = dx * dx + dy * dy + dz * dz
                    lm = abs(eta2) * r
                    lpf = _sweep(LbU[l, i], LbV[l, k], LbT[l], fo)
                    lpb = LbT[l] - lpf
                    df = (lm + nbf) * (lm + nbf) + ltf * lpf
                    db = (lm + nbb) * (lm + nbb) + ltb * lpb
                    d2 = df if df <= db else db
                    if c2 < SINGULAR_CHORD2 and d2 > SINGULAR_DSTAR2:
                        if sing[0] < 0:
                            sing[0] = i
                            sing[1] = j
                            sing[2] = k
                            sing[3] = l
                        continue
                    if d2 >= tol_far and c2 < minfar:
                        minfar = c2
                    if alpha == 2.0:
                        f = 1.0 / c2 - 1.0 / d2
                    else:
                        f = c2 ** (-half) - d2 ** (-half)
                    acc_j += wY[k, l] * f
            acc_i += wX[i, j] * acc_j
        rows[i] = acc_i
    return rows, nflag, minfar, sing


def _wrap_signed_np(x, period):
    x = np.mod(x, period)
    return np.where(x > 0.5 * period, x - period, x)


def _sweep_np(c1, c2, total, forward_order):
    d = np.where(forward_order, c2 - c1, total - c1 + c2)
    return np.clip(d, 0.0, total)


def _energy_rows_np(PX, PY, wX, wY, thX, thY, LaU, LaV, LaT, LbU, LbV, LbT,
                    TU, TV, Ttot, SU, SV, Stot, uX, uY, kapX, tauX,
                    r, alpha, eps_d, tol_far, flags):
    nu, nth = wX.shape
    rows = np.zeros(nu)
    nflag = 0
    minfar = np.inf
    sing = np.full(4, -1, dtype=np.int64)
    half = 0.5 * alpha
    # axes: (j, k, l)
    eta2 = _wrap_signed_np(thY[None, None, :] - thX[:, None, None], TWO_PI)
    lm = np.abs(eta2) * r
    for i in range(nu):
        fo = (uY >= uX[i])[None, :, None]
        ct = np.cos(thX)[:, None, None]
        onemk = 1.0 - r * kapX[i] * ct
        eta1 = _wrap_signed_np(SV - SU[i], Stot)[None, :, None]
        q = eta2 + eta1 * tauX[i]
        a2 = eta1**2 * onemk**2 + r * r * q * q
        flagged = a2 < eps_d
        nbf = r * _sweep_np(TU[i], TV, Ttot, fo[0, :, 0])[None, :, None]
        nbb = r * Ttot - nbf
        ltf = _sweep_np(LaU[:, i][:, None], LaV, LaT[:, None], fo[0, :, 0][None, :])[:, :, None]
        ltb = LaT[:, None, None] - ltf
        lpf = _sweep_np(LbU[:, i][:, None], LbV, LbT[:, None], fo[0, :, 0][None, :]).T[None, :, :]
        lpb = LbT[None, None, :] - lpf
        d2 = np.minimum((lm + nbf) ** 2 + ltf * lpf, (lm + nbb) ** 2 + ltb * lpb)
        diff = PX[i][:, None, None, :] - PY[None, :, :, :]
        c2 = np.einsum("jkln,jkln->jkl", diff, diff)
        singular = (c2 < SINGULAR_CHORD2) & (d2 > SINGULAR_DSTAR2) & ~flagged
        skip = flagged | singular
        if singular.any() and sing[0] < 0:
            j, k, l = np.argwhere(singular)[0]
            sing[:] = (i, j, k, l)
        far = (d2 >= tol_far) & ~skip
        if far.any():
            minfar = min(minfar, float(c2[far].min()))
        c2s = np.where(skip, 1.0, c2)
        d2s = np.where(skip, 1.0, d2)
        if alpha == 2.0:
            f = 1.0 / c2s - 1.0 / d2s
        else:
            f = c2s ** (-half) - d2s ** (-half)
        f = np.where(skip, 0.0, f)
        acc_j = np.einsum("jkl,kl->j", f, wY)
        rows[i] = float(np.dot(wX[i], acc_j))
        for j, k, l in np.argwhere(flagged):
            if nflag < flags.shape[0]:
                flags[nflag] = (i, j, k, l)
            nflag += 1
    return rows, nflag, minfar, sing


@njit
def _far_pair_scan_nb(P, th, u, LaU, LaT, TU, Ttot, r, tol_far):
    nu, nth = P.shape[0], P.shape[1]
    best = np.full((nu, nth), np.inf)
    ratio = np.full((nu, nth), np.inf)
    part = np.full((nu, nth, 4), -1, dtype=np.int64)
    for i in range(nu):
        for j in range(nth):
            for k in range(nu):
                fo = u[k] >= u[i]
                nbf = r * _sweep(TU[i], TU[k], Ttot, fo)
                nbb = r * Ttot - nbf
                ltf = _sweep(LaU[j, i], LaU[j, k], LaT[j], fo)
                ltb = LaT[j] - ltf
                for l in range(nth):
                    dx = P[i, j, 0] - P[k, l, 0]
                    dy = P[i, j, 1] - P[k, l, 1]
                    dz = P[i, j, 2] - P[k, l, 2]
                    c2 = dx * dx + dy * dy + dz * dz
                    dm = abs(th[j] - th[l]) % TWO_PI
                    lm = r * min(dm, TWO_PI - dm)
                    lpf = _sweep(LaU[l, i], LaU[l, k], LaT[l], fo)
                    lpb = LaT[l] - lpf
                    df = (lm + nbf) * (lm + nbf) + ltf * lpf
                    db = (lm + nbb) * (lm + nbb) + ltb * lpb
                    d2 = df if df <= db else db
                    if d2 < tol_far:
                        continue
                    if c2 < best[i, j]:
                        best[i, j] = c2
                        part[i, j, 0] = k
                        part[i, j, 1] = l
                    q = c2 / d2
                    if q < ratio[i, j]:
                        ratio[i, j] = q
                        part[i, j, 2] = k
                        part[i, j, 3] = l
    return best, ratio, part


def _far_pair_scan_np(P, th, u, LaU, LaT, TU, Ttot, r, tol_far):
    nu, nth = P.shape[0], P.shape[1]
    best = np.full((nu, nth), np.inf)
    ratio = np.full((nu, nth), np.inf)
    part = np.full((nu, nth, 4), -1, dtype=np.int64)
    dm = np.mod(np.abs(th[:, None] - th[None, :]), TWO_PI)
    lm = r * np.minimum(dm, TWO_PI - dm)  # (j, l)
    rows = np.arange(nth)
    for i in range(nu):
        fo = u >= u[i]
        nbf = r * _sweep_np(TU[i], TU, Ttot, fo)  # (k,)
        nbb = r * Ttot - nbf
        lt = _sweep_np(LaU[:, i][:, None], LaU, LaT[:, None], fo[None, :])  # (angle, k)
        ltb = LaT[:, None] - lt
        # axes (j, k, l)
        df = (lm[:, None, :] + nbf[None, :, None]) ** 2 + lt[:, :, None] * lt.T[None, :, :]
        db = (lm[:, None, :] + nbb[None, :, None]) ** 2 + ltb[:, :, None] * ltb.T[None, :, :]
        d2 = np.minimum(df, db)
        diff = P[i][:, None, None, :] - P[None, :, :, :]
        c2 = np.einsum("jkln,jkln->jkl", diff, diff)
        far = d2 >= tol_far
        for out, vals, col in ((best, np.where(far, c2, np.inf), 0),
                               (ratio, np.where(far, c2 / np.where(far, d2, 1.0), np.inf), 2)):
            flat = vals.reshape(nth, -1)
            idx = np.argmin(flat, axis=1)
            out[i] = flat[rows, idx]
            ok = np.isfinite(out[i])
            part[i, :, col] = np.where(ok, idx // nth, -1)
            part[i, :, col + 1] = np.where(ok, idx % nth, -1)
    return best, ratio, part


@njit
def _ohara_rows_nb(X, Y, wX, wY, SX, SY, L, alpha):
    n, m = X.shape[0], Y.shape[0]
    rows = np.zeros(n)
    sing = np.full(2, -1, dtype=np.int64)
    half = 0.5 * alpha
    for i in range(n):
        acc = 0.0
        for k in range(m):
            dx = X[i, 0] - Y[k, 0]
            dy = X[i, 1] - Y[k, 1]
            dz = X[i, 2] - Y[k, 2]
            c2 = dx * dx + dy * dy + dz * dz
            d = abs(SX[i] - SY[k]) % L
            if L - d < d:
                d = L - d
            d2 = d * d
            if c2 < SINGULAR_CHORD2 and d2 > SINGULAR_DSTAR2:
                if sing[0] < 0:
                    sing[0] = i
                    sing[1] = k
                continue
            if alpha == 2.0:
                f = 1.0 / c2 - 1.0 / d2
            else:
                f = c2 ** (-half) - d2 ** (-half)
            acc += wY[k] * f
        rows[i] = wX[i] * acc
    return rows, sing


def _ohara_rows_np(X, Y, wX, wY, SX, SY, L, alpha):
    diff = X[:, None, :] - Y[None, :, :]
    c2 = np.einsum("ikn,ikn->ik", diff, diff)
    d = np.mod(np.abs(SX[:, None] - SY[None, :]), L)
    d = np.minimum(d, L - d)
    d2 = d * d
    singular = (c2 < SINGULAR_CHORD2) & (d2 > SINGULAR_DSTAR2)
    sing = np.full(2, -1, dtype=np.int64)
    if singular.any():
        sing[:] = np.argwhere(singular)[0]
    c2 = np.where(singular, 1.0, c2)
    d2 = np.where(singular, 1.0, d2)
    if alpha == 2.0:
        f = 1.0 / c2 - 1.0 / d2
    else:
        f = c2 ** (-0.5 * alpha) - d2 ** (-0.5 * alpha)
    f = np.where(singular, 0.0, f)
    return wX * (f @ wY), sing


if HAVE_NUMBA:
    energy_rows = _energy_rows_nb
    far_pair_scan = _far_pair_scan_nb
    ohara_rows = _ohara_rows_nb
else:
    energy_rows = _energy_rows_np
    far_pair_scan = _far_pair_scan_np
    ohara_rows = _ohara_rows_np
