"""Independent reference implementations used only by the tests.

Nothing here imports the code paths it checks.
"""

import itertools
import math

import numpy as np


# ---------------------------------------------------------------- metrics


def count_confusion(pred, ref):
    """Per-pixel loop over plain nested lists of 0/1 (1 = foreground)."""
    tp = fp = fn = tn = 0
    for prow, rrow in zip(pred, ref):
        for p, r in zip(prow, rrow):
            if p and r:
                tp += 1
            elif p:
                fp += 1
            elif r:
                fn += 1
            else:
                tn += 1
    return tp, fp, fn, tn


def raw_drd_weights():
    w = [[0.0] * 5 for _ in range(5)]
    for i in range(-2, 3):
        for j in range(-2, 3):
            w[i + 2][j + 2] = 1.0 if i == 0 and j == 0 else 1.0 / math.sqrt(i * i + j * j)
    total = sum(sum(row) for row in w)
    return [[v / total for v in row] for row in w], total


def naive_nubn(ref):
    h, w = len(ref), len(ref[0])
    count = 0
    for by in range(0, h, 8):
        for bx in range(0, w, 8):
            vals = {ref[y][x] for y in range(by, min(by + 8, h)) for x in range(bx, min(bx + 8, w))}
            if len(vals) == 2:
                count += 1
    return count


def naive_drd(pred, ref):
    """Direct double sum: each flipped pixel against its 5x5 reference block."""
    W, _ = raw_drd_weights()
    h, w = len(ref), len(ref[0])
    total = 0.0
    for y in range(h):
        for x in range(w):
            if pred[y][x] == ref[y][x]:
                continue
            dk = 0.0
            for i in range(-2, 3):
                for j in range(-2, 3):
                    yy, xx = y + i, x + j
                    gt = ref[yy][xx] if 0 <= yy < h and 0 <= xx < w else 0
                    dk += abs(gt - pred[y][x]) * W[i + 2][j + 2]
            total += dk
    if total == 0:
        return 0.0
    blocks = naive_nubn(ref)
    return math.inf if blocks == 0 else total / blocks


# ---------------------------------------------------------------- SVR dual


def brute_force_svr_dual(K, y, C, eps):
    """Exact minimum of ``1/2 b'Kb - y'b + eps|b|_1`` s.t. sum(b)=0, |b_i|<=C.

    Enumerates every assignment of each coefficient to one of five faces
    {-C, 0, +C, free-negative, free-positive}.  On each face the problem is
    an equality-constrained quadratic solved via its KKT system; a candidate
    is kept when it lies on its face.  The convex optimum lies in the relative
    interior of some face, so the best kept candidate is the global optimum.
    """
    n = len(y)
    best_val, best_beta = math.inf, None
    for faces in itertools.product(range(5), repeat=n):
        beta = np.zeros(n)
        free, signs = [], []
        for i, f in enumerate(faces):
            if f == 0:
                beta[i] = -C
            elif f == 2:
                beta[i] = C
            elif f == 3:
                free.append(i)
                signs.append(-1.0)
            elif f == 4:
                free.append(i)
                signs.append(1.0)
        fixed = [i for i in range(n) if i not in free]
        if not free:
            if abs(beta.sum()) > 1e-12:
                continue
        else:
            F = np.array(free)
            s = np.array(signs)
            m = len(F)
            A = np.zeros((m + 1, m + 1))
            A[:m, :m] = K[np.ix_(F, F)]
            A[:m, m] = 1.0
            A[m, :m] = 1.0
            rhs = np.zeros(m + 1)
            rhs[:m] = y[F] - eps * s - K[np.ix_(F, fixed)] @ beta[fixed]
            rhs[m] = -beta[fixed].sum()
            try:
                sol = np.linalg.solve(A, rhs)
            except np.linalg.LinAlgError:
                continue
            bf = sol[:m]
            if np.any(bf * s < -1e-12) or np.any(np.abs(bf) > C + 1e-12):
                continue
            beta[F] = bf
        val = 0.5 * beta @ K @ beta - y @ beta + eps * np.abs(beta).sum()
        if val < best_val:
            best_val, best_beta = val, beta
    return best_val, best_beta


# ---------------------------------------------------------------- Sauvola


def naive_sauvola(levels, window, k, R=0.5):
    """Sliding-window loop over integer levels; mask of foreground pixels."""
    h, w = len(levels), len(levels[0])
    r = window // 2
    out = [[False] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            s1 = s2 = cnt = 0
            for yy in range(max(0, y - r), min(h, y + r + 1)):
                for xx in range(max(0, x - r), min(w, x + r + 1)):
                    v = int(levels[yy][xx])
                    s1 += v
                    s2 += v * v
                    cnt += 1
            scale = 255.0 * cnt
            mean = s1 / scale
            sd = math.sqrt(float(cnt * s2 - s1 * s1)) / scale
            thr = mean * (1.0 + k * (sd / R - 1.0))
            out[y][x] = int(levels[y][x]) / 255.0 <= thr
    return out


# ---------------------------------------------------------------- Otsu


def exhaustive_otsu(levels):
    """Scan all 256 thresholds, exact rational between-class variance."""
    from fractions import Fraction

    flat = [int(v) for row in levels for v in row]
    n = len(flat)
    best_t, best = None, None
    for t in range(256):
        lo = [v for v in flat if v <= t]
        hi = [v for v in flat if v > t]
        if not lo or not hi:
            continue
        w0, w1 = Fraction(len(lo), n), Fraction(len(hi), n)
        m0, m1 = Fraction(sum(lo), len(lo)), Fraction(sum(hi), len(hi))
        var = w0 * w1 * (m0 - m1) ** 2
        if best is None or var > best:
            best_t, best = t, var
    return best_t
