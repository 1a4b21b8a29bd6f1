"""Independent oracle for the db7 filter and the 3-level mDWT marginals.

Builds db7 by Daubechies spectral factorization (mpmath), then evaluates the
multilevel DWT through an explicit dense analysis operator (numpy) so that the
C++ convolution path is checked against a structurally different computation.

Convention (shared definition, independent implementation):
  extension: half-sample symmetric by L-1 samples on each side
  coefficient k of a level = sum_j h[j] * ext[2k + 1 + (L-1) - j],
  k = 0 .. floor((n + L - 1) / 2) - 1
"""
import mpmath as mp
import numpy as np

mp.mp.dps = 50
N = 7


def db_lowpass(n):
    # P(y) = sum_k C(n-1+k, k) y^k, y = (1 - cos w)/2 ; z-domain roots
    coeffs = [mp.binomial(n - 1 + k, k) for k in range(n)]
    yroots = mp.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=200)
    zroots = []
    for y in yroots:
        # y = (2 - z - 1/z)/4  ->  z^2 - (2 - 4y) z + 1 = 0
        b = 2 - 4 * y
        disc = mp.sqrt(b * b - 4)
        z1, z2 = (b + disc) / 2, (b - disc) / 2
        zroots.append(z1 if abs(z1) < 1 else z2)
    poly = [mp.mpc(1)]
    for r in [mp.mpc(-1)] * n + zroots:
        poly = [a - r * b for a, b in zip(poly + [0], [0] + poly)]
    h = [mp.re(c) for c in poly]
    s = sum(h)
    h = [c * mp.sqrt(2) / s for c in h]
    return h


h = db_lowpass(N)
rec_lo = [float(c) for c in h]
dec_lo = list(reversed(rec_lo))
L = len(dec_lo)
dec_hi = [((-1) ** (k + 1)) * rec_lo[k] for k in range(L)]
dec_hi = [(-1) ** k * dec_lo[L - 1 - k] for k in range(L)]


def sym_index(i, n):
    period = 2 * n
    i %= period
    return i if i < n else period - 1 - i


def level_operator(n, filt):
    out = (n + L - 1) // 2
    M = np.zeros((out, n))
    for k in range(out):
        for j in range(L):
            e = 2 * k + 1 - j  # index into the original signal (ext offset removed)
            M[k, sym_index(e, n)] += filt[j]
    return M


def marginals(x):
    a = np.asarray(x, dtype=float)
    out = []
    for _ in range(3):
        n = len(a)
        d = level_operator(n, dec_hi) @ a
        a = level_operator(n, dec_lo) @ a
        out.append(float(np.abs(d).sum()))
    out.append(float(np.abs(a).sum()))
    return out


if __name__ == "__main__":
    print("dec_lo", [repr(c) for c in dec_lo])
    print("dec_hi", [repr(c) for c in dec_hi])
    ramp = np.arange(32, dtype=float)
    print("ramp32", [repr(v) for v in marginals(ramp)])
    print("const", marginals(np.full(64, 3.0)))
