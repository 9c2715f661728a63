"""Density-matrix kernels compiled with numba; loops update ``rho`` in place.

Same conventions and results as the numpy twin, which the tests check.
"""

from __future__ import annotations

from numba import njit


@njit(cache=True)
def apply_1q(rho, u, k, n):
    dim = rho.shape[0]
    m = 1 << (n - 1 - k)
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    for i in range(dim):
        if i & m:
            continue
        i1 = i | m
        for j in range(dim):
            a = rho[i, j]
            b = rho[i1, j]
            rho[i, j] = u00 * a + u01 * b
            rho[i1, j] = u10 * a + u11 * b
    c00, c01, c10, c11 = u00.conjugate(), u01.conjugate(), u10.conjugate(), u11.conjugate()
    for j in range(dim):
        if j & m:
            continue
        j1 = j | m
        for i in range(dim):
            a = rho[i, j]
            b = rho[i, j1]
            rho[i, j] = a * c00 + b * c01
            rho[i, j1] = a * c10 + b * c11
    return rho


@njit(cache=True)
def apply_2q(rho, u, k1, k2, n):
    dim = rho.shape[0]
    m1 = 1 << (n - 1 - k1)
    m2 = 1 << (n - 1 - k2)
    idx = [0, 0, 0, 0]
    vals = [0j, 0j, 0j, 0j]
    uc = u.conj()
    for i in range(dim):
        if i & m1 or i & m2:
            continue
        idx[0] = i
        idx[1] = i | m2
        idx[2] = i | m1
        idx[3] = i | m1 | m2
        for j in range(dim):
            for r in range(4):
                vals[r] = rho[idx[r], j]
            for r in range(4):
                acc = 0j
                for s in range(4):
                    acc += u[r, s] * vals[s]
                rho[idx[r], j] = acc
    for j in range(dim):
        if j & m1 or j & m2:
            continue
        idx[0] = j
        idx[1] = j | m2
        idx[2] = j | m1
        idx[3] = j | m1 | m2
        for i in range(dim):
            for r in range(4):
                vals[r] = rho[i, idx[r]]
            for r in range(4):
                acc = 0j
                for s in range(4):
                    acc += vals[s] * uc[r, s]
                rho[i, idx[r]] = acc
    return rho


@njit(cache=True)
def depolarize(rho, k, n, p):
    dim = rho.shape[0]
    m = 1 << (n - 1 - k)
    keep = 1.0 - 2.0 * p / 3.0
    mix = 2.0 * p / 3.0
    off = 1.0 - 4.0 * p / 3.0
    for i in range(dim):
        if i & m:
            continue
        i1 = i | m
        for j in range(dim):
            if j & m:
                continue
            j1 = j | m
            a = rho[i, j]
            d = rho[i1, j1]
            rho[i, j] = keep * a + mix * d
            rho[i1, j1] = keep * d + mix * a
            rho[i, j1] *= off
            rho[i1, j] *= off
    return rho


@njit(cache=True)
def reset(rho, k, n):
    dim = rho.shape[0]
    m = 1 << (n - 1 - k)
    for i in range(dim):
        if i & m:
            continue
        i1 = i | m
        for j in range(dim):
            if j & m:
                continue
            j1 = j | m
            rho[i, j] += rho[i1, j1]
            rho[i1, j1] = 0
            rho[i, j1] = 0
            rho[i1, j] = 0
    return rho


@njit(cache=True)
def prob_zero(rho, k, n):
    m = 1 << (n - 1 - k)
    total = 0.0
    for i in range(rho.shape[0]):
        if not i & m:
            total += rho[i, i].real
    return total


@njit(cache=True)
def project(rho, k, n, bit, prob):
    dim = rho.shape[0]
    m = 1 << (n - 1 - k)
    want = m if bit else 0
    scale = 1.0 / prob
    for i in range(dim):
        for j in range(dim):
            if (i & m) == want and (j & m) == want:
                rho[i, j] *= scale
            else:
                rho[i, j] = 0
    return rho
