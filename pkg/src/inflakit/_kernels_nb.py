"""Numba-compiled twins of the kernels in `_kernels_np`.

Scalar inner loops over paths and steps; same argument conventions and
the same per-element arithmetic as the numpy backend.  Importing this
module requires numba; `inflakit.kernels` falls back to the numpy
backend when it is unavailable or disabled.
"""

import math

import numpy as np
from numba import njit

SCHEME_EXACT = 0
SCHEME_EULER = 1
SCHEME_MILSTEIN = 2


@njit(cache=True)
def gbm_paths(x0, mu, sigma, dt, z, scheme):
    n_paths, n_steps = z.shape
    out = np.empty((n_paths, n_steps + 1))
    sqdt = math.sqrt(dt)
    drift = (mu - 0.5 * sigma * sigma) * dt
    half_ss = 0.5 * sigma * sigma
    for p in range(n_paths):
        x = x0
        out[p, 0] = x
        for s in range(n_steps):
            if scheme == SCHEME_EXACT:
                x = x * math.exp(drift + sigma * sqdt * z[p, s])
            elif scheme == SCHEME_EULER:
                x = x + mu * x * dt + sigma * x * sqdt * z[p, s]
            else:
                dw = sqdt * z[p, s]
                x = x + mu * x * dt + sigma * x * dw + half_ss * x * (dw * dw - dt)
            out[p, s + 1] = x
    return out


@njit(cache=True)
def cir_paths(x0, theta1, theta2, theta3, dt, z):
    n_paths, n_steps = z.shape
    out = np.empty((n_paths, n_steps + 1))
    sqdt = math.sqrt(dt)
    for p in range(n_paths):
        x = x0
        out[p, 0] = x
        for s in range(n_steps):
            x1 = x + (theta1 - theta2 * x) * dt + theta3 * math.sqrt(x) * sqdt * z[p, s]
            x = max(x1, 0.0)
            out[p, s + 1] = x
    return out


@njit(cache=True)
def ou_exact_paths(r0, decay, theta_means, noise_scale, z):
    n_paths, n_steps = z.shape
    out = np.empty((n_paths, n_steps + 1))
    for p in range(n_paths):
        r = r0
        out[p, 0] = r
        for s in range(n_steps):
            r = decay * r + theta_means[s] + noise_scale * z[p, s]
            out[p, s + 1] = r
    return out


@njit(cache=True)
def jy_exact_paths(rn0, rr0, i0, dt, decay_n, decay_r, theta_n, theta_r,
                   gain_n, gain_r, sigma_i, zc):
    n_paths, n_steps, _ = zc.shape
    rn = np.empty((n_paths, n_steps + 1))
    rr = np.empty((n_paths, n_steps + 1))
    li = np.empty((n_paths, n_steps + 1))
    sqdt = math.sqrt(dt)
    half = 0.5 * dt
    ito = 0.5 * sigma_i * sigma_i * dt
    log_i0 = math.log(i0)
    for p in range(n_paths):
        x_n = rn0
        x_r = rr0
        x_l = log_i0
        rn[p, 0] = x_n
        rr[p, 0] = x_r
        li[p, 0] = x_l
        for s in range(n_steps):
            rn1 = decay_n * x_n + theta_n[s] + gain_n * zc[p, s, 0]
            rr1 = decay_r * x_r + theta_r[s] + gain_r * zc[p, s, 1]
            x_l = x_l + half * ((x_n + rn1) - (x_r + rr1)) - ito + sigma_i * sqdt * zc[p, s, 2]
            x_n = rn1
            x_r = rr1
            rn[p, s + 1] = x_n
            rr[p, s + 1] = x_r
            li[p, s + 1] = x_l
    return rn, rr, np.exp(li)


@njit(cache=True)
def jy_euler_paths(rn0, rr0, i0, dt, a_n, a_r, sigma_n, sigma_r, sigma_i,
                   drift_adj_r, theta_n_vals, theta_r_vals, zc):
    n_paths, n_steps, _ = zc.shape
    rn = np.empty((n_paths, n_steps + 1))
    rr = np.empty((n_paths, n_steps + 1))
    li = np.empty((n_paths, n_steps + 1))
    sqdt = math.sqrt(dt)
    ito = 0.5 * sigma_i * sigma_i * dt
    log_i0 = math.log(i0)
    for p in range(n_paths):
        x_n = rn0
        x_r = rr0
        x_l = log_i0
        rn[p, 0] = x_n
        rr[p, 0] = x_r
        li[p, 0] = x_l
        for s in range(n_steps):
            x_l = x_l + (x_n - x_r) * dt - ito + sigma_i * sqdt * zc[p, s, 2]
            x_n = x_n + (theta_n_vals[s] - a_n * x_n) * dt + sigma_n * sqdt * zc[p, s, 0]
            x_r = (
                x_r + (theta_r_vals[s] - a_r * x_r - drift_adj_r) * dt
                + sigma_r * sqdt * zc[p, s, 1]
            )
            rn[p, s + 1] = x_n
            rr[p, s + 1] = x_r
            li[p, s + 1] = x_l
    return rn, rr, np.exp(li)


@njit(cache=True)
def exp_martingale_paths(a0, sigma, dt, z):
    n_paths, n_steps = z.shape
    out = np.empty((n_paths, n_steps + 1))
    drift = -0.5 * sigma * sigma * dt
    sqdt = math.sqrt(dt)
    for p in range(n_paths):
        a = a0
        out[p, 0] = a
        for s in range(n_steps):
            a = a * math.exp(drift + sigma * sqdt * z[p, s])
            out[p, s + 1] = a
    return out


@njit(cache=True)
def binomial_backward(terminal, q, discount):
    n = len(terminal) - 1
    values = terminal.copy()
    for level in range(n, 0, -1):
        for j in range(level):
            values[j] = discount * (q * values[j + 1] + (1.0 - q) * values[j])
    return values[0]


@njit(cache=True)
def ho_lee_forward_induction(targets, sigma, dt, r0):
    n = len(targets)
    m = np.empty(n)
    m[0] = r0
    q = np.zeros((n, n))
    q[0, 0] = 1.0
    sq = sigma * math.sqrt(dt)
    spread = sq * dt
    for k in range(n - 1):
        disc = np.empty(k + 1)
        for j in range(k + 1):
            disc[j] = math.exp(-(m[k] + sq * (2.0 * j - k)) * dt)
        for j in range(k + 2):
            acc = 0.0
            if j >= 1:
                acc += 0.5 * q[k, j - 1] * disc[j - 1]
            if j <= k:
                acc += 0.5 * q[k, j] * disc[j]
            q[k + 1, j] = acc
        tilt = 0.0
        for j in range(k + 2):
            tilt += q[k + 1, j] * math.exp(-spread * (2.0 * j - (k + 1)))
        m[k + 1] = math.log(tilt / targets[k + 1]) / dt
    return m, q
