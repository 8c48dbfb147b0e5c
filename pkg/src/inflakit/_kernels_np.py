"""Pure-numpy implementations of the hot path-simulation loops.

These are the fallback backend; `inflakit._kernels_nb` compiles the same
routines with numba.  Every function loops over time steps and vectorizes
across paths so both backends perform the identical arithmetic per
element (agreement is covered by tests).

Conventions shared by both backends:
  * ``z`` arrays hold standard normal draws, shape (n_paths, n_steps) or
    (n_paths, n_steps, n_factors); correlation is applied by the caller.
  * outputs include the initial state, shape (n_paths, n_steps + 1).
"""

import numpy as np

SCHEME_EXACT = 0
SCHEME_EULER = 1
SCHEME_MILSTEIN = 2


def gbm_paths(x0, mu, sigma, dt, z, scheme):
    n_paths, n_steps = z.shape
    out = np.empty((n_paths, n_steps + 1))
    out[:, 0] = x0
    sqdt = np.sqrt(dt)
    if scheme == SCHEME_EXACT:
        drift = (mu - 0.5 * sigma * sigma) * dt
        for s in range(n_steps):
            out[:, s + 1] = out[:, s] * np.exp(drift + sigma * sqdt * z[:, s])
    elif scheme == SCHEME_EULER:
        for s in range(n_steps):
            x = out[:, s]
            out[:, s + 1] = x + mu * x * dt + sigma * x * sqdt * z[:, s]
    else:
        half_ss = 0.5 * sigma * sigma
        for s in range(n_steps):
            x = out[:, s]
            dw = sqdt * z[:, s]
            out[:, s + 1] = (
                x + mu * x * dt + sigma * x * dw + half_ss * x * (dw * dw - dt)
            )
    return out


def cir_paths(x0, theta1, theta2, theta3, dt, z):
    # Euler with truncated coefficients; the reported state is clamped at
    # zero so the square root below never sees a negative argument.
    n_paths, n_steps = z.shape
    out = np.empty((n_paths, n_steps + 1))
    out[:, 0] = x0
    sqdt = np.sqrt(dt)
    for s in range(n_steps):
        x = out[:, s]
        x1 = x + (theta1 - theta2 * x) * dt + theta3 * np.sqrt(x) * sqdt * z[:, s]
        out[:, s + 1] = np.maximum(x1, 0.0)
    return out


def ou_exact_paths(r0, decay, theta_means, noise_scale, z):
    # r' = decay r + theta_means[s] + noise_scale * z; exact Gaussian stepping
    n_paths, n_steps = z.shape
    out = np.empty((n_paths, n_steps + 1))
    out[:, 0] = r0
    for s in range(n_steps):
        out[:, s + 1] = decay * out[:, s] + theta_means[s] + noise_scale * z[:, s]
    return out


def jy_exact_paths(rn0, rr0, i0, dt, decay_n, decay_r, theta_n, theta_r,
                   gain_n, gain_r, sigma_i, zc):
    """Exact-transition stepping of the three-factor model.

    ``zc`` holds correlated standard normals, shape (n_paths, n_steps, 3)
    ordered (nominal, real, index).  The index leg compounds lognormally
    with the trapezoid of the simulated rate gap over each step.
    """
    n_paths, n_steps, _ = zc.shape
    rn = np.empty((n_paths, n_steps + 1))
    rr = np.empty((n_paths, n_steps + 1))
    li = np.empty((n_paths, n_steps + 1))
    rn[:, 0] = rn0
    rr[:, 0] = rr0
    li[:, 0] = np.log(i0)
    sqdt = np.sqrt(dt)
    half = 0.5 * dt
    ito = 0.5 * sigma_i * sigma_i * dt
    for s in range(n_steps):
        rn1 = decay_n * rn[:, s] + theta_n[s] + gain_n * zc[:, s, 0]
        rr1 = decay_r * rr[:, s] + theta_r[s] + gain_r * zc[:, s, 1]
        li[:, s + 1] = (
            li[:, s]
            + half * ((rn[:, s] + rn1) - (rr[:, s] + rr1))
            - ito
            + sigma_i * sqdt * zc[:, s, 2]
        )
        rn[:, s + 1] = rn1
        rr[:, s + 1] = rr1
    return rn, rr, np.exp(li)


def jy_euler_paths(rn0, rr0, i0, dt, a_n, a_r, sigma_n, sigma_r, sigma_i,
                   drift_adj_r, theta_n_vals, theta_r_vals, zc):
    """First-order stepping of the same system; the index leg is log-Euler."""
    n_paths, n_steps, _ = zc.shape
    rn = np.empty((n_paths, n_steps + 1))
    rr = np.empty((n_paths, n_steps + 1))
    li = np.empty((n_paths, n_steps + 1))
    rn[:, 0] = rn0
    rr[:, 0] = rr0
    li[:, 0] = np.log(i0)
    sqdt = np.sqrt(dt)
    ito = 0.5 * sigma_i * sigma_i * dt
    for s in range(n_steps):
        x_n = rn[:, s]
        x_r = rr[:, s]
        li[:, s + 1] = li[:, s] + (x_n - x_r) * dt - ito + sigma_i * sqdt * zc[:, s, 2]
        rn[:, s + 1] = x_n + (theta_n_vals[s] - a_n * x_n) * dt + sigma_n * sqdt * zc[:, s, 0]
        rr[:, s + 1] = (
            x_r + (theta_r_vals[s] - a_r * x_r - drift_adj_r) * dt
            + sigma_r * sqdt * zc[:, s, 1]
        )
    return rn, rr, np.exp(li)


def exp_martingale_paths(a0, sigma, dt, z):
    n_paths, n_steps = z.shape
    out = np.empty((n_paths, n_steps + 1))
    out[:, 0] = a0
    drift = -0.5 * sigma * sigma * dt
    sqdt = np.sqrt(dt)
    for s in range(n_steps):
        out[:, s + 1] = out[:, s] * np.exp(drift + sigma * sqdt * z[:, s])
    return out


def binomial_backward(terminal, q, discount):
    values = terminal.copy()
    n = len(terminal) - 1
    for level in range(n, 0, -1):
        values = discount * (q * values[1 : level + 1] + (1.0 - q) * values[:level])
    return float(values[0])


def ho_lee_forward_induction(targets, sigma, dt, r0):
    """Calibrate level rates by Arrow-Debreu forward induction.

    ``targets[k]`` is the input discount factor P(0, (k+1) dt).  Returns
    the per-level central rates ``m`` (m[0] = r0) and the Arrow-Debreu
    state prices, with Q[k, j] the price of a unit payoff at node (k, j).
    """
    n = len(targets)
    m = np.empty(n)
    m[0] = r0
    q = np.zeros((n, n))
    q[0, 0] = 1.0
    spread = sigma * np.sqrt(dt) * dt
    for k in range(n - 1):
        disc = np.empty(k + 1)
        for j in range(k + 1):
            disc[j] = np.exp(-(m[k] + sigma * np.sqrt(dt) * (2.0 * j - k)) * dt)
        for j in range(k + 2):
            acc = 0.0
            if j >= 1:
                acc += 0.5 * q[k, j - 1] * disc[j - 1]
            if j <= k:
                acc += 0.5 * q[k, j] * disc[j]
            q[k + 1, j] = acc
        tilt = 0.0
        for j in range(k + 2):
            tilt += q[k + 1, j] * np.exp(-spread * (2.0 * j - (k + 1)))
        m[k + 1] = np.log(tilt / targets[k + 1]) / dt
    return m, q
