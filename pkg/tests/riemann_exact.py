"""Exact Riemann solver for the 1D ideal-gas Euler equations.

Independent reference used to judge shock-tube results.  Standard
iterative solution for the star-region pressure (Newton on the
pressure function with two-rarefaction initial guess), then sampling
of the self-similar solution at x/t.
"""
import numpy as np


def _pressure_function(p, rho_k, p_k, gamma):
    """f_K(p) and its derivative for one side of the discontinuity."""
    a_k = np.sqrt(gamma * p_k / rho_k)
    if p > p_k:  # shock
        A = 2.0 / ((gamma + 1.0) * rho_k)
        B = (gamma - 1.0) / (gamma + 1.0) * p_k
        sq = np.sqrt(A / (p + B))
        f = (p - p_k) * sq
        df = sq * (1.0 - 0.5 * (p - p_k) / (p + B))
    else:  # rarefaction
        f = 2.0 * a_k / (gamma - 1.0) * ((p / p_k) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)
        df = (p / p_k) ** (-(gamma + 1.0) / (2.0 * gamma)) / (rho_k * a_k)
    return f, df


def star_state(rho_l, u_l, p_l, rho_r, u_r, p_r, gamma, tol=1e-14):
    """Pressure and velocity in the star region."""
    a_l = np.sqrt(gamma * p_l / rho_l)
    a_r = np.sqrt(gamma * p_r / rho_r)
    # two-rarefaction guess, clipped away from zero
    z = (gamma - 1.0) / (2.0 * gamma)
    p = ((a_l + a_r - 0.5 * (gamma - 1.0) * (u_r - u_l))
         / (a_l / p_l**z + a_r / p_r**z)) ** (1.0 / z)
    p = max(p, 1e-12)
    for _ in range(100):
        f_l, df_l = _pressure_function(p, rho_l, p_l, gamma)
        f_r, df_r = _pressure_function(p, rho_r, p_r, gamma)
        dp = (f_l + f_r + (u_r - u_l)) / (df_l + df_r)
        p_new = max(p - dp, 1e-12)
        if abs(p_new - p) <= tol * p:
            p = p_new
            break
        p = p_new
    f_l, _ = _pressure_function(p, rho_l, p_l, gamma)
    f_r, _ = _pressure_function(p, rho_r, p_r, gamma)
    u = 0.5 * (u_l + u_r) + 0.5 * (f_r - f_l)
    return p, u


def sample(xi, rho_l, u_l, p_l, rho_r, u_r, p_r, gamma):
    """Exact solution (rho, u, p) at similarity coordinates xi = x/t."""
    xi = np.asarray(xi, dtype=float)
    p_star, u_star = star_state(rho_l, u_l, p_l, rho_r, u_r, p_r, gamma)
    a_l = np.sqrt(gamma * p_l / rho_l)
    a_r = np.sqrt(gamma * p_r / rho_r)
    gm1, gp1 = gamma - 1.0, gamma + 1.0

    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    left = xi <= u_star
    right = ~left

    # ---- left side of the contact ----
    if p_star > p_l:  # left shock
        rho_star_l = rho_l * (p_star / p_l + gm1 / gp1) / (gm1 / gp1 * p_star / p_l + 1.0)
        s_l = u_l - a_l * np.sqrt(gp1 / (2.0 * gamma) * p_star / p_l + gm1 / (2.0 * gamma))
        pre = left & (xi < s_l)
        post = left & ~pre
        rho[pre], u[pre], p[pre] = rho_l, u_l, p_l
        rho[post], u[post], p[post] = rho_star_l, u_star, p_star
    else:  # left rarefaction
        rho_star_l = rho_l * (p_star / p_l) ** (1.0 / gamma)
        a_star_l = a_l * (p_star / p_l) ** (gm1 / (2.0 * gamma))
        head, tail = u_l - a_l, u_star - a_star_l
        pre = left & (xi < head)
        fan = left & (xi >= head) & (xi <= tail)
        post = left & (xi > tail)
        rho[pre], u[pre], p[pre] = rho_l, u_l, p_l
        rho[post], u[post], p[post] = rho_star_l, u_star, p_star
        frac = (2.0 / gp1 + gm1 / (gp1 * a_l) * (u_l - xi[fan]))
        rho[fan] = rho_l * frac ** (2.0 / gm1)
        u[fan] = 2.0 / gp1 * (a_l + 0.5 * gm1 * u_l + xi[fan])
        p[fan] = p_l * frac ** (2.0 * gamma / gm1)

    # ---- right side of the contact ----
    if p_star > p_r:  # right shock
        rho_star_r = rho_r * (p_star / p_r + gm1 / gp1) / (gm1 / gp1 * p_star / p_r + 1.0)
        s_r = u_r + a_r * np.sqrt(gp1 / (2.0 * gamma) * p_star / p_r + gm1 / (2.0 * gamma))
        pre = right & (xi > s_r)
        post = right & ~pre
        rho[pre], u[pre], p[pre] = rho_r, u_r, p_r
        rho[post], u[post], p[post] = rho_star_r, u_star, p_star
    else:  # right rarefaction
        rho_star_r = rho_r * (p_star / p_r) ** (1.0 / gamma)
        a_star_r = a_r * (p_star / p_r) ** (gm1 / (2.0 * gamma))
        head, tail = u_r + a_r, u_star + a_star_r
        pre = right & (xi > head)
        fan = right & (xi >= tail) & (xi <= head)
        post = right & (xi < tail)
        rho[pre], u[pre], p[pre] = rho_r, u_r, p_r
        rho[post], u[post], p[post] = rho_star_r, u_star, p_star
        frac = (2.0 / gp1 - gm1 / (gp1 * a_r) * (u_r - xi[fan]))
        rho[fan] = rho_r * frac ** (2.0 / gm1)
        u[fan] = 2.0 / gp1 * (-a_r + 0.5 * gm1 * u_r + xi[fan])
        p[fan] = p_r * frac ** (2.0 * gamma / gm1)

    return rho, u, p


def sod_exact(x, t, x0=0.5, gamma=1.4):
    """Exact Sod solution on cell centers x at time t."""
    return sample((np.asarray(x) - x0) / t, 1.0, 0.0, 1.0, 0.125, 0.0, 0.1, gamma)
