"""Pure-Python reference kernels.

Same call signatures as the compiled module `_core`; scalar arithmetic is
used in the hot loops so the fallback stays usable when no C compiler is
around (roughly two orders of magnitude slower than the extension).
"""
import math

import numpy as np

BACKEND = "pure"


def monodromy_propagate(u_half, z, h, n_steps):
    """Propagate the 2x2 transfer matrix of -y'' + u y = z y over one period.

    `u_half` holds the potential on the half-step grid (2*n_steps + 1 values);
    classical RK4 on the first-order system (y, y').  Returns the four entries
    (T11, T12, T21, T22) with columns the solutions for (y,y')(0)=(1,0),(0,1).
    """
    z = complex(z)
    y1, d1 = 1.0 + 0.0j, 0.0 + 0.0j
    y2, d2 = 0.0 + 0.0j, 1.0 + 0.0j
    h2 = 0.5 * h
    h6 = h / 6.0
    for i in range(n_steps):
        u0 = u_half[2 * i]
        um = u_half[2 * i + 1]
        u1 = u_half[2 * i + 2]
        c0 = u0 - z
        cm = um - z
        c1 = u1 - z

        k1y = d1
        k1d = c0 * y1
        k2y = d1 + h2 * k1d
        k2d = cm * (y1 + h2 * k1y)
        k3y = d1 + h2 * k2d
        k3d = cm * (y1 + h2 * k2y)
        k4y = d1 + h * k3d
        k4d = c1 * (y1 + h * k3y)
        y1 = y1 + h6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        d1 = d1 + h6 * (k1d + 2 * k2d + 2 * k3d + k4d)

        k1y = d2
        k1d = c0 * y2
        k2y = d2 + h2 * k1d
        k2d = cm * (y2 + h2 * k1y)
        k3y = d2 + h2 * k2d
        k3d = cm * (y2 + h2 * k2y)
        k4y = d2 + h * k3d
        k4d = c1 * (y2 + h * k3y)
        y2 = y2 + h6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        d2 = d2 + h6 * (k1d + 2 * k2d + 2 * k3d + k4d)
    return y1, y2, d1, d2


def _peakon_rhs(x, p, n):
    xdot = [0.0] * n
    pdot = [0.0] * n
    for i in range(n):
        xi = x[i]
        sx = 0.0
        sp = 0.0
        for j in range(n):
            e = math.exp(-abs(xi - x[j]))
            sx += p[j] * e
            if xi > x[j]:
                sp += p[j] * e
            elif xi < x[j]:
                sp -= p[j] * e
        xdot[i] = sx
        pdot[i] = p[i] * sp
    return xdot, pdot


def peakon_flow_steps(x0, p0, dt, n_steps, sample_every, gap_tol):
    """RK4 peakon flow; samples every `sample_every` steps.

    Returns (xs, ps, n_done, collided) where xs/ps have one row per stored
    sample (the initial state included) and `collided` flags a gap below
    `gap_tol` at the step where integration stopped.
    """
    n = len(x0)
    x = [float(v) for v in x0]
    p = [float(v) for v in p0]
    xs = [list(x)]
    ps = [list(p)]
    collided = False
    done = 0
    for step in range(1, n_steps + 1):
        k1x, k1p = _peakon_rhs(x, p, n)
        ax = [x[i] + 0.5 * dt * k1x[i] for i in range(n)]
        ap = [p[i] + 0.5 * dt * k1p[i] for i in range(n)]
        k2x, k2p = _peakon_rhs(ax, ap, n)
        bx = [x[i] + 0.5 * dt * k2x[i] for i in range(n)]
        bp = [p[i] + 0.5 * dt * k2p[i] for i in range(n)]
        k3x, k3p = _peakon_rhs(bx, bp, n)
        cx = [x[i] + dt * k3x[i] for i in range(n)]
        cp = [p[i] + dt * k3p[i] for i in range(n)]
        k4x, k4p = _peakon_rhs(cx, cp, n)
        for i in range(n):
            x[i] += dt / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i])
            p[i] += dt / 6.0 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i])
        done = step
        if any(x[i + 1] - x[i] < gap_tol for i in range(n - 1)):
            collided = True
            xs.append(list(x))
            ps.append(list(p))
            break
        if step % sample_every == 0:
            xs.append(list(x))
            ps.append(list(p))
    return np.asarray(xs), np.asarray(ps), done, collided


def _toda_rhs(q, p, n):
    qdot = list(p)
    pdot = [0.0] * n
    for k in range(n - 1):
        e = math.exp(q[k] - q[k + 1])
        pdot[k] -= e
        pdot[k + 1] += e
    return qdot, pdot


def toda_flow_steps(q0, p0, dt, n_steps, sample_every):
    """RK4 open Toda flow with free ends (q_{-1} = -inf, q_N = +inf)."""
    n = len(q0)
    q = [float(v) for v in q0]
    p = [float(v) for v in p0]
    qs = [list(q)]
    ps = [list(p)]
    for step in range(1, n_steps + 1):
        k1q, k1p = _toda_rhs(q, p, n)
        aq = [q[i] + 0.5 * dt * k1q[i] for i in range(n)]
        ap = [p[i] + 0.5 * dt * k1p[i] for i in range(n)]
        k2q, k2p = _toda_rhs(aq, ap, n)
        bq = [q[i] + 0.5 * dt * k2q[i] for i in range(n)]
        bp = [p[i] + 0.5 * dt * k2p[i] for i in range(n)]
        k3q, k3p = _toda_rhs(bq, bp, n)
        cq = [q[i] + dt * k3q[i] for i in range(n)]
        cp = [p[i] + dt * k3p[i] for i in range(n)]
        k4q, k4p = _toda_rhs(cq, cp, n)
        for i in range(n):
            q[i] += dt / 6.0 * (k1q[i] + 2 * k2q[i] + 2 * k3q[i] + k4q[i])
            p[i] += dt / 6.0 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i])
        if step % sample_every == 0:
            qs.append(list(q))
            ps.append(list(p))
    return np.asarray(qs), np.asarray(ps)
