# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: monodromy propagation and Hamiltonian RK4 flows.

Mirrors the API of `_pure`; selected at import time by `spectral_poisson._kernels`.
"""
from libc.math cimport exp, fabs

import numpy as np

BACKEND = "compiled"


def monodromy_propagate(const double[::1] u_half, double complex z, double h, Py_ssize_t n_steps):
    """Transfer matrix of -y'' + u y = z y over one period (classical RK4).

    `u_half`: potential on the half-step grid, 2*n_steps + 1 values.
    Returns (T11, T12, T21, T22).
    """
    cdef double complex y1 = 1, d1 = 0, y2 = 0, d2 = 1
    cdef double complex c0, cm, c1
    cdef double complex k1y, k1d, k2y, k2d, k3y, k3d, k4y, k4d
    cdef double h2 = 0.5 * h, h6 = h / 6.0
    cdef Py_ssize_t i
    for i in range(n_steps):
        c0 = u_half[2 * i] - z
        cm = u_half[2 * i + 1] - z
        c1 = u_half[2 * i + 2] - z

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


cdef void _peakon_rhs(double* x, double* p, double* xdot, double* pdot, Py_ssize_t n) noexcept:
    cdef Py_ssize_t i, j
    cdef double xi, sx, sp, e
    for i in range(n):
        xi = x[i]
        sx = 0.0
        sp = 0.0
        for j in range(n):
            e = exp(-fabs(xi - x[j]))
            sx += p[j] * e
            if xi > x[j]:
                sp += p[j] * e
            elif xi < x[j]:
                sp -= p[j] * e
        xdot[i] = sx
        pdot[i] = p[i] * sp


def peakon_flow_steps(const double[::1] x0, const double[::1] p0, double dt, Py_ssize_t n_steps,
                      Py_ssize_t sample_every, double gap_tol):
    """RK4 peakon flow; see `_pure.peakon_flow_steps`."""
    cdef Py_ssize_t n = x0.shape[0]
    cdef Py_ssize_t n_samples = n_steps // sample_every + 2
    xs_arr = np.empty((n_samples, n), dtype=np.float64)
    ps_arr = np.empty((n_samples, n), dtype=np.float64)
    cdef double[:, ::1] xs = xs_arr
    cdef double[:, ::1] ps = ps_arr
    work = np.empty(12 * n, dtype=np.float64)
    cdef double[::1] w = work
    cdef double* x = &w[0]
    cdef double* p = &w[n]
    cdef double* ax = &w[2 * n]
    cdef double* ap = &w[3 * n]
    cdef double* k1x = &w[4 * n]
    cdef double* k1p = &w[5 * n]
    cdef double* k2x = &w[6 * n]
    cdef double* k2p = &w[7 * n]
    cdef double* k3x = &w[8 * n]
    cdef double* k3p = &w[9 * n]
    cdef double* k4x = &w[10 * n]
    cdef double* k4p = &w[11 * n]
    cdef Py_ssize_t i, step, row = 0, done = 0
    cdef bint collided = False
    for i in range(n):
        x[i] = x0[i]
        p[i] = p0[i]
        xs[0, i] = x[i]
        ps[0, i] = p[i]
    row = 1
    for step in range(1, n_steps + 1):
        _peakon_rhs(x, p, k1x, k1p, n)
        for i in range(n):
            ax[i] = x[i] + 0.5 * dt * k1x[i]
            ap[i] = p[i] + 0.5 * dt * k1p[i]
        _peakon_rhs(ax, ap, k2x, k2p, n)
        for i in range(n):
            ax[i] = x[i] + 0.5 * dt * k2x[i]
            ap[i] = p[i] + 0.5 * dt * k2p[i]
        _peakon_rhs(ax, ap, k3x, k3p, n)
        for i in range(n):
            ax[i] = x[i] + dt * k3x[i]
            ap[i] = p[i] + dt * k3p[i]
        _peakon_rhs(ax, ap, k4x, k4p, n)
        for i in range(n):
            x[i] += dt / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i])
            p[i] += dt / 6.0 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i])
        done = step
        for i in range(n - 1):
            if x[i + 1] - x[i] < gap_tol:
                collided = True
                break
        if collided:
            for i in range(n):
                xs[row, i] = x[i]
                ps[row, i] = p[i]
            row += 1
            break
        if step % sample_every == 0:
            for i in range(n):
                xs[row, i] = x[i]
                ps[row, i] = p[i]
            row += 1
    return xs_arr[:row], ps_arr[:row], done, collided


cdef void _toda_rhs(double* q, double* p, double* qdot, double* pdot, Py_ssize_t n) noexcept:
    cdef Py_ssize_t k
    cdef double e
    for k in range(n):
        qdot[k] = p[k]
        pdot[k] = 0.0
    for k in range(n - 1):
        e = exp(q[k] - q[k + 1])
        pdot[k] -= e
        pdot[k + 1] += e


def toda_flow_steps(const double[::1] q0, const double[::1] p0, double dt, Py_ssize_t n_steps,
                    Py_ssize_t sample_every):
    """RK4 open Toda flow; see `_pure.toda_flow_steps`."""
    cdef Py_ssize_t n = q0.shape[0]
    cdef Py_ssize_t n_samples = n_steps // sample_every + 2
    qs_arr = np.empty((n_samples, n), dtype=np.float64)
    ps_arr = np.empty((n_samples, n), dtype=np.float64)
    cdef double[:, ::1] qs = qs_arr
    cdef double[:, ::1] ps = ps_arr
    work = np.empty(12 * n, dtype=np.float64)
    cdef double[::1] w = work
    cdef double* q = &w[0]
    cdef double* p = &w[n]
    cdef double* aq = &w[2 * n]
    cdef double* ap = &w[3 * n]
    cdef double* k1q = &w[4 * n]
    cdef double* k1p = &w[5 * n]
    cdef double* k2q = &w[6 * n]
    cdef double* k2p = &w[7 * n]
    cdef double* k3q = &w[8 * n]
    cdef double* k3p = &w[9 * n]
    cdef double* k4q = &w[10 * n]
    cdef double* k4p = &w[11 * n]
    cdef Py_ssize_t i, step, row
    for i in range(n):
        q[i] = q0[i]
        p[i] = p0[i]
        qs[0, i] = q[i]
        ps[0, i] = p[i]
    row = 1
    for step in range(1, n_steps + 1):
        _toda_rhs(q, p, k1q, k1p, n)
        for i in range(n):
            aq[i] = q[i] + 0.5 * dt * k1q[i]
            ap[i] = p[i] + 0.5 * dt * k1p[i]
        _toda_rhs(aq, ap, k2q, k2p, n)
        for i in range(n):
            aq[i] = q[i] + 0.5 * dt * k2q[i]
            ap[i] = p[i] + 0.5 * dt * k2p[i]
        _toda_rhs(aq, ap, k3q, k3p, n)
        for i in range(n):
            aq[i] = q[i] + dt * k3q[i]
            ap[i] = p[i] + dt * k3p[i]
        _toda_rhs(aq, ap, k4q, k4p, n)
        for i in range(n):
            q[i] += dt / 6.0 * (k1q[i] + 2 * k2q[i] + 2 * k3q[i] + k4q[i])
            p[i] += dt / 6.0 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i])
        if step % sample_every == 0:
            for i in range(n):
                qs[row, i] = q[i]
                ps[row, i] = p[i]
            row += 1
    return qs_arr[:row], ps_arr[:row]
