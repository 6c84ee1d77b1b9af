"""Pure-Python (numpy) implementations of the hot inner loops.

These are the reference kernels; `cykernels` is the compiled drop-in
replacement.  Both must produce bit-comparable results (same order of
floating-point operations is not guaranteed, but agreement is asserted to
tight tolerances in the test suite).
"""

import numpy as np

BACKEND = "python"


def frac_conv(conv_weights, boundary_weights, data):
    """Causal weighted prefix sums: out[n] = sum_j c[n-j]*f[j] + d[n]*f[0].

    Weights and data are complex.  Direct O(N^2) evaluation.
    """
    conv_weights = np.ascontiguousarray(conv_weights, dtype=np.complex128)
    data = np.ascontiguousarray(data, dtype=np.complex128)
    n = data.size
    out = np.convolve(data, conv_weights)[:n]
    out += np.asarray(boundary_weights, dtype=np.complex128) * data[0]
    return out


def rk4_companion(coeffs_ascending, u, h, substeps):
    """Classical RK4 over a companion-form linear system driven by `u`.

    `coeffs_ascending` are the characteristic polynomial coefficients
    a_0..a_{n-1} (leading coefficient 1 implied); the state transition is
    dz[k] = z[k+1] for k < n-1 and dz[n-1] = u - sum_k a[k] z[k].  The input
    is interpolated linearly between samples.  Returns the first state
    sampled on the input grid and the largest state magnitude encountered.
    """
    a = np.ascontiguousarray(coeffs_ascending, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.float64)
    n = a.size
    nsamp = u.size
    sub = int(substeps)
    hh = h / sub

    def deriv(z, uval):
        dz = np.empty_like(z)
        dz[:-1] = z[1:]
        dz[-1] = uval - a @ z
        return dz

    z = np.zeros(n)
    q = np.empty(nsamp)
    q[0] = 0.0
    max_norm = 0.0
    for i in range(nsamp - 1):
        u0 = u[i]
        du = u[i + 1] - u0
        for j in range(sub):
            ua = u0 + du * (j / sub)
            um = u0 + du * ((j + 0.5) / sub)
            ub = u0 + du * ((j + 1) / sub)
            k1 = deriv(z, ua)
            k2 = deriv(z + 0.5 * hh * k1, um)
            k3 = deriv(z + 0.5 * hh * k2, um)
            k4 = deriv(z + hh * k3, ub)
            z = z + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            norm = np.max(np.abs(z))
            if norm > max_norm:
                max_norm = norm
        q[i + 1] = z[0]
    return q, max_norm
