"""Independent reference computations used as oracles.

Nothing here touches the library's integrator or kernel assembly; the
point is to have a second route to the same numbers.
"""

import numpy as np


def rk4_reference(p, lam, length, n_per_segment=6000):
    """Endpoint state (y1, y1', y2, y2') by fixed-step RK4, segment by segment.

    Breakpoints are step boundaries, so each step sees a smooth potential.
    Evaluation backs off the right edge of a segment by 1e-12 to stay on
    the segment's own piece.
    """
    edges = [float(b) for b in p.breakpoints if 1e-14 < b < length - 1e-14]
    edges = [0.0, *edges, float(length)]
    y = np.array([1.0, 0.0, 0.0, 1.0])

    for t0, t1 in zip(edges, edges[1:]):
        n = n_per_segment
        h = (t1 - t0) / n
        back = t1 - 1e-12

        def f(t, z):
            q = p.eval(min(t, back)) + lam
            return np.array([z[1], -q * z[0], z[3], -q * z[2]])

        t = t0
        for _ in range(n):
            k1 = f(t, y)
            k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = f(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
    return y


def shooting_dirichlet(p, lam, sigma, length, n=4000):
    """Dirichlet solution of u'' + (a + lam) u = sigma by shooting.

    Integrates the inhomogeneous equation with u(0)=0 for two initial
    slopes and combines them linearly to hit u(L)=0. RK4 on a fine fixed
    grid; returns (ts, us).
    """
    ts = np.linspace(0.0, length, n + 1)
    h = length / n

    def rhs(t, z, s):
        q = p.eval(min(t, length - 1e-12)) + lam
        return np.array([z[1], -q * z[0] + s])

    def integrate(slope, forced):
        z = np.array([0.0, slope])
        out = [z[0]]
        for i in range(n):
            t = ts[i]

            def F(tt, zz):
                s = sigma(tt) if forced else 0.0
                return rhs(tt, zz, s)

            k1 = F(t, z)
            k2 = F(t + 0.5 * h, z + 0.5 * h * k1)
            k3 = F(t + 0.5 * h, z + 0.5 * h * k2)
            k4 = F(t + h, z + h * k3)
            z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out.append(z[0])
        return np.array(out)

    u_part = integrate(0.0, True)     # particular, u(0)=u'(0)=0
    u_hom = integrate(1.0, False)     # homogeneous, u(0)=0, u'(0)=1
    if abs(u_hom[-1]) < 1e-13:
        raise ZeroDivisionError("shooting hit a Dirichlet eigenvalue")
    c = -u_part[-1] / u_hom[-1]
    return ts, u_part + c * u_hom
