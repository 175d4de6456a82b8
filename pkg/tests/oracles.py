"""Independent oracles used by the test suite.

Everything here avoids the library's own code paths: perimeter by 1-D
quadrature, derivatives by central differences, support values by brute
mesh maximization.
"""

import numpy as np
from scipy.integrate import quad


def ellipse_perimeter(a: float, b: float) -> float:
    """Perimeter of the axis-aligned ellipse with semi-axes a, b."""
    val, _ = quad(
        lambda t: np.hypot(a * np.sin(t), b * np.cos(t)),
        0.0,
        np.pi / 2.0,
        epsabs=1e-13,
        epsrel=1e-13,
    )
    return 4.0 * val


def fd_gradient(f, x, h=1e-6):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def fd_hessian(grad, x, h=1e-6):
    """Central-difference Jacobian of a vector function (Hessian when the
    function is a gradient)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    H = np.zeros((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        H[i] = (grad(x + e) - grad(x - e)) / (2.0 * h)
    return 0.5 * (H + H.T)


def brute_support(gauge, xi, n_dirs=200_000, seed=7, dim=3):
    """Support value max{<xi, x> : gauge(x) = 1} by mesh maximization.

    Accurate to roughly (spread/n_dirs)^2 relative; good enough to pin the
    dual gauge to a few times 1e-3.
    """
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((n_dirs, dim))
    x = d / gauge(d)[:, None]
    return float((x @ np.asarray(xi, dtype=float)).max())


def polygon_length(gauge2, pts, closed=True):
    """Chord-gauge length of a polygon, written independently."""
    pts = np.asarray(pts, dtype=float)
    seq = np.concatenate([pts, pts[:1]], axis=0) if closed else pts
    return float(sum(gauge2(seq[i + 1] - seq[i]) for i in range(len(seq) - 1)))
