"""Girth and geodesics on an embedded unit sphere.

The girth solver works on centrally symmetric closed polygons, storing
only half of the vertices; minimization happens on free ambient vectors
that are radially rescaled onto the surface, so the constraint is exact.
Discrete curve *energy* (segment count times the sum of squared chord
gauges) is the optimization objective: its minimizers are constant-speed
discrete geodesics, whereas raw chord length admits spurious collapsed
configurations.  Reported lengths are always plain chord-gauge sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import PreconditionError, UnsupportedInputError
from .metric import (
    CoSpherePoint,
    EmbeddedSphere,
    induced_hamiltonian,
    minimize_along_conormal,
    project_to_surface,
)

Array = np.ndarray


@dataclass
class DiscreteSymmetricCurve:
    """Centrally symmetric closed polygon; only half the vertices stored."""

    half_points: Array

    def __post_init__(self):
        self.half_points = np.asarray(self.half_points, dtype=float)
        if self.half_points.ndim != 2 or self.half_points.shape[0] < 3:
            raise PreconditionError("need at least 3 half points")

    @property
    def n_half(self) -> int:
        return self.half_points.shape[0]

    @property
    def full_points(self) -> Array:
        return np.concatenate([self.half_points, -self.half_points], axis=0)


@dataclass
class CharacteristicTrajectory:
    samples: list
    times: Array
    closure_residual: float
    g_drift: float

    @property
    def qs(self) -> Array:
        return np.array([s.q for s in self.samples])

    @property
    def ps(self) -> Array:
        return np.array([s.p for s in self.samples])


@dataclass
class GirthOptions:
    N: int = 16
    starts: int = 6
    seed: int = 0
    tol: float = 1e-10
    levels: int = 3
    maxiter: int = 4000


@dataclass
class GirthResult:
    girth: float
    curve: DiscreteSymmetricCurve
    certificate: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# discrete energies


def _sym_chords(x: Array) -> Array:
    # half-curve chords, last one wraps to the antipode of the first vertex
    return np.concatenate([x[1:] - x[:-1], (-x[0] - x[-1])[None, :]], axis=0)


def symmetric_length(sphere: EmbeddedSphere, x: Array) -> float:
    return 2.0 * float(np.sum(sphere.body2.gauge(_sym_chords(x))))


def _symmetric_energy_and_grad(sphere: EmbeddedSphere, y: Array):
    """Energy of the radially projected symmetric polygon and its gradient
    with respect to the free vertices y."""
    body1, body2 = sphere.body1, sphere.body2
    N = y.shape[0]
    M = 2 * N
    F1 = body1.gauge(y)
    x = y / F1[:, None]
    c = _sym_chords(x)
    Fc = body2.gauge(c)
    E = M * float(np.sum(Fc**2))
    w = (2.0 * M) * Fc[:, None] * body2.gradient(c)
    g = np.zeros_like(x)
    g[1:] += w[: N - 1]
    g[: N - 1] -= w[: N - 1]
    g[0] -= w[N - 1]
    g[N - 1] -= w[N - 1]
    # chain rule through the radial projection
    grad1 = body1.gradient(y)
    xg = np.einsum("ij,ij->i", x, g)
    gy = (g - xg[:, None] * grad1) / F1[:, None]
    return E, gy, x


def _closed_chords(x: Array) -> Array:
    return np.roll(x, -1, axis=0) - x


def closed_length(sphere: EmbeddedSphere, x: Array) -> float:
    return float(np.sum(sphere.body2.gauge(_closed_chords(x))))


def _closed_energy_and_grad(sphere: EmbeddedSphere, y: Array):
    body1, body2 = sphere.body1, sphere.body2
    K = y.shape[0]
    F1 = body1.gauge(y)
    x = y / F1[:, None]
    c = _closed_chords(x)
    Fc = body2.gauge(c)
    E = K * float(np.sum(Fc**2))
    w = (2.0 * K) * Fc[:, None] * body2.gradient(c)
    g = np.roll(w, 1, axis=0) - w
    grad1 = body1.gradient(y)
    xg = np.einsum("ij,ij->i", x, g)
    gy = (g - xg[:, None] * grad1) / F1[:, None]
    return E, gy, x


def _lbfgs(fun, y0: Array, tol: float, maxiter: int):
    shape = y0.shape

    def packed(z):
        E, g, _ = fun(z.reshape(shape))
        return E, g.ravel()

    res = minimize(
        packed,
        y0.ravel(),
        jac=True,
        method="L-BFGS-B",
        options={"ftol": 1e-16, "gtol": tol, "maxiter": maxiter, "maxcor": 20},
    )
    return res.x.reshape(shape), float(np.linalg.norm(res.jac))


# ---------------------------------------------------------------------------
# starts and refinement


def _great_circle_half(u: Array, v: Array, N: int) -> Array:
    theta = np.pi * np.arange(N) / N
    return np.cos(theta)[:, None] * u + np.sin(theta)[:, None] * v


def _coordinate_starts(dim: int, N: int):
    eye = np.eye(dim)
    planes = [(0, 1), (0, 2), (1, 2)] if dim >= 3 else [(0, 1)]
    return [_great_circle_half(eye[i], eye[j], N) for i, j in planes[:3]]


def _random_symmetric_start(rng, dim: int, N: int) -> Array:
    basis, _ = np.linalg.qr(rng.standard_normal((dim, 2)))
    pts = _great_circle_half(basis[:, 0], basis[:, 1], N)
    pts = pts + 0.1 * rng.standard_normal(pts.shape)
    return pts


def _upsample_half(x: Array) -> Array:
    nxt = np.concatenate([x[1:], (-x[0])[None, :]], axis=0)
    mids = 0.5 * (x + nxt)
    out = np.empty((2 * x.shape[0], x.shape[1]))
    out[0::2] = x
    out[1::2] = mids
    return out


def _upsample_closed(x: Array) -> Array:
    mids = 0.5 * (x + np.roll(x, -1, axis=0))
    out = np.empty((2 * x.shape[0], x.shape[1]))
    out[0::2] = x
    out[1::2] = mids
    return out


def _minimize_symmetric(sphere, x0, tol, maxiter, levels):
    """Continuation N -> 2N -> ... with Richardson extrapolation of the
    chord lengths."""
    lengths = []
    x = project_to_surface(sphere.body1, x0)
    resid = np.inf
    for lvl in range(levels):
        if lvl > 0:
            x = project_to_surface(sphere.body1, _upsample_half(x))
        x, resid = _lbfgs(
            lambda y: _symmetric_energy_and_grad(sphere, y), x, tol, maxiter
        )
        x = project_to_surface(sphere.body1, x)
        lengths.append(symmetric_length(sphere, x))
    if len(lengths) >= 2:
        value = (4.0 * lengths[-1] - lengths[-2]) / 3.0
        err = abs(lengths[-1] - lengths[-2]) / 3.0
    else:
        value, err = lengths[-1], np.nan
    return value, err, lengths, x, resid


def girth(sphere: EmbeddedSphere, opts: Optional[GirthOptions] = None) -> GirthResult:
    """Length of the shortest centrally symmetric closed geodesic found by
    multi-start discrete minimization with mesh continuation."""
    opts = opts or GirthOptions()
    if not (sphere.body1.symmetric and sphere.body2.symmetric):
        raise UnsupportedInputError("girth requires symmetric bodies")
    if sphere.dim < 3:
        raise UnsupportedInputError("girth requires ambient dimension >= 3")
    rng = np.random.default_rng(opts.seed)
    starts = _coordinate_starts(sphere.dim, opts.N)
    while len(starts) < opts.starts:
        starts.append(_random_symmetric_start(rng, sphere.dim, opts.N))

    best = None
    start_lengths = []
    for idx, x0 in enumerate(starts):
        value, err, lengths, x, resid = _minimize_symmetric(
            sphere, x0, opts.tol, opts.maxiter, opts.levels
        )
        start_lengths.append(value)
        if best is None or value < best[0]:
            best = (value, err, lengths, x, resid, idx)
    value, err, lengths, x, resid, idx = best
    cert = {
        "first_order_residual": resid,
        "continuation_lengths": lengths,
        "richardson_error": err,
        "start_index": idx,
        "start_lengths": start_lengths,
        "n_half_final": x.shape[0],
        "certified": bool(resid <= max(opts.tol * 100.0, 1e-6)),
    }
    return GirthResult(girth=value, curve=DiscreteSymmetricCurve(x), certificate=cert)


def dual_girth(sphere: EmbeddedSphere, opts: Optional[GirthOptions] = None) -> GirthResult:
    """Girth of the dual-side sphere (base = dual of the ambient body,
    ambient = dual norm of the base body), computed by the same variational
    solver and nothing else."""
    return girth(sphere.swapped(), opts)


def refine_closed_geodesic(
    sphere: EmbeddedSphere, curve: DiscreteSymmetricCurve, tol: float = 1e-10
):
    """Polish a near-critical symmetric curve; returns the refined curve and
    a residual report."""
    x0 = project_to_surface(sphere.body1, curve.half_points)
    start_len = symmetric_length(sphere, x0)
    x, resid = _lbfgs(
        lambda y: _symmetric_energy_and_grad(sphere, y), x0, tol, 4000
    )
    x = project_to_surface(sphere.body1, x)
    end_len = symmetric_length(sphere, x)
    report = {
        "first_order_residual": resid,
        "length": end_len,
        "start_length": start_len,
        "diverged": bool(end_len > start_len * (1.0 + 1e-8) + 1e-12),
    }
    return DiscreteSymmetricCurve(x), report


# ---------------------------------------------------------------------------
# spectrum and diameter probes


def length_spectrum_probe(
    sphere: EmbeddedSphere,
    k_starts: int,
    seed: int,
    N: int = 24,
    levels: int = 3,
    cluster_tol: float = 1e-4,
):
    """Sorted distinct closed-geodesic lengths found by multi-start
    refinement.  A probe: it reports what it found, never completeness.

    Symmetric starts (coordinate great circles plus random ones) are
    refined in the symmetric class; a couple of non-symmetric closed loops
    are refined in the full loop space, where contractible starts shrink to
    points and get filtered out.
    """
    if k_starts < 1:
        raise PreconditionError("k_starts must be >= 1")
    rng = np.random.default_rng(seed)
    found = []
    starts = _coordinate_starts(sphere.dim, N)
    n_random = max(0, k_starts - len(starts))
    for _ in range(n_random):
        starts.append(_random_symmetric_start(rng, sphere.dim, N))
    for x0 in starts:
        value, err, lengths, x, resid = _minimize_symmetric(
            sphere, x0, 1e-11, 4000, levels
        )
        if resid <= 1e-5:
            found.append(value)
    # non-symmetric loop starts (full polygons)
    for _ in range(2):
        basis, _ = np.linalg.qr(rng.standard_normal((sphere.dim, 2)))
        theta = 2.0 * np.pi * np.arange(2 * N) / (2 * N)
        loop = np.cos(theta)[:, None] * basis[:, 0] + np.sin(theta)[:, None] * basis[:, 1]
        loop += 0.05 * rng.standard_normal(loop.shape)
        x = project_to_surface(sphere.body1, loop)
        lengths = []
        for lvl in range(levels):
            if lvl > 0:
                x = project_to_surface(sphere.body1, _upsample_closed(x))
            x, resid = _lbfgs(
                lambda y: _closed_energy_and_grad(sphere, y), x, 1e-11, 4000
            )
            x = project_to_surface(sphere.body1, x)
            lengths.append(closed_length(sphere, x))
        value = (4.0 * lengths[-1] - lengths[-2]) / 3.0
        if value > 1e-2 and resid <= 1e-5:
            found.append(value)
    found.sort()
    clustered = []
    for v in found:
        if not clustered or v - clustered[-1] > cluster_tol:
            clustered.append(v)
    return clustered


def _slerp_arc(a: Array, b: Array, K: int, rng) -> Array:
    ah = a / np.linalg.norm(a)
    bh = b / np.linalg.norm(b)
    dot = float(np.clip(ah @ bh, -1.0, 1.0))
    if dot < -1.0 + 1e-10:
        # near-antipodal: route through a random orthogonal waypoint
        w = rng.standard_normal(a.shape[0])
        w -= (w @ ah) * ah
        w /= np.linalg.norm(w)
        half1 = _slerp_arc(ah, w, K // 2, rng)
        half2 = _slerp_arc(w, bh, K - K // 2, rng)
        return np.concatenate([half1, half2[1:]], axis=0)
    ang = np.arccos(dot)
    ts = np.linspace(0.0, 1.0, K + 1)
    if ang < 1e-12:
        return np.outer(np.ones(K + 1), ah)
    s = np.sin(ang)
    return (np.sin((1.0 - ts) * ang) / s)[:, None] * ah + (
        np.sin(ts * ang) / s
    )[:, None] * bh


def shortest_path_length(
    sphere: EmbeddedSphere, a: Array, b: Array, K: int = 24, levels: int = 2, rng=None
) -> float:
    """Chord-gauge length of a locally shortest discrete path from a to b
    (endpoints fixed, interior vertices free).  A lower bound for the true
    induced distance."""
    rng = rng or np.random.default_rng(0)
    a = project_to_surface(sphere.body1, np.asarray(a, float))
    b = project_to_surface(sphere.body1, np.asarray(b, float))
    pts = project_to_surface(sphere.body1, _slerp_arc(a, b, K, rng))
    body2 = sphere.body2

    def fun(y):
        F1 = sphere.body1.gauge(y)
        x = y / F1[:, None]
        full = np.concatenate([a[None, :], x, b[None, :]], axis=0)
        c = np.diff(full, axis=0)
        Fc = body2.gauge(c)
        E = (len(c)) * float(np.sum(Fc**2))
        w = (2.0 * len(c)) * Fc[:, None] * body2.gradient(c)
        g = w[:-1] - w[1:]
        grad1 = sphere.body1.gradient(y)
        xg = np.einsum("ij,ij->i", x, g)
        gy = (g - xg[:, None] * grad1) / F1[:, None]
        return E, gy, x

    lengths = []
    x = pts[1:-1]
    for lvl in range(levels):
        if lvl > 0:
            doubled = np.repeat(x, 2, axis=0)
            doubled[1::2] = 0.5 * (x + np.concatenate([x[1:], b[None, :]], axis=0))
            x = project_to_surface(sphere.body1, doubled)
        x, _ = _lbfgs(fun, x, 1e-10, 2000)
        x = project_to_surface(sphere.body1, x)
        full = np.concatenate([a[None, :], x, b[None, :]], axis=0)
        lengths.append(float(np.sum(body2.gauge(np.diff(full, axis=0)))))
    return lengths[-1]


def diameter_probe(sphere: EmbeddedSphere, m_pairs: int, seed: int, K: int = 24) -> float:
    """Max over sampled point pairs of the locally shortest path length; a
    lower bound for the diameter that is monotone in m_pairs."""
    if m_pairs < 1:
        raise PreconditionError("m_pairs must be >= 1")
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(m_pairs):
        a = rng.standard_normal(sphere.dim)
        b = rng.standard_normal(sphere.dim)
        best = max(best, shortest_path_length(sphere, a, b, K=K, rng=rng))
    return best


# ---------------------------------------------------------------------------
# characteristic flow


def _hamiltonian_field(sphere: EmbeddedSphere, q: Array, p: Array):
    body1 = sphere.body1
    n = body1.gradient(q)
    t, _ = minimize_along_conormal(sphere.dual2, p, n)
    xi = p + t * n
    m = sphere.dual2.gradient(xi)
    F1 = body1.gauge(q)
    H1 = body1.hessian_half_sq(q)
    hessF1 = (H1 - np.outer(n, n)) / F1
    return m, -t * (hessF1 @ m)


def characteristic_flow(
    sphere: EmbeddedSphere, start: CoSpherePoint, T: float, dt: float
) -> CharacteristicTrajectory:
    """Integrate the unit-level Hamiltonian flow of the induced co-sphere
    bundle with a classical 4th-order stepper; after each step the point is
    radially re-projected, the covector re-canonicalized and rescaled back
    to the unit level.  The flow parameter is ambient-norm arclength of the
    base curve."""
    q = np.asarray(start.q, dtype=float).copy()
    p = np.asarray(start.p, dtype=float).copy()
    G0 = float(induced_hamiltonian(sphere, q, p))
    if abs(G0 - 1.0) > 1e-8:
        raise PreconditionError("start must lie on the unit co-sphere")
    n_steps = int(np.ceil(T / dt))
    h = T / n_steps
    samples = [CoSpherePoint(q.copy(), p.copy(), 1.0)]
    times = [0.0]
    drift = 0.0
    for _ in range(n_steps):
        k1q, k1p = _hamiltonian_field(sphere, q, p)
        k2q, k2p = _hamiltonian_field(sphere, q + 0.5 * h * k1q, p + 0.5 * h * k1p)
        k3q, k3p = _hamiltonian_field(sphere, q + 0.5 * h * k2q, p + 0.5 * h * k2p)
        k4q, k4p = _hamiltonian_field(sphere, q + h * k3q, p + h * k3p)
        q = q + (h / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q)
        p = p + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        q /= sphere.body1.gauge(q)
        n = sphere.body1.gradient(q)
        p = p - float(p @ q) * n
        _, G = minimize_along_conormal(sphere.dual2, p, n)
        drift = max(drift, abs(float(G) - 1.0))
        p = p / G
        samples.append(CoSpherePoint(q.copy(), p.copy(), 1.0))
        times.append(times[-1] + h)
    residual = float(
        np.linalg.norm(q - samples[0].q) + np.linalg.norm(p - samples[0].p)
    )
    return CharacteristicTrajectory(
        samples=samples,
        times=np.array(times),
        closure_residual=residual,
        g_drift=float(drift),
    )
