"""System classes and exact one-step dynamics.

Every step operation is a pure function of its arguments; randomness
enters only through caller-owned generators.  States that leave the
divergence guard raise :class:`Overflow`, which episode runners convert
into a blowup verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .adversary import PiecewiseLinearFn, RealizedPiecewiseLinear

#: Divergence guard on state magnitude.  Large enough to witness any
#: faster-than-exponential escape, small enough that one more power step
#: with exponent <= 10 stays inside double precision.
GUARD = 1e150


class Overflow(ArithmeticError):
    """State magnitude crossed the divergence guard.

    Carries the offending value so a replay can verify the final
    transition of a blowup trajectory.
    """

    def __init__(self, value):
        self.value = value
        super().__init__(f"state magnitude beyond guard: {value!r}")


class ConfigurationError(ValueError):
    """System, controller and adversary pieces do not fit together."""


# ---------------------------------------------------------------------------
# system descriptions


@dataclass(frozen=True)
class PowerGrowthFn:
    """Odd power nonlinearity x -> M*sign(x)*|x|^b with asymptotic gain M."""

    M: float
    b: float

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("asymptotic gain M must be positive")
        if self.b < 0:
            raise ValueError("growth exponent b must be nonnegative")


@dataclass(frozen=True)
class PolyRegressors:
    """Power regressors with strictly decreasing exponents b_1 > ... > b_p > 0.

    ``theta_mean`` is the mean of the unknown coefficient vector; each
    episode samples the coefficients around it with identity covariance.
    """

    exponents: tuple[float, ...]
    theta_mean: tuple[float, ...]

    def __post_init__(self):
        bs = self.exponents
        if len(bs) < 1:
            raise ValueError("at least one regressor is required")
        if any(b <= 0 for b in bs):
            raise ValueError("exponents must be positive")
        if any(bs[i] <= bs[i + 1] for i in range(len(bs) - 1)):
            raise ValueError("exponents must be strictly decreasing")
        if len(self.theta_mean) != len(bs):
            raise ValueError("theta_mean length must match exponent count")

    @property
    def p(self) -> int:
        return len(self.exponents)


@dataclass(frozen=True)
class GaussianIID:
    variance: float = 1.0

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("variance must be positive")


@dataclass(frozen=True)
class BoundedAdversarial:
    w_bar: float = 1.0

    def __post_init__(self):
        if not self.w_bar > 0:
            raise ValueError("noise bound must be positive")


@dataclass(frozen=True)
class BoundedRandom:
    w_bar: float = 1.0

    def __post_init__(self):
        if not self.w_bar > 0:
            raise ValueError("noise bound must be positive")


@dataclass(frozen=True)
class MartingaleDiffVector:
    """Vector noise with sigma_lo*I <= E[w w'] and E[w'w] <= sigma_hi."""

    sigma_lo: float
    sigma_hi: float
    dim: int

    def __post_init__(self):
        if not (self.sigma_lo > 0 and self.sigma_hi > 0):
            raise ValueError("noise bounds must be positive")
        if self.sigma_lo * self.dim > self.sigma_hi:
            raise ValueError("sigma_lo * dim must not exceed sigma_hi")
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")


NoiseModel = GaussianIID | BoundedAdversarial | BoundedRandom | MartingaleDiffVector


def _strongly_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    for mat in (adj, adj.T):
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in range(n):
                if mat[u, v] and not seen[v]:
                    seen[v] = True
                    stack.append(v)
        if not seen.all():
            return False
    return True


def _period(adj: np.ndarray) -> int:
    # gcd of (level[u] + 1 - level[v]) over edges of a strongly
    # connected digraph, computed from BFS levels out of node 0
    n = adj.shape[0]
    level = np.full(n, -1, dtype=int)
    level[0] = 0
    queue = [0]
    while queue:
        u = queue.pop(0)
        for v in range(n):
            if adj[u, v] and level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u in range(n):
        for v in range(n):
            if adj[u, v]:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g) if g != 0 else 0


@dataclass(frozen=True)
class MarkovChain:
    """Finite chain over modes 1..N with row-stochastic transition matrix.

    Irreducibility and aperiodicity are established at construction from
    the positivity pattern of the matrix and recorded as flags; callers
    that require an ergodic chain check them (``MjlsSpec`` does).
    """

    P: np.ndarray
    is_irreducible: bool = field(init=False)
    is_aperiodic: bool = field(init=False)

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError("transition matrix must be square")
        if (P < 0).any():
            raise ValueError("transition probabilities must be nonnegative")
        if np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("rows must sum to 1 within 1e-12")
        object.__setattr__(self, "P", P)
        adj = P > 0
        irr = _strongly_connected(adj)
        object.__setattr__(self, "is_irreducible", irr)
        aper = irr and _period(adj) == 1
        object.__setattr__(self, "is_aperiodic", aper)

    @property
    def n_states(self) -> int:
        return self.P.shape[0]


@dataclass(frozen=True)
class MjlsSpec:
    """Jump-linear system x' = A(mode) x + B(mode) u + w with hidden mode."""

    chain: MarkovChain
    A: np.ndarray  # (N, n, n)
    B: np.ndarray  # (N, n, m)
    noise: MartingaleDiffVector

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        N = self.chain.n_states
        if A.ndim != 3 or A.shape[0] != N or A.shape[1] != A.shape[2]:
            raise ValueError("A must be (N, n, n)")
        if B.ndim != 3 or B.shape[0] != N or B.shape[1] != A.shape[1]:
            raise ValueError("B must be (N, n, m)")
        if not (self.chain.is_irreducible and self.chain.is_aperiodic):
            raise ConfigurationError(
                "mode chain must be irreducible and aperiodic")
        if self.noise.dim != A.shape[1]:
            raise ValueError("noise dimension must match the state dimension")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n_modes(self) -> int:
        return self.A.shape[0]

    @property
    def n_states(self) -> int:
        return self.A.shape[1]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[2]


@dataclass(frozen=True)
class SampledSpec:
    """Sampling period, integrator resolution and the uncertainty class
    parameters (slope bound L, offset c) for the continuous-time loop."""

    L: float
    c: float
    h: float
    substeps: int = 64

    def __post_init__(self):
        if not (self.L > 0 and self.c > 0 and self.h > 0):
            raise ValueError("L, c and h must be positive")
        if self.substeps < 1:
            raise ValueError("substeps must be at least 1")


# ---------------------------------------------------------------------------
# step operations


def eval_power(f: PowerGrowthFn, x: float) -> float:
    """Odd extension M*sign(x)*|x|^b; zero at the origin for every b."""
    return kernels.power_eval(f.M, f.b, float(x))


def _guarded(value: float) -> float:
    if value != value or value > GUARD or value < -GUARD:
        raise Overflow(value)
    return value


def step_parametric(y: float, theta: float, u: float, w: float,
                    f: PowerGrowthFn) -> float:
    """One step of y' = theta*f(y) + u + w."""
    phi = kernels.power_eval(f.M, f.b, float(y))
    return _guarded(theta * phi + u + w)


def step_polynomial(y: float, theta, u: float, w: float,
                    regs: PolyRegressors) -> float:
    """One step of y' = sum_i theta_i*sign(y)|y|^{b_i} + u + w."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (regs.p,):
        raise ValueError("theta must have one entry per regressor")
    acc = 0.0
    for i in range(regs.p):
        acc = acc + theta[i] * kernels.power_eval(1.0, regs.exponents[i], float(y))
    return _guarded(acc + u + w)


def step_nonparametric(y: float, f, u: float, w: float) -> float:
    """One step of y' = f(y) + u + w for a realized or provider-backed f."""
    fy = f(float(y))
    return _guarded(fy + u + w)


def step_highorder(window, f, u: float, w: float) -> float:
    """One step of y' = f(y_t, ..., y_{t-p+1}) + u + w."""
    window = np.asarray(window, dtype=float)
    return _guarded(f(window) + u + w)


def integrate_sampled(x0: float, f: PiecewiseLinearFn | RealizedPiecewiseLinear,
                      u_const: float, spec: SampledSpec) -> float:
    """State after one sampling period of dx/dt = f(x) + u, zero-order hold.

    Classical fourth-order Runge-Kutta with ``spec.substeps`` uniform
    steps.  ``f`` must be realized and inside the declared class: anchor
    difference quotients within the slope bound and anchor values within
    |v| <= L|x| + c.
    """
    if isinstance(f, PiecewiseLinearFn):
        realized = f.realize()
    else:
        realized = f
    xs, vs = realized.xs, realized.vs
    if xs.shape[0] == 0:
        raise ValueError("f must carry at least one anchor")
    order = np.argsort(xs)
    sx, sv = xs[order], vs[order]
    # tolerances scale with magnitude so replays of far-escaped runs
    # are not rejected on last-bit rounding
    if sx.shape[0] > 1:
        dv = np.abs(np.diff(sv))
        dx = np.diff(sx)
        scale = np.maximum(1.0, np.maximum(np.abs(sv[:-1]), np.abs(sv[1:])))
        if np.any(dv > spec.L * dx + 1e-9 * scale):
            raise ValueError("anchor difference quotients exceed the slope bound")
    box = spec.L * np.abs(sx) + spec.c
    if np.any(np.abs(sv) > box + 1e-9 * np.maximum(1.0, box)):
        raise ValueError("anchor values leave the declared envelope |v| <= L|x| + c")
    out = kernels.rk4_mcshane(xs, vs, xs.shape[0], realized.L,
                              realized.ext_mode, float(x0), float(u_const),
                              spec.h, spec.substeps, GUARD)
    return _guarded(out)


def step_mjls(x, mode: int, u, w, spec: MjlsSpec):
    """One step x' = A(mode) x + B(mode) u + w; ``mode`` is 1-based."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if not 1 <= mode <= spec.n_modes:
        raise ConfigurationError(f"mode {mode} outside 1..{spec.n_modes}")
    if x.shape != (spec.n_states,) or u.shape != (spec.n_inputs,) \
            or w.shape != (spec.n_states,):
        raise ConfigurationError("state, input or noise dimension mismatch")
    out = kernels.mjls_step(spec.A[mode - 1], spec.B[mode - 1], x, u, w)
    if not np.all(np.isfinite(out)) or np.max(np.abs(out)) > GUARD:
        raise Overflow(out)
    return out


def markov_next(mode: int, chain: MarkovChain, rng: np.random.Generator) -> int:
    """Sample the successor of ``mode`` (1-based) from its transition row."""
    N = chain.n_states
    if not 1 <= mode <= N:
        raise ValueError(f"mode {mode} outside 1..{N}")
    r = rng.random()
    acc = 0.0
    row = chain.P[mode - 1]
    for j in range(N):
        acc += row[j]
        if r < acc:
            return j + 1
    return N
