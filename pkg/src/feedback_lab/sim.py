"""Episode execution, Monte Carlo aggregation and verdicts.

An episode is fully determined by (system, controller, adversary,
horizon, seed): the seed feeds a PCG64 generator whose draws happen in a
fixed documented order, and the hot loops run in ``kernels``.  Batch
runs derive per-episode seeds from a master seed with a published 64-bit
mix (splitmix64), so parallel or reordered execution cannot change a
report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import controllers as ctl
from . import kernels, models
from .adversary import Extension, RealizedPiecewiseLinear
from .models import (GUARD, ConfigurationError, GaussianIID, MjlsSpec,
                     Overflow, PolyRegressors, PowerGrowthFn, SampledSpec)
from .riccati import RiccatiSolution

_MASK = (1 << 64) - 1


def splitmix64(z: int) -> int:
    """One splitmix64 step; the published seed-mixing primitive."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def episode_seed(master_seed: int, index: int) -> int:
    """Per-episode seed: splitmix64(master ^ splitmix64(index + 1))."""
    return splitmix64((master_seed & _MASK) ^ splitmix64(index + 1))


# ---------------------------------------------------------------------------
# system descriptions at episode level


@dataclass(frozen=True)
class RandomMember:
    """Recipe for a random Lipschitz-L member: anchor abscissas uniform on
    [-x_span, x_span], values by a random walk with slopes uniform in
    [-L, L] from a start value uniform in [-v0_span, v0_span]."""

    n_anchors: int = 16
    x_span: float = 10.0
    v0_span: float = 2.0


@dataclass(frozen=True)
class RandomEnvelopeMember:
    """Recipe for a random member of the class |f(x)| <= L|x| + c: a
    slope-bounded walk outward from an anchor at the origin, clipped
    into the envelope."""

    n_each_side: int = 8
    x_span: float = 20.0


@dataclass(frozen=True)
class ParametricSystem:
    f: PowerGrowthFn
    noise: GaussianIID = GaussianIID(1.0)
    theta_mean: float = 1.0
    theta_std: float = 1.0
    y0: float = 0.0


@dataclass(frozen=True)
class PolynomialSystem:
    regs: PolyRegressors
    noise: GaussianIID = GaussianIID(1.0)
    y0: float = 0.0


@dataclass(frozen=True)
class NonparametricSystem:
    L: float
    w_bar: float = 1.0
    f: object | None = None  # realized function or plain callable
    member: RandomMember | None = None
    y0: float = 0.0
    y0_std: float = 0.0


@dataclass(frozen=True)
class SampledSystem:
    spec: SampledSpec
    f: RealizedPiecewiseLinear | None = None
    member: RandomEnvelopeMember | None = None
    x0: float = 0.0
    x0_std: float = 0.0


@dataclass(frozen=True)
class MjlsSystem:
    spec: MjlsSpec
    x0: tuple[float, ...] = ()
    init_mode: int | None = None  # None draws uniformly over 1..N


SystemSpec = (ParametricSystem | PolynomialSystem | NonparametricSystem
              | SampledSystem | MjlsSystem)


# controller and adversary selectors


@dataclass(frozen=True)
class ZeroControl:
    pass


@dataclass(frozen=True)
class MvRlsControl:
    """Least-squares based minimum-variance law u = -theta_hat f(y).

    ``theta0=None`` starts the estimate at the system's coefficient mean
    (the prior-matched variant); ``s0`` is the information start."""

    s0: float = 1.0
    theta0: float | None = None


@dataclass(frozen=True)
class SwitchingControl:
    eps: float | None = None  # None means 0.1 * w_bar
    y_star: float = 0.0


@dataclass(frozen=True)
class SampledCeControl:
    kappa: float = ctl.SAMPLED_CLIP_KAPPA


@dataclass(frozen=True)
class MjlsGainControl:
    solution: RiccatiSolution


@dataclass(frozen=True)
class GreedyAdversary:
    budget_mult: float = 10.0


@dataclass(frozen=True)
class SampledGreedyAdversary:
    pass


# ---------------------------------------------------------------------------
# trajectories and verdicts


class Outcome(Enum):
    BOUNDED = "bounded"
    BLOWUP = "blowup"
    INCONCLUSIVE = "inconclusive"


@dataclass
class Trajectory:
    """Time-indexed record of one episode.

    ``states[t]`` pairs with ``noises[t]`` (the noise that produced it;
    slot 0 is zero) and ``inputs[t]`` is the input applied at t.  Vector
    systems store 2-D arrays.  For adversarial episodes ``realized_f``
    is the single function consistent with the whole run and
    ``committed`` the values chosen at the visited states.
    """

    kind: str
    states: np.ndarray
    inputs: np.ndarray
    noises: np.ndarray
    system: object = None
    seed: int | None = None
    theta: object = None
    realized_f: object = None
    modes: np.ndarray | None = None
    mode_estimates: np.ndarray | None = None
    committed: np.ndarray | None = None
    adversarial: bool = False
    blow_step: int | None = None
    controller: object = None


@dataclass(frozen=True)
class EpisodeVerdict:
    outcome: Outcome
    sup_abs_state: float
    regret: float
    horizon: int
    blow_step: int | None = None


@dataclass(frozen=True)
class EpisodeSummary:
    index: int
    seed: int
    outcome: Outcome
    sup_abs_state: float
    regret: float
    blow_step: int | None
    regret_at: tuple[float, ...] = ()


@dataclass
class McReport:
    """Aggregate over independent episodes.

    ``mean_sq_curve`` and the regret checkpoints average over the
    non-blowup episodes only; ``n_bounded`` reports how many that is.
    """

    seeds: int
    master_seed: int
    blowup_fraction: float
    blowup_ci_halfwidth: float
    n_bounded: int
    checkpoints: tuple[int, ...]
    regret_vs_logT: list[tuple[int, float]]
    mean_sq_curve: np.ndarray | None
    regret_ci_halfwidths: list[float] = field(default_factory=list)
    episodes: list[EpisodeSummary] = field(default_factory=list)


@dataclass(frozen=True)
class McConfig:
    system: SystemSpec
    controller: object = ZeroControl()
    adversary: object | None = None
    T: int = 1000
    master_seed: int = 0
    checkpoints: tuple[int, ...] = ()
    collect_curve: bool = False


def default_checkpoints(T: int, first_exp: int = 7) -> tuple[int, ...]:
    """Powers of two from 2**first_exp up to T, with T appended."""
    cps = [2**k for k in range(first_exp, 64) if 2**k <= T]
    if not cps or cps[-1] != T:
        cps.append(T)
    return tuple(cps)


# ---------------------------------------------------------------------------
# episode runners


def _abs_states(states: np.ndarray) -> np.ndarray:
    if states.ndim == 1:
        return np.abs(states)
    return np.sqrt(np.sum(states * states, axis=1))


def _regret(states: np.ndarray, noises: np.ndarray) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        d = states - noises
        if d.ndim == 1:
            terms = d[1:] ** 2
        else:
            terms = np.sum(d[1:] ** 2, axis=1)
    return float(np.sum(terms[np.isfinite(terms)]))


def _verdict(states, noises, blow: int, T: int,
             inconclusive: bool = False) -> EpisodeVerdict:
    a = _abs_states(states)
    sup = float(np.max(a[np.isfinite(a)]))
    regret = _regret(states, noises)
    if inconclusive:
        return EpisodeVerdict(Outcome.INCONCLUSIVE, sup, regret, T, None)
    if blow >= 0:
        return EpisodeVerdict(Outcome.BLOWUP, sup, regret, blow, blow)
    return EpisodeVerdict(Outcome.BOUNDED, sup, regret, T, None)


def random_lipschitz_member(L: float, member: RandomMember,
                            rng: np.random.Generator) -> RealizedPiecewiseLinear:
    xs = np.sort(rng.uniform(-member.x_span, member.x_span, member.n_anchors))
    vs = np.empty_like(xs)
    vs[0] = rng.uniform(-member.v0_span, member.v0_span)
    for i in range(1, xs.shape[0]):
        vs[i] = vs[i - 1] + rng.uniform(-L, L) * (xs[i] - xs[i - 1])
    return RealizedPiecewiseLinear(xs, vs, L, Extension.MCSHANE_MIN)


def random_envelope_member(L: float, c: float, member: RandomEnvelopeMember,
                           rng: np.random.Generator) -> RealizedPiecewiseLinear:
    k = member.n_each_side
    xs_pos = np.sort(rng.uniform(0.0, member.x_span, k))
    xs_neg = -np.sort(rng.uniform(0.0, member.x_span, k))
    v0 = rng.uniform(-c, c)
    xs = [0.0]
    vs = [v0]
    v, xp = v0, 0.0
    for xi in xs_pos:
        v = v + rng.uniform(-L, L) * (xi - xp)
        box = L * abs(xi) + c
        v = min(max(v, -box), box)
        xs.append(xi)
        vs.append(v)
        xp = xi
    v, xp = v0, 0.0
    for xi in xs_neg:
        v = v + rng.uniform(-L, L) * (xp - xi)
        box = L * abs(xi) + c
        v = min(max(v, -box), box)
        xs.append(xi)
        vs.append(v)
        xp = xi
    order = np.argsort(xs)
    return RealizedPiecewiseLinear(np.asarray(xs)[order], np.asarray(vs)[order],
                                   L, Extension.MCSHANE_MIN)


def _run_parametric(system: ParametricSystem, controller, T: int, seed: int):
    rng = np.random.Generator(np.random.PCG64(seed))
    theta = system.theta_mean + system.theta_std * rng.standard_normal()
    w = math.sqrt(system.noise.variance) * rng.standard_normal(T + 1)
    w[0] = 0.0
    if isinstance(controller, MvRlsControl):
        theta0 = system.theta_mean if controller.theta0 is None else controller.theta0
        ys, us, _ths, blow = kernels.parametric_episode(
            system.y0, theta, w, system.f.M, system.f.b,
            controller.s0, theta0, GUARD)
    elif isinstance(controller, ZeroControl):
        ys = np.zeros(T + 1)
        us = np.zeros(T)
        ys[0] = system.y0
        blow = -1
        y = system.y0
        for t in range(T):
            try:
                y = models.step_parametric(y, theta, 0.0, w[t + 1], system.f)
            except Overflow as exc:
                ys[t + 1] = exc.value
                blow = t + 1
                break
            ys[t + 1] = y
    else:
        raise ConfigurationError(
            f"{type(controller).__name__} cannot drive a parametric system")
    end = blow + 1 if blow >= 0 else T + 1
    traj = Trajectory(kind="parametric", states=ys[:end], inputs=us[:end - 1],
                      noises=w[:end], system=system, seed=seed, theta=theta,
                      blow_step=blow if blow >= 0 else None,
                      controller=controller)
    return traj, _verdict(ys[:end], w[:end], blow, T)


def _run_polynomial(system: PolynomialSystem, controller, T: int, seed: int):
    if not isinstance(controller, ZeroControl):
        raise ConfigurationError(
            f"{type(controller).__name__} cannot drive a polynomial system")
    rng = np.random.Generator(np.random.PCG64(seed))
    theta = np.asarray(system.regs.theta_mean) + rng.standard_normal(system.regs.p)
    w = math.sqrt(system.noise.variance) * rng.standard_normal(T + 1)
    w[0] = 0.0
    ys = np.zeros(T + 1)
    ys[0] = system.y0
    us = np.zeros(T)
    blow = -1
    y = system.y0
    for t in range(T):
        try:
            y = models.step_polynomial(y, theta, 0.0, w[t + 1], system.regs)
        except Overflow as exc:
            ys[t + 1] = exc.value
            blow = t + 1
            break
        ys[t + 1] = y
    end = blow + 1 if blow >= 0 else T + 1
    traj = Trajectory(kind="polynomial", states=ys[:end], inputs=us[:end - 1],
                      noises=w[:end], system=system, seed=seed, theta=theta,
                      blow_step=blow if blow >= 0 else None,
                      controller=controller)
    return traj, _verdict(ys[:end], w[:end], blow, T)


def _sorted_realized(axs, avs, na, L) -> RealizedPiecewiseLinear:
    xs = np.asarray(axs[:na], dtype=float)
    vs = np.asarray(avs[:na], dtype=float)
    order = np.argsort(xs)
    return RealizedPiecewiseLinear(xs[order], vs[order], L,
                                   Extension.MCSHANE_MIN)


def _run_nonparametric(system: NonparametricSystem, controller, adversary,
                       T: int, seed: int):
    rng = np.random.Generator(np.random.PCG64(seed))
    if isinstance(controller, SwitchingControl):
        eps = 0.1 * system.w_bar if controller.eps is None else controller.eps
        ystar = controller.y_star
        use_ctl = 1
    elif isinstance(controller, ZeroControl):
        eps, ystar, use_ctl = 1.0, 0.0, 0
    else:
        raise ConfigurationError(
            f"{type(controller).__name__} cannot drive a nonparametric system")

    if adversary is not None:
        if not isinstance(adversary, GreedyAdversary):
            raise ConfigurationError("nonparametric episodes take the greedy adversary")
        if system.f is not None or system.member is not None:
            raise ConfigurationError("adversarial episodes leave f unspecified")
        y0 = system.y0 + system.y0_std * rng.standard_normal()
        budget_c = adversary.budget_mult * system.w_bar
        ys, us, ws, vsc, axs, avs, na, blow = kernels.nonparam_duel(
            y0, system.L, system.w_bar, budget_c, eps, ystar, GUARD, T, use_ctl)
        end = blow + 1 if blow >= 0 else T + 1
        traj = Trajectory(kind="nonparametric", states=ys[:end],
                          inputs=us[:end - 1], noises=ws[:end], system=system,
                          seed=seed, realized_f=_sorted_realized(axs, avs, na, system.L),
                          committed=vsc[:end - 1], adversarial=True,
                          blow_step=blow if blow >= 0 else None,
                          controller=controller)
        return traj, _verdict(ys[:end], ws[:end], blow, T)

    # fixed or randomly drawn member; draws happen in the order
    # (member if needed, y0 perturbation, noise)
    f = system.f
    if f is None:
        if system.member is None:
            raise ConfigurationError("either f, a member recipe, or an adversary is required")
        f = random_lipschitz_member(system.L, system.member, rng)
    y0 = system.y0 + system.y0_std * rng.standard_normal()
    if isinstance(f, RealizedPiecewiseLinear):
        raw = rng.uniform(-1.0, 1.0, T + 1)
        raw[0] = 0.0
        ys, us, blow = kernels.nonparam_fixed(
            y0, f.xs, f.vs, f.L, f.ext_mode, raw, system.w_bar, eps, ystar,
            GUARD, use_ctl)
        ws = system.w_bar * raw
        end = blow + 1 if blow >= 0 else T + 1
        traj = Trajectory(kind="nonparametric", states=ys[:end],
                          inputs=us[:end - 1], noises=ws[:end], system=system,
                          seed=seed, realized_f=f,
                          blow_step=blow if blow >= 0 else None,
                          controller=controller)
        return traj, _verdict(ys[:end], ws[:end], blow, T)

    # plain callable: slow path, non-finite values are the caller's problem
    # and yield an inconclusive verdict
    ys = np.zeros(T + 1)
    us = np.zeros(T)
    ws = np.zeros(T + 1)
    ys[0] = y0
    hist = ctl.NnHistory()
    y = y0
    blow = -1
    inconclusive = False
    end = T + 1
    for t in range(T):
        if use_ctl and len(hist) > 0:
            u = ctl.switching_control(hist, y, eps, ystar)
        else:
            u = 0.0
        w = system.w_bar * rng.uniform(-1.0, 1.0)
        fy = f(y)
        if not np.isfinite(fy):
            inconclusive = True
            end = t + 1
            break
        y1 = fy + u + w
        us[t] = u
        ws[t + 1] = w
        ys[t + 1] = y1
        if y1 != y1 or y1 > GUARD or y1 < -GUARD:
            blow = t + 1
            break
        hist.append(y, u, y1)
        y = y1
    if blow >= 0:
        end = blow + 1
    traj = Trajectory(kind="nonparametric", states=ys[:end], inputs=us[:end - 1],
                      noises=ws[:end], system=system, seed=seed, realized_f=f,
                      blow_step=blow if blow >= 0 else None,
                      controller=controller)
    horizon = end - 1 if inconclusive else T
    return traj, _verdict(ys[:end], ws[:end], blow, horizon,
                          inconclusive=inconclusive)


def _run_sampled(system: SampledSystem, controller, adversary, T: int,
                 seed: int):
    spec = system.spec
    rng = np.random.Generator(np.random.PCG64(seed))
    if isinstance(controller, SampledCeControl):
        use_ctl, kappa = 1, controller.kappa
    elif isinstance(controller, ZeroControl):
        use_ctl, kappa = 0, ctl.SAMPLED_CLIP_KAPPA
    else:
        raise ConfigurationError(
            f"{type(controller).__name__} cannot drive a sampled-data system")

    if adversary is not None:
        if not isinstance(adversary, SampledGreedyAdversary):
            raise ConfigurationError("sampled episodes take the sampled greedy adversary")
        if system.f is not None or system.member is not None:
            raise ConfigurationError("adversarial episodes leave f unspecified")
        x0 = system.x0 + system.x0_std * rng.standard_normal()
        cap = T * (1 + 4 * spec.substeps) + 4
        xs, us, vsc, axs, avs, na, blow = kernels.sampled_duel(
            x0, spec.L, spec.c, spec.h, spec.substeps, kappa, T, GUARD,
            use_ctl, cap)
        if na >= cap:
            raise RuntimeError("anchor capacity exhausted in the sampled duel")
        end = blow + 1 if blow >= 0 else T + 1
        traj = Trajectory(kind="sampled", states=xs[:end], inputs=us[:end - 1],
                          noises=np.zeros(end), system=system, seed=seed,
                          realized_f=_sorted_realized(axs, avs, na, spec.L),
                          committed=vsc[:end - 1], adversarial=True,
                          blow_step=blow if blow >= 0 else None,
                          controller=controller)
        return traj, _verdict(xs[:end], np.zeros(end), blow, T)

    f = system.f
    if f is None:
        if system.member is None:
            raise ConfigurationError("either f, a member recipe, or an adversary is required")
        f = random_envelope_member(spec.L, spec.c, system.member, rng)
    x0 = system.x0 + system.x0_std * rng.standard_normal()
    xs, us, blow = kernels.sampled_fixed(
        x0, f.xs, f.vs, f.L, f.ext_mode, spec.c, spec.h, spec.substeps,
        kappa, T, GUARD, use_ctl)
    end = blow + 1 if blow >= 0 else T + 1
    traj = Trajectory(kind="sampled", states=xs[:end], inputs=us[:end - 1],
                      noises=np.zeros(end), system=system, seed=seed,
                      realized_f=f, blow_step=blow if blow >= 0 else None,
                      controller=controller)
    return traj, _verdict(xs[:end], np.zeros(end), blow, T)


def _run_mjls(system: MjlsSystem, controller, T: int, seed: int):
    spec = system.spec
    rng = np.random.Generator(np.random.PCG64(seed))
    N = spec.n_modes
    if system.init_mode is None:
        mode0 = int(rng.integers(1, N + 1))
    else:
        mode0 = system.init_mode
        if not 1 <= mode0 <= N:
            raise ConfigurationError(f"init_mode {mode0} outside 1..{N}")
    munif = rng.random(T)
    W = math.sqrt(spec.noise.sigma_lo) * rng.standard_normal((T, spec.n_states))
    if isinstance(controller, MjlsGainControl):
        Kg = controller.solution.Ks
        use_ctl = 1
    elif isinstance(controller, ZeroControl):
        Kg = np.zeros((N, spec.n_inputs, spec.n_states))
        use_ctl = 0
    else:
        raise ConfigurationError(
            f"{type(controller).__name__} cannot drive a jump-linear system")
    x0 = np.asarray(system.x0, dtype=float)
    if x0.shape != (spec.n_states,):
        raise ConfigurationError("x0 dimension mismatch")
    X, U, modes, est, blow = kernels.mjls_episode(
        spec.A, spec.B, Kg, spec.chain.P, x0, mode0 - 1, munif, W, GUARD,
        use_ctl)
    end = blow + 1 if blow >= 0 else T + 1
    noises = np.zeros((end, spec.n_states))
    noises[1:] = W[:end - 1]
    est_pub = np.where(est[:end] >= 0, est[:end] + 1, 0)
    traj = Trajectory(kind="mjls", states=X[:end], inputs=U[:end - 1],
                      noises=noises, system=system, seed=seed,
                      modes=modes[:end] + 1, mode_estimates=est_pub,
                      blow_step=blow if blow >= 0 else None,
                      controller=controller)
    return traj, _verdict(X[:end], noises, blow, T)


def run_episode(system: SystemSpec, controller=ZeroControl(),
                adversary=None, T: int = 1000, seed: int = 0):
    """Close the loop for one episode; deterministic per seed.

    Returns ``(Trajectory, EpisodeVerdict)``.  Mismatched system,
    controller and adversary combinations raise ConfigurationError.
    """
    if T < 1:
        raise ValueError("horizon must be at least 1")
    # blowup episodes legitimately touch inf on their final transition;
    # the guard logic classifies those, so the fp warnings are noise
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(system, ParametricSystem):
            if adversary is not None:
                raise ConfigurationError("parametric episodes take no adversary")
            return _run_parametric(system, controller, T, seed)
        if isinstance(system, PolynomialSystem):
            if adversary is not None:
                raise ConfigurationError("polynomial episodes take no adversary")
            return _run_polynomial(system, controller, T, seed)
        if isinstance(system, NonparametricSystem):
            return _run_nonparametric(system, controller, adversary, T, seed)
        if isinstance(system, SampledSystem):
            return _run_sampled(system, controller, adversary, T, seed)
        if isinstance(system, MjlsSystem):
            if adversary is not None:
                raise ConfigurationError("jump-linear episodes take no adversary")
            return _run_mjls(system, controller, T, seed)
    raise ConfigurationError(f"unknown system type {type(system).__name__}")


# ---------------------------------------------------------------------------
# Monte Carlo


def _episode_summary(cfg: McConfig, index: int):
    seed = episode_seed(cfg.master_seed, index)
    traj, verdict = run_episode(cfg.system, cfg.controller, cfg.adversary,
                                cfg.T, seed)
    regret_at = ()
    if cfg.checkpoints:
        with np.errstate(over="ignore", invalid="ignore"):
            d = traj.states - traj.noises
            terms = d[1:] ** 2 if d.ndim == 1 else np.sum(d[1:] ** 2, axis=1)
        terms = np.where(np.isfinite(terms), terms, 0.0)
        csum = np.cumsum(terms)
        regret_at = tuple(
            float(csum[min(tc, csum.shape[0]) - 1]) if csum.shape[0] else 0.0
            for tc in cfg.checkpoints)
    curve = None
    if cfg.collect_curve and verdict.outcome is Outcome.BOUNDED:
        a = _abs_states(traj.states)
        curve = a * a
    summary = EpisodeSummary(index=index, seed=seed, outcome=verdict.outcome,
                             sup_abs_state=verdict.sup_abs_state,
                             regret=verdict.regret, blow_step=verdict.blow_step,
                             regret_at=regret_at)
    return summary, curve


def _aggregate(cfg: McConfig, n_seeds: int, summaries, curves) -> McReport:
    summaries = sorted(summaries, key=lambda s: s.index)
    n_blow = sum(1 for s in summaries if s.outcome is Outcome.BLOWUP)
    n_bounded = sum(1 for s in summaries if s.outcome is Outcome.BOUNDED)
    frac = n_blow / n_seeds
    half = 1.96 * math.sqrt(max(frac * (1.0 - frac), 0.0) / n_seeds)
    regret_rows: list[tuple[int, float]] = []
    regret_half: list[float] = []
    if cfg.checkpoints:
        good = [s for s in summaries if s.outcome is Outcome.BOUNDED]
        for k, tc in enumerate(cfg.checkpoints):
            if good:
                vals = np.array([s.regret_at[k] for s in good])
                regret_rows.append((tc, float(np.mean(vals))))
                regret_half.append(
                    1.96 * float(np.std(vals)) / math.sqrt(len(good)))
            else:
                regret_rows.append((tc, float("nan")))
                regret_half.append(float("nan"))
    curve = None
    if cfg.collect_curve and n_bounded > 0:
        acc = None
        for idx in sorted(curves):
            c = curves[idx]
            acc = c.copy() if acc is None else acc + c
        curve = acc / n_bounded
    return McReport(seeds=n_seeds, master_seed=cfg.master_seed,
                    blowup_fraction=frac, blowup_ci_halfwidth=half,
                    n_bounded=n_bounded, checkpoints=tuple(cfg.checkpoints),
                    regret_vs_logT=regret_rows, mean_sq_curve=curve,
                    regret_ci_halfwidths=regret_half, episodes=summaries)


def monte_carlo(cfg: McConfig, n_seeds: int) -> McReport:
    """Run ``n_seeds`` independent episodes and aggregate.

    Episode seeds come from :func:`episode_seed`; aggregation folds the
    per-episode results in index order, so any execution order produces
    the same report.
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be at least 1")
    summaries = []
    curves = {}
    for idx in range(n_seeds):
        s, c = _episode_summary(cfg, idx)
        summaries.append(s)
        if c is not None:
            curves[idx] = c
    return _aggregate(cfg, n_seeds, summaries, curves)


def regret_logfit(report: McReport) -> tuple[float, float]:
    """Least-squares slope of mean regret against log horizon.

    Needs at least five checkpoints; returns (slope, r_squared).
    """
    rows = [(tc, r) for tc, r in report.regret_vs_logT if np.isfinite(r)]
    if len(rows) < 5:
        raise ValueError("at least five finite checkpoints are required")
    xs = np.log(np.array([tc for tc, _ in rows], dtype=float))
    ys = np.array([r for _, r in rows])
    A = np.vstack([xs, np.ones_like(xs)]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-12 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(coef[0]), r2


# ---------------------------------------------------------------------------
# audits and replay


@dataclass(frozen=True)
class GrowthAudit:
    """Escape-rate measurements of a blowup trajectory.

    ``log_ratios[k]`` is log|x_{k+1}| / log|x_k| where both logs are
    positive (eventually above 1 exactly for faster-than-exponential
    escape); ``multipliers`` are the plain consecutive ratios
    |x_{k+1}|/|x_k| over nonzero states.
    """

    log_ratios: np.ndarray
    multipliers: np.ndarray


def growth_rate_audit(traj: Trajectory) -> GrowthAudit:
    """Audit a blowup trajectory; a non-blowup trajectory yields an
    empty audit."""
    if traj.blow_step is None:
        return GrowthAudit(np.empty(0), np.empty(0))
    a = _abs_states(traj.states)
    a = a[np.isfinite(a)]
    ratios = []
    for k in range(a.shape[0] - 1):
        if a[k] > 1.0 and a[k + 1] > 1.0:
            ratios.append(math.log(a[k + 1]) / math.log(a[k]))
    mults = []
    for k in range(a.shape[0] - 1):
        if a[k] > 0.0:
            mults.append(a[k + 1] / a[k])
    return GrowthAudit(np.array(ratios), np.array(mults))


def replay_states(traj: Trajectory) -> np.ndarray:
    """Recompute every stored transition through the model step ops.

    Returns the recomputed state array; bit-equality with
    ``traj.states`` is the trajectory integrity invariant.  The final
    transition of a blowup trajectory is recovered from the overflow
    signal the step op raises.
    """
    system = traj.system
    out = np.array(traj.states, copy=True)
    n_steps = traj.inputs.shape[0]

    def step(t):
        if traj.kind == "parametric":
            return models.step_parametric(out[t], traj.theta, traj.inputs[t],
                                          traj.noises[t + 1], system.f)
        if traj.kind == "polynomial":
            return models.step_polynomial(out[t], traj.theta, traj.inputs[t],
                                          traj.noises[t + 1], system.regs)
        if traj.kind == "nonparametric":
            return models.step_nonparametric(out[t], traj.realized_f,
                                             traj.inputs[t], traj.noises[t + 1])
        if traj.kind == "sampled":
            return models.integrate_sampled(out[t], traj.realized_f,
                                            traj.inputs[t], system.spec)
        if traj.kind == "mjls":
            return models.step_mjls(out[t], int(traj.modes[t]), traj.inputs[t],
                                    traj.noises[t + 1], system.spec)
        raise ValueError(f"cannot replay trajectory kind {traj.kind!r}")

    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(n_steps):
            try:
                out[t + 1] = step(t)
            except Overflow as exc:
                out[t + 1] = exc.value
    return out


def check_replay(traj: Trajectory) -> bool:
    """True when the stored states replay bit for bit."""
    replayed = replay_states(traj)
    a = np.asarray(traj.states)
    same = (a == replayed) | (np.isnan(a) & np.isnan(replayed))
    return bool(np.all(same))


def recompute_input(traj: Trajectory, t: int):
    """Recompute the input at time t from the trajectory prefix only.

    Uses the module-level controller operations, reading nothing beyond
    index t; agreement with ``traj.inputs[t]`` checks both causality and
    the fused kernels against the reference controller implementations.
    """
    controller = traj.controller
    system = traj.system
    if isinstance(controller, ZeroControl):
        return 0.0 if traj.states.ndim == 1 else np.zeros_like(traj.inputs[0])
    if traj.kind == "parametric":
        theta0 = (system.theta_mean if controller.theta0 is None
                  else controller.theta0)
        state = ctl.make_rls(s0=controller.s0, theta0=theta0)
        for i in range(t):
            phi = models.eval_power(system.f, traj.states[i])
            z = traj.states[i + 1] - traj.inputs[i]
            state = ctl.rls_update(state, phi, z)
        return ctl.adaptive_mv_control(
            state, models.eval_power(system.f, traj.states[t]))
    if traj.kind == "nonparametric":
        eps = (0.1 * system.w_bar if controller.eps is None else controller.eps)
        hist = ctl.NnHistory()
        for i in range(t):
            hist.append(traj.states[i], traj.inputs[i], traj.states[i + 1])
        return ctl.switching_control(hist, traj.states[t], eps,
                                     controller.y_star)
    if traj.kind == "sampled":
        samples = [(traj.states[i], traj.inputs[i], traj.states[i + 1])
                   for i in range(t)]
        return ctl.sampled_control(samples, traj.states[t], system.spec,
                                   controller.kappa)
    if traj.kind == "mjls":
        state = ctl.MjlsControllerState(Ks=controller.solution.Ks)
        if t >= 1:
            state.observe(traj.states[t - 1], traj.inputs[t - 1])
            ctl.mjls_estimate_mode(state, traj.states[t], system.spec)
        return ctl.mjls_control(state, traj.states[t])
    raise ValueError(f"cannot recompute inputs for kind {traj.kind!r}")
