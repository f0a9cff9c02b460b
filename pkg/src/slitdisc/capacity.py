"""Logarithmic capacity: closed forms, a Fekete-point oracle, equilibrium measures.

Closed forms (circle R -> R, arc -> R sin(w/2), segment L -> L/4, point -> 0)
are the exact reference path and the only one that survives the family's
underflowing arc widths.  The Fekete oracle maximizes the pairwise log-distance
sum of n points over the set's parameterization and converts the optimum to a
transfinite-diameter estimate; the equilibrium routine discretizes the energy
functional over midpoint cells.  All distance logs inside one circle or
segment come from chord formulas so near-coincident points keep finite logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .geometry import (
    ArcObstacle,
    CompactSet,
    DiscObstacle,
    Obstacle,
    PointObstacle,
    SegmentObstacle,
)
from .numerics import golden_max

NEG_INF = float("-inf")

SetLike = Union[CompactSet, Obstacle]


@dataclass(frozen=True)
class LogCapacity:
    """Capacity stored as its natural log; -inf encodes a polar set."""

    log_value: float

    def __post_init__(self) -> None:
        if math.isnan(self.log_value):
            raise ValueError("log capacity cannot be NaN")

    @property
    def is_polar(self) -> bool:
        return self.log_value == NEG_INF

    @property
    def value(self) -> float:
        """Linear-scale capacity; underflows to 0.0 honestly."""
        if self.is_polar:
            return 0.0
        if self.log_value > 700.0:
            return math.inf
        return math.exp(self.log_value) if self.log_value > -745.0 else 0.0


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure on finitely many points."""

    points: tuple[complex, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.points) != len(self.weights):
            raise ValueError("points and weights must pair up")
        if any(w < 0.0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")


@dataclass(frozen=True)
class EnergyValue:
    """Logarithmic energy of a measure; tolerance is the declared discretization error."""

    value: float
    tolerance: float | None = None


# ---------------------------------------------------------------------------
# closed forms


def arc_log_capacity(
    radius: float,
    half_width: float | None = None,
    *,
    log_sin_quarter: float | None = None,
    log_radius: float | None = None,
) -> LogCapacity:
    """Capacity of a circular arc: R * sin(half_width / 2).

    Callers supply either the half-width in radians or log(sin(half_width/2))
    directly; the latter is the underflow-safe path used by the family's
    arcs, where it equals -t^-k and makes the capacity k*log(r) - t^-k
    exactly in log-domain.
    """
    if not (radius > 0.0):
        raise ValueError("radius must be positive")
    if log_sin_quarter is None:
        if half_width is None:
            raise ValueError("supply half_width or log_sin_quarter")
        if not (0.0 < half_width <= math.pi + 1e-12):
            raise ValueError("half_width must lie in (0, pi]")
        log_sin_quarter = math.log(math.sin(min(half_width, math.pi) / 2.0))
    lr = math.log(radius) if log_radius is None else log_radius
    return LogCapacity(lr + log_sin_quarter)


def disc_log_capacity(radius: float) -> LogCapacity:
    if not (radius > 0.0):
        raise ValueError("radius must be positive")
    return LogCapacity(math.log(radius))


def segment_log_capacity(length: float) -> LogCapacity:
    if not (length > 0.0):
        raise ValueError("length must be positive")
    return LogCapacity(math.log(length / 4.0))


def point_log_capacity() -> LogCapacity:
    return LogCapacity(NEG_INF)


def log_capacity(obj: SetLike) -> LogCapacity:
    """Closed-form capacity of a single piece, or of a union with at most
    one non-polar piece (finitely many extra points never change capacity)."""
    if isinstance(obj, CompactSet):
        extended = [p for p in obj.pieces if not _piece_is_polar(p)]
        if not extended:
            return LogCapacity(NEG_INF)
        if len(extended) > 1:
            raise ValueError("no closed form for a union of several non-polar pieces; use union_log_capacity or the Fekete oracle")
        return log_capacity(extended[0])
    if isinstance(obj, ArcObstacle):
        if obj.point_like and obj.log_sin_quarter == NEG_INF:
            return LogCapacity(NEG_INF)
        return arc_log_capacity(
            obj.radius,
            log_sin_quarter=obj.log_sin_quarter,
            log_radius=obj.log_radius,
        )
    if isinstance(obj, DiscObstacle):
        return disc_log_capacity(obj.radius)
    if isinstance(obj, SegmentObstacle):
        return segment_log_capacity(obj.length)
    if isinstance(obj, PointObstacle):
        return point_log_capacity()
    raise TypeError(f"unsupported set {obj!r}")


def _piece_is_polar(p: Obstacle) -> bool:
    if isinstance(p, PointObstacle):
        return True
    return isinstance(p, ArcObstacle) and p.point_like and p.log_sin_quarter == NEG_INF


def union_log_capacity(parts: Sequence[SetLike]) -> tuple[LogCapacity, LogCapacity]:
    """Two-sided capacity bound for a disjoint union of small sets.

    lower = max over parts (monotonicity, exact); upper_proxy combines the
    reciprocals of -log cap: -log cap(union) >= 1 / sum_j 1/(-log cap E_j),
    the subadditivity step behind the shell upper bounds.  Valid only in
    the log cap < 0 regime; parts at or above capacity 1 are rejected.
    """
    logs = []
    for part in parts:
        lv = log_capacity(part).log_value
        if lv >= 0.0:
            raise ValueError(f"union bound needs log cap < 0 for every part, got {lv}")
        logs.append(lv)
    if not logs:
        return LogCapacity(NEG_INF), LogCapacity(NEG_INF)
    lower = max(logs)
    recip_sum = 0.0
    for lv in logs:
        if lv != NEG_INF:
            recip_sum += 1.0 / (-lv)
    upper = NEG_INF if recip_sum == 0.0 else -1.0 / recip_sum
    return LogCapacity(lower), LogCapacity(upper)


# ---------------------------------------------------------------------------
# 1-D parameterizations for the optimizers


@dataclass
class _ParamPiece:
    """One parameterizable piece: a circular arc/circle or a segment."""

    kind: str  # "arc" or "segment"
    lo: float
    hi: float
    periodic: bool
    radius: float = 0.0
    center: complex = 0j
    z0: complex = 0j
    z1: complex = 0j

    @property
    def span(self) -> float:
        return self.hi - self.lo

    @property
    def arclength(self) -> float:
        return self.radius * self.span if self.kind == "arc" else self.span

    def points(self, s: np.ndarray) -> np.ndarray:
        if self.kind == "arc":
            return self.center + self.radius * np.exp(1j * s)
        direction = (self.z1 - self.z0) / abs(self.z1 - self.z0)
        return self.z0 + s * direction

    def chord_log(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        """log distance between points of THIS piece at parameters s and t."""
        if self.kind == "arc":
            with np.errstate(divide="ignore"):
                return math.log(2.0 * self.radius) + np.log(np.abs(np.sin(0.5 * (s - t))))
        with np.errstate(divide="ignore"):
            return np.log(np.abs(s - t))


def _parameterize(cs: SetLike) -> list[_ParamPiece]:
    pieces = cs.pieces if isinstance(cs, CompactSet) else (cs,)
    out: list[_ParamPiece] = []
    underflowed = False
    for p in pieces:
        if isinstance(p, PointObstacle):
            continue
        if isinstance(p, ArcObstacle):
            if p.point_like:
                # no angular extent left at float resolution; inside a wider
                # union it moves the optimum by less than one ulp, so skip it
                underflowed = underflowed or not p.degenerate
                continue
            lo, hi = p.angular_interval()
            out.append(_ParamPiece(kind="arc", lo=lo, hi=hi, periodic=p.is_full_circle, radius=p.radius))
        elif isinstance(p, DiscObstacle):
            # capacity of a closed disc equals that of its boundary circle
            out.append(
                _ParamPiece(
                    kind="arc", lo=-math.pi, hi=math.pi, periodic=True, radius=p.radius, center=p.center
                )
            )
        elif isinstance(p, SegmentObstacle):
            length = p.length
            if not (length > 1e-300) or not math.isfinite(math.log(length)):
                raise ValueError("pairwise distances underflow in linear scale; use the closed-form capacity path")
            out.append(_ParamPiece(kind="segment", lo=0.0, hi=length, periodic=False, z0=p.z0, z1=p.z1))
    if not out and underflowed:
        # non-polar set, but nothing the oracle can resolve: -inf would be a lie
        raise ValueError("pairwise distances underflow in linear scale; use the closed-form capacity path")
    return out


# ---------------------------------------------------------------------------
# Fekete oracle


@dataclass(frozen=True)
class FeketeResult:
    """Optimum of one n-point configuration search."""

    n: int
    energy: float  # max of sum_{i<j} log|z_i - z_j|
    raw_log_dn: float  # 2 E / (n (n-1)), the plain transfinite-diameter estimate
    corrected_log_dn: float  # raw with the (n/2) log n normalization removed
    points: tuple[complex, ...]
    sweeps: int
    n_starts: int


def _allocate(lengths: Sequence[float], n: int) -> list[int]:
    m = len(lengths)
    if n < m:
        raise ValueError(f"need at least one point per piece: n={n} < {m} pieces")
    total = float(sum(lengths))
    counts = [1] * m
    # largest-remainder top-up toward proportional-to-arclength
    remaining = n - m
    quota = [n * L / total for L in lengths]
    while remaining > 0:
        deficits = [quota[i] - counts[i] for i in range(m)]
        i = max(range(m), key=lambda j: (deficits[j], -j))
        counts[i] += 1
        remaining -= 1
    return counts


class _Configuration:
    """Mutable n-point state over a multi-piece parameterization."""

    def __init__(self, pieces: list[_ParamPiece], params: list[np.ndarray]):
        self.pieces = pieces
        self.params = [np.asarray(p, dtype=float) for p in params]
        self.positions = [pc.points(p) for pc, p in zip(self.pieces, self.params)]

    def energy(self) -> float:
        E = 0.0
        for pi, (pc, th) in enumerate(zip(self.pieces, self.params)):
            if len(th) >= 2:
                i, j = np.triu_indices(len(th), k=1)
                E += float(np.sum(pc.chord_log(th[i], th[j])))
            for qj in range(pi + 1, len(self.pieces)):
                d = np.abs(self.positions[pi][:, None] - self.positions[qj][None, :])
                with np.errstate(divide="ignore"):
                    E += float(np.sum(np.log(d)))
        return E

    def _objective(self, pi: int, idx: int) -> Callable[[float], float]:
        pc = self.pieces[pi]
        th_others = np.delete(self.params[pi], idx)
        foreign = [self.positions[qj] for qj in range(len(self.pieces)) if qj != pi]
        flat_foreign = np.concatenate(foreign) if foreign else np.empty(0, dtype=complex)

        def f(s: float) -> float:
            val = float(np.sum(pc.chord_log(np.float64(s), th_others))) if th_others.size else 0.0
            if flat_foreign.size:
                z = pc.points(np.asarray([s]))[0]
                with np.errstate(divide="ignore"):
                    val += float(np.sum(np.log(np.abs(z - flat_foreign))))
            return val

        return f

    def sweep(self) -> float:
        """One pass of per-point golden-section refinement; returns the gain."""
        gained = 0.0
        for pi, pc in enumerate(self.pieces):
            th = self.params[pi]
            npts = len(th)
            order = np.argsort(th, kind="stable")
            tol = 1e-11 * max(pc.span, 1e-30)
            for rank, idx in enumerate(order):
                f = self._objective(pi, idx)
                if npts == 1:
                    lo_b, hi_b = pc.lo, pc.hi
                elif pc.periodic:
                    left = th[order[rank - 1]] if rank > 0 else th[order[-1]] - 2.0 * math.pi
                    right = th[order[rank + 1]] if rank + 1 < npts else th[order[0]] + 2.0 * math.pi
                    lo_b, hi_b = left, right
                else:
                    lo_b = th[order[rank - 1]] if rank > 0 else pc.lo
                    hi_b = th[order[rank + 1]] if rank + 1 < npts else pc.hi
                if hi_b - lo_b <= tol:
                    continue
                f_old = f(th[idx])
                s_new = golden_max(f, lo_b, hi_b, tol)
                f_new = f(s_new)
                if f_new > f_old:
                    th[idx] = s_new
                    self.positions[pi][idx] = pc.points(np.asarray([s_new]))[0]
                    gained += f_new - f_old
        return gained


def _seeded_params(pieces: list[_ParamPiece], counts: Sequence[int], rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for pc, cnt in zip(pieces, counts):
        jitter = rng.uniform(0.2, 0.8, size=cnt)
        th = pc.lo + pc.span * (np.arange(cnt) + jitter) / cnt
        out.append(np.sort(th))
    return out


SWEEP_GAIN_STOP = 1e-10
_PHASE1_SWEEPS = 40
_MAX_SWEEPS = 600
_N_STARTS = 8


def _optimize(cs: SetLike, n: int, seed: int, n_starts: int = _N_STARTS) -> FeketeResult:
    pieces = _parameterize(cs)
    if not pieces:
        raise ValueError("polar set has no Fekete configuration")
    counts = _allocate([pc.arclength for pc in pieces], n)

    # phase 1: run every start a bounded number of sweeps, keep states
    survivors: list[tuple[float, _Configuration, int, bool]] = []
    for s_idx in range(n_starts):
        rng = np.random.default_rng((int(seed), s_idx))
        cfg = _Configuration(pieces, _seeded_params(pieces, counts, rng))
        done = False
        sweeps = 0
        for _ in range(_PHASE1_SWEEPS):
            gain = cfg.sweep()
            sweeps += 1
            if gain < SWEEP_GAIN_STOP:
                done = True
                break
        survivors.append((cfg.energy(), cfg, sweeps, done))

    # phase 2: only the best start refines to convergence
    best_idx = max(range(n_starts), key=lambda i: (survivors[i][0], -i))
    energy, cfg, sweeps, done = survivors[best_idx]
    while not done and sweeps < _MAX_SWEEPS:
        gain = cfg.sweep()
        sweeps += 1
        if gain < SWEEP_GAIN_STOP:
            done = True
    energy = cfg.energy()

    pts = tuple(complex(z) for z in np.concatenate(cfg.positions))
    pair_count = n * (n - 1) / 2.0
    raw = energy / pair_count
    corrected = (energy - 0.5 * n * math.log(n)) / pair_count
    return FeketeResult(
        n=n,
        energy=energy,
        raw_log_dn=raw,
        corrected_log_dn=corrected,
        points=pts,
        sweeps=sweeps,
        n_starts=n_starts,
    )


def fekete_points(cs: SetLike, n: int, seed: int = 0) -> FeketeResult:
    """Best found n-point Fekete configuration (deterministic per seed)."""
    if n < 2:
        raise ValueError("need n >= 2 points")
    if isinstance(cs, CompactSet) and cs.is_polar:
        raise ValueError("polar set has no Fekete configuration")
    return _optimize(cs, n, seed)


def fekete_log_capacity(cs: SetLike, n: int, seed: int = 0) -> LogCapacity:
    """Transfinite-diameter estimate of log cap from an n-point optimum.

    The plain log d_n estimator carries an O(log n / n) excess; the returned
    value removes the (n/2) log n normalization (exact for circles) and
    Richardson-extrapolates the remaining O(1/n) bias against a half-size
    run.  The raw monotone d_n sequence stays available via fekete_points.
    """
    if isinstance(cs, CompactSet) and cs.is_polar:
        return LogCapacity(NEG_INF)
    if isinstance(cs, PointObstacle) or (isinstance(cs, ArcObstacle) and cs.degenerate):
        return LogCapacity(NEG_INF)
    if n < 2:
        raise ValueError("need n >= 2 points")
    fine = _optimize(cs, n, seed)
    if n >= 8:
        coarse = _optimize(cs, n // 2, seed)
        est = 2.0 * fine.corrected_log_dn - coarse.corrected_log_dn
    else:
        est = fine.corrected_log_dn
    return LogCapacity(est)


# ---------------------------------------------------------------------------
# equilibrium measure by midpoint-cell discretization


class EquilibriumError(RuntimeError):
    """Raised when the simplex ascent stalls; carries the best iterate."""

    def __init__(self, message: str, measure: DiscreteMeasure, gap: float):
        super().__init__(message)
        self.measure = measure
        self.gap = gap


def _cells(cs: SetLike, m: int) -> tuple[np.ndarray, np.ndarray, list[tuple[_ParamPiece, np.ndarray]]]:
    pieces = _parameterize(cs)
    if not pieces:
        raise ValueError("equilibrium measure undefined on a polar set")
    counts = _allocate([pc.arclength for pc in pieces], m)
    mids: list[np.ndarray] = []
    lengths: list[np.ndarray] = []
    located: list[tuple[_ParamPiece, np.ndarray]] = []
    for pc, cnt in zip(pieces, counts):
        edges = np.linspace(pc.lo, pc.hi, cnt + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        cell_len = (pc.span / cnt) * (pc.radius if pc.kind == "arc" else 1.0)
        mids.append(mid)
        lengths.append(np.full(cnt, cell_len))
        located.append((pc, mid))
    return np.concatenate(mids), np.concatenate(lengths), located


def _energy_matrix(located: list[tuple[_ParamPiece, np.ndarray]], lengths: np.ndarray) -> np.ndarray:
    blocks: list[np.ndarray] = [pc.points(mid) for pc, mid in located]
    z = np.concatenate(blocks)
    n = len(z)
    with np.errstate(divide="ignore"):
        K = np.log(np.abs(z[:, None] - z[None, :]))
    # same-piece sub-blocks via chord logs (the linear subtraction above is
    # fine across pieces but loses digits for near-coincident same-circle points)
    offset = 0
    for pc, mid in located:
        cnt = len(mid)
        sl = slice(offset, offset + cnt)
        K[sl, sl] = pc.chord_log(mid[:, None], mid[None, :])
        offset += cnt
    # diagonal: self-energy of the uniform measure on one flat cell of length l,
    # which is log(l) - 3/2; this vanishes from the total as m grows
    np.fill_diagonal(K, np.log(lengths) - 1.5)
    return K


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, len(v) + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _solve_weights(K: np.ndarray, seed: int) -> tuple[np.ndarray, float]:
    """Maximize w^T K w over the probability simplex.

    The interior stationarity condition is K w = const; when that solve
    lands inside the simplex it is the exact discrete optimum (the log
    kernel makes the form concave there).  Otherwise fall back to projected
    gradient ascent.  Returns the weights and a KKT-gap proxy.
    """
    n = K.shape[0]
    try:
        w = np.linalg.solve(K, np.ones(n))
        s = float(np.sum(w))
        if s != 0.0:
            w = w / s
            if np.all(w >= -1e-12):
                w = np.maximum(w, 0.0)
                return w / np.sum(w), 0.0
    except np.linalg.LinAlgError:
        pass
    rng = np.random.default_rng(seed)
    w = _project_simplex(np.full(n, 1.0 / n) + 1e-3 * rng.uniform(-0.5 / n, 0.5 / n, size=n))
    energy = float(w @ K @ w)
    step = 1.0
    for _ in range(5000):
        grad = 2.0 * K @ w
        cand = _project_simplex(w + step * grad)
        e_cand = float(cand @ K @ cand)
        if e_cand > energy:
            gain = e_cand - energy
            w, energy = cand, e_cand
            step *= 1.3
            if gain < 1e-14 * (1.0 + abs(energy)):
                break
        else:
            step *= 0.5
            if step < 1e-18:
                break
    grad = 2.0 * K @ w
    # at the optimum every coordinate direction scores <= the attained value
    gap = float(np.max(grad) - w @ grad)
    return w, gap


def _equilibrium_once(cs: SetLike, m: int, seed: int) -> tuple[float, DiscreteMeasure]:
    mids, lengths, located = _cells(cs, m)
    K = _energy_matrix(located, lengths)
    w, gap = _solve_weights(K, seed)
    z = np.concatenate([pc.points(mid) for pc, mid in located])
    energy = float(w @ K @ w)
    measure = DiscreteMeasure(points=tuple(complex(v) for v in z), weights=tuple(float(x) for x in w))
    if gap > 1e-6 * (1.0 + abs(energy)):
        raise EquilibriumError(
            f"simplex ascent stalled with optimality gap {gap:.3e} after the iteration budget",
            measure,
            gap,
        )
    return energy, measure


def equilibrium_energy(cs: SetLike, m: int, seed: int = 0) -> tuple[EnergyValue, DiscreteMeasure]:
    """Discretized equilibrium measure and its logarithmic energy.

    The set is cut into m midpoint cells; cell interactions use midpoint
    log distances and each cell carries its own uniform self-energy on the
    diagonal.  The declared tolerance compares against a half-resolution
    solve, so callers can judge the discretization error without guessing.
    """
    if isinstance(cs, CompactSet) and cs.is_polar:
        raise ValueError("polar set rejected: no equilibrium measure exists")
    if m < 8:
        raise ValueError("need m >= 8 support candidates")
    energy, measure = _equilibrium_once(cs, m, seed)
    coarse_energy, _ = _equilibrium_once(cs, max(8, m // 2), seed)
    tol = 2.0 * abs(energy - coarse_energy) + 1e-3
    return EnergyValue(value=energy, tolerance=tol), measure

