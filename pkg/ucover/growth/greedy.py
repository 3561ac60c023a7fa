"""Greedy covering of the liminf sets G_{l,i} by the index sets I_i and J_i.

Level l starts from I_l = {1..n_l}, J_l empty. A new sample k in (n_i, n_{i+1}]
whose ball B(omega_k, l_{n_{i+1}}) meets H_i (the union of the l_{n_i}-balls
around I_i and J_i) joins I_{i+1} when its nearest center is closer than
l_{n_i} + l_{n_{i+2}}, and J_{i+1} otherwise.
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial import cKDTree

from ucover.bounds.formulas import lambda_matrix
from ucover.core import CriticalScale, Stream
from ucover.covering.grid import check_grid_bits, union_mask
from ucover.errors import ContractViolation, DomainError, ResourceLimitError
from ucover.growth.ladder import ladder_indices

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["i", "n_i", "N_i", "Q_i", "predicted", "cumulative"]


class LevelCount(BaseModel):
    """Counts at one level of the construction."""

    i: int
    n_i: int
    N_i: int = Field(..., description="#I_i")
    Q_i: int = Field(..., description="#J_i")
    T_next: Optional[int] = Field(default=None, description="#T_{i+1}")


class CoverGrowthTrace(BaseModel):
    """Counts of the greedy cover per level, with the predicted growth."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    theta: float
    c: float
    d: int
    l: int
    seed: int = 0
    ladder: List[int] = Field(..., description="n_0 .. n_{i_max+1}")
    levels: List[LevelCount]
    predicted: List[float] = Field(..., description="n_l Lambda^(i-l) per level")
    fitted_rate: float = Field(..., description="Slope of log(N_i + Q_i) against i - l")
    i_sets: Dict[int, np.ndarray] = Field(default_factory=dict, exclude=True)
    j_sets: Dict[int, np.ndarray] = Field(default_factory=dict, exclude=True)

    @property
    def i_max(self) -> int:
        """Last level constructed."""
        return self.levels[-1].i

    def csv_rows(self) -> List[list]:
        """Rows (i, n_i, N_i, Q_i, predicted, cumulative)."""
        return [
            [lv.i, lv.n_i, lv.N_i, lv.Q_i, pred, lv.N_i + lv.Q_i]
            for lv, pred in zip(self.levels, self.predicted)
        ]


def _fit_rate(levels: Sequence[LevelCount], l: int) -> float:
    if len(levels) < 2:
        return 0.0
    x = np.array([lv.i - l for lv in levels], dtype=np.float64)
    y = np.log([lv.N_i + lv.Q_i for lv in levels])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def greedy_cover_trace(
    stream: Stream, c: float, d: int, theta: float, l: int, i_max: int
) -> CoverGrowthTrace:
    """Build I_i and J_i for i = l..i_max and record their sizes.

    Args:
        stream: Sample stream on T^d
        c: Scale constant of l_n = c n^(-1/d)
        d: Dimension
        theta: Ladder ratio
        l: First level
        i_max: Last level

    Returns:
        CoverGrowthTrace with the index sets attached
    """
    if stream.d != d:
        raise ContractViolation(f"stream of dimension {stream.d} for d={d}")
    if l < 1 or i_max < l:
        raise DomainError(f"need 1 <= l <= i_max, got l={l}, i_max={i_max}")

    n = ladder_indices(theta, i_max + 1)
    if n[i_max] > stream.capacity:
        raise ResourceLimitError(f"ladder index {n[i_max]} beyond stream capacity {stream.capacity}")
    schedule = CriticalScale(c=c, d=d)
    radius = {j: schedule.radius_at(n[j]) for j in range(l, i_max + 2)}
    points = stream.block(1, n[i_max] + 1)

    members = np.arange(1, n[l] + 1, dtype=np.int64)
    i_sets = {l: members}
    j_sets = {l: np.empty(0, dtype=np.int64)}
    levels: List[LevelCount] = []

    for i in range(l, i_max + 1):
        current_i, current_j = i_sets[i], j_sets[i]
        if i == i_max:
            levels.append(LevelCount(i=i, n_i=n[i], N_i=len(current_i), Q_i=len(current_j)))
            break

        centers = np.concatenate([current_i, current_j])
        tree = cKDTree(points[centers - 1], boxsize=1.0)
        candidates = np.arange(n[i] + 1, n[i + 1] + 1, dtype=np.int64)
        nearest, _ = tree.query(points[candidates - 1], k=1, p=np.inf)

        far_edge = radius[i] + radius[i + 1]
        near_edge = radius[i] + radius[i + 2]
        meets = nearest < far_edge
        t_new = candidates[meets & (nearest < near_edge)]
        j_new = candidates[meets & (nearest >= near_edge)]

        if np.intersect1d(t_new, j_new).size:
            raise ContractViolation(f"T and J overlap at level {i + 1}")
        levels.append(
            LevelCount(i=i, n_i=n[i], N_i=len(current_i), Q_i=len(current_j), T_next=len(t_new))
        )
        i_sets[i + 1] = np.concatenate([current_i, t_new])
        j_sets[i + 1] = j_new

    lam = lambda_matrix(c, d, theta).lam
    predicted = [n[l] * lam ** (lv.i - l) for lv in levels]
    trace = CoverGrowthTrace(
        theta=theta,
        c=c,
        d=d,
        l=l,
        seed=stream.seed,
        ladder=n,
        levels=levels,
        predicted=predicted,
        fitted_rate=_fit_rate(levels, l),
        i_sets=i_sets,
        j_sets=j_sets,
    )
    logger.debug(
        f"Greedy cover l={l}..{i_max}: final size {levels[-1].N_i + levels[-1].Q_i}, "
        f"rate {trace.fitted_rate:.4f} vs log Lambda {np.log(lam):.4f}"
    )
    return trace


class ContainmentLevel(BaseModel):
    """Escaping cell centers at one level."""

    i: int
    cover_escapes: int = Field(..., description="Centers of G_{l,i} outside H_i")
    tail_escapes: int = Field(
        ..., description="Centers of G_{l,i} near some omega_k, k <= n_i, but not near I_i"
    )
    r: float = Field(..., description="Radius used for the tail check")


class ContainmentReport(BaseModel):
    """Grid check of the two covering claims over all levels of a trace."""

    m: int
    levels: List[ContainmentLevel]

    @property
    def total_escapes(self) -> int:
        """Escaping centers summed over levels and both claims."""
        return sum(lv.cover_escapes + lv.tail_escapes for lv in self.levels)


def containment_check(
    trace: CoverGrowthTrace, stream: Stream, m: int, r: Optional[float] = None
) -> ContainmentReport:
    """Check G_{l,i} inside H_i, and the I_i-cover of G_{l,i} at radius r <= l_{n_{i+1}}, on a grid.

    Args:
        trace: Output of greedy_cover_trace on the same stream
        stream: Sample stream
        m: Resolution bits per axis
        r: Tail radius; defaults to l_{n_{i+1}} at each level and is capped by it

    Returns:
        ContainmentReport with escape counts per level
    """
    d = trace.d
    check_grid_bits(d, m)
    schedule = CriticalScale(c=trace.c, d=d)
    n = trace.ladder
    l = trace.l
    points = stream.block(1, n[trace.i_max] + 1)

    g = np.ones((1 << m,) * d, dtype=bool)
    levels: List[ContainmentLevel] = []
    for level in trace.levels:
        i = level.i
        radius_i = schedule.radius_at(n[i])
        g &= union_mask(points[: n[i]], radius_i, m)

        cover = np.concatenate([trace.i_sets[i], trace.j_sets[i]])
        h = union_mask(points[cover - 1], radius_i, m)
        cover_escapes = int(np.count_nonzero(g & ~h))

        cap = schedule.radius_at(n[i + 1])
        tail_r = cap if r is None else min(r, cap)
        near_any = union_mask(points[: n[i]], tail_r, m)
        near_i = union_mask(points[trace.i_sets[i] - 1], tail_r, m)
        tail_escapes = int(np.count_nonzero(g & near_any & ~near_i))

        levels.append(
            ContainmentLevel(i=i, cover_escapes=cover_escapes, tail_escapes=tail_escapes, r=tail_r)
        )

    report = ContainmentReport(m=m, levels=levels)
    logger.debug(f"Containment check l={l} m={m}: {report.total_escapes} escaping centers")
    return report


class RecursionLevel(BaseModel):
    """Trial-mean residuals of the count recursion at one step i -> i+1."""

    i: int
    mean_n: float
    mean_q: float
    coeff_t: float = Field(..., description="2^d (l_{n_i} + l_{n_{i+2}})^d (n_{i+1} - n_i)")
    coeff_j: float = Field(
        ..., description="2^d ((l_{n_i} + l_{n_{i+1}})^d - (l_{n_i} + l_{n_{i+2}})^d) (n_{i+1} - n_i)"
    )
    residual_n: float = Field(..., description="Mean of N_{i+1} - N_i - coeff_t (N_i + Q_i)")
    residual_q: float = Field(..., description="Mean of Q_{i+1} - coeff_j (N_i + Q_i)")
    slack_n: float
    slack_q: float
    holds: bool


class RecursionReport(BaseModel):
    """Per-level comparison of trial means with the linear count recursion."""

    theta: float
    c: float
    d: int
    big_theta: float
    delta: float
    lam: float
    trials: int
    levels: List[RecursionLevel]

    @property
    def holds(self) -> bool:
        """Every level within its 3-sigma slack."""
        return all(lv.holds for lv in self.levels)


def _sem(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def recursion_check(
    traces: Sequence[CoverGrowthTrace], c: float, d: int, theta: float
) -> RecursionReport:
    """Compare trial means of (N_{i+1}, Q_{i+1}) with the recursion driven by (N_i, Q_i).

    The per-level coefficients reduce to Theta and Delta when the ladder is
    exactly theta^j.

    Raises:
        ContractViolation: If the traces are empty or disagree on their levels
    """
    if not traces:
        raise ContractViolation("recursion check needs at least one trace")
    shape = [lv.i for lv in traces[0].levels]
    if any([lv.i for lv in t.levels] != shape for t in traces):
        raise ContractViolation("traces cover different levels")

    schedule = CriticalScale(c=c, d=d)
    n = traces[0].ladder
    counts_n = np.array([[lv.N_i for lv in t.levels] for t in traces], dtype=np.float64)
    counts_q = np.array([[lv.Q_i for lv in t.levels] for t in traces], dtype=np.float64)

    levels: List[RecursionLevel] = []
    for step, i in enumerate(shape[:-1]):
        r_i, r_next, r_skip = (schedule.radius_at(n[j]) for j in (i, i + 1, i + 2))
        width = n[i + 1] - n[i]
        coeff_t = 2.0**d * (r_i + r_skip) ** d * width
        coeff_j = 2.0**d * ((r_i + r_next) ** d - (r_i + r_skip) ** d) * width
        total = counts_n[:, step] + counts_q[:, step]
        res_n = counts_n[:, step + 1] - counts_n[:, step] - coeff_t * total
        res_q = counts_q[:, step + 1] - coeff_j * total
        slack_n, slack_q = 3.0 * _sem(res_n), 3.0 * _sem(res_q)
        levels.append(
            RecursionLevel(
                i=i,
                mean_n=float(counts_n[:, step + 1].mean()),
                mean_q=float(counts_q[:, step + 1].mean()),
                coeff_t=coeff_t,
                coeff_j=coeff_j,
                residual_n=float(res_n.mean()),
                residual_q=float(res_q.mean()),
                slack_n=slack_n,
                slack_q=slack_q,
                holds=bool(res_n.mean() <= slack_n and res_q.mean() <= slack_q),
            )
        )

    entries = lambda_matrix(c, d, theta)
    return RecursionReport(
        theta=theta,
        c=c,
        d=d,
        big_theta=entries.big_theta,
        delta=entries.delta,
        lam=entries.lam,
        trials=len(traces),
        levels=levels,
    )
