"""Escape-rate analysis of the walk: theoretical rate, bound ratios, and
the two-stage quadratic/power-law fit behind the sharp rate estimate.

The baseline rate of the reflected simple walk is
rho(x, h) = sqrt(2h/pi) + x^2 / sqrt(2 pi h).  The refinement multiplies
the distance's best size proxy by (1 + beta x^2 h^(-5/4)): at each probe
time h a least-squares alpha_h captures the quadratic dependence on the
initial size, then beta is fitted on alpha_h ~ beta h^(-5/4).  The 5/4
exponent is fixed, never fitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from . import walk

CURVE_NAMES = ("dist", "size", "height", "outdegree", "strahler")

POWER_EXPONENT = 1.25  # fixed exponent of the alpha_h ~ beta / h^(5/4) law

DEFAULT_STEP_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    """The requested simulation volume exceeds the step budget."""


class FitError(ValueError):
    """Degenerate data made a fit impossible."""


def rho(x: float, h: float) -> float:
    """Asymptotic mean of the reflected simple random walk started at x."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    return math.sqrt(2.0 * h / math.pi) + x * x / math.sqrt(2.0 * math.pi * h)


def size_prediction(x: int, h: float, offset: int = 0) -> float:
    """Theoretical mean size of the walk at time h from initial size x.

    offset 0 evaluates rho at the tree size itself; offset 1 uses
    1 + rho(x - 1, h), matching size = (walk reflected at 0) + 1.  The two
    agree asymptotically.
    """
    if offset not in (0, 1):
        raise ValueError(f"offset must be 0 or 1, got {offset}")
    return rho(x, h) if offset == 0 else 1.0 + rho(x - 1, h)


def sharp_rate(x: float, h: float, beta: float) -> float:
    """Six-term expansion of the refined escape rate of the end-to-end
    distance; algebraically equal to (rho(x,h) - x) (1 + beta x^2 h^(-5/4))."""
    return (
        math.sqrt(2.0 * h / math.pi)
        - x
        + x * x / math.sqrt(2.0 * math.pi * h)
        + beta * x * x * math.sqrt(2.0 / math.pi) / h**0.75
        - beta * x**3 / h**1.25
        + beta * x**4 / (math.sqrt(2.0 * math.pi) * h**1.75)
    )


@dataclass
class MeanCurves:
    """Replicate-averaged walk observables per initial size.

    curves[x][name] is a float array over h = 0..steps for name in
    dist/size/height/outdegree/strahler.
    """

    sizes: list[int]
    steps: int
    replicates: int
    seed: int
    kernel: walk.Kernel
    curves: dict[int, dict[str, np.ndarray]] = field(default_factory=dict)


@dataclass
class EscapeModel:
    """Fitted refinement of the escape rate."""

    beta: float
    exponent: float
    alpha: dict[int, float]
    sizes: list[int]
    steps: int
    replicates: int


def _run_cell(args: tuple[int, int, int, int, str]) -> np.ndarray:
    seed, stream, x, steps, kernel_name = args
    rng = walk.rng_stream(seed, stream)
    t0 = walk.initial_tree(x, rng)
    records = walk.simulate(t0, steps, walk.Kernel(kernel_name), rng, distance="incremental")
    out = np.empty((len(CURVE_NAMES), steps + 1), dtype=np.int64)
    for h, rec in enumerate(records):
        out[0, h] = rec.dist
        out[1, h] = rec.size
        out[2, h] = rec.height
        out[3, h] = rec.outdegree
        out[4, h] = rec.strahler
    return out


def run_grid(
    sizes: list[int],
    steps: int,
    replicates: int,
    seed: int,
    kernel: walk.Kernel = walk.Kernel.BALANCED,
    jobs: int = 1,
    budget: int = DEFAULT_STEP_BUDGET,
    force: bool = False,
) -> MeanCurves:
    """Simulate ``replicates`` walks of ``steps`` moves from every initial
    size and average the observables.

    Replicate (x, i) runs on its own rng stream, so results do not depend
    on the number of workers; sums are reduced in a fixed order to keep
    the floating-point output byte-stable.
    """
    if not sizes:
        raise ValueError("no initial sizes given")
    if steps < 1 or replicates < 1:
        raise ValueError("steps and replicates must be >= 1")
    total = len(sizes) * steps * replicates
    if total > budget and not force:
        raise BudgetExceeded(
            f"{total} incremental steps exceed the budget of {budget}; "
            "pass force (or --force) to run anyway"
        )
    cells = [
        (seed, x * replicates + rep, x, steps, kernel.value)
        for x in sizes
        for rep in range(replicates)
    ]
    if jobs > 1:
        with Pool(jobs) as pool:
            results = pool.map(_run_cell, cells, chunksize=4)
    else:
        results = map(_run_cell, cells)

    out = MeanCurves(list(sizes), steps, replicates, seed, kernel)
    acc: dict[int, np.ndarray] = {
        x: np.zeros((len(CURVE_NAMES), steps + 1), dtype=np.float64) for x in sizes
    }
    for (_, _, x, _, _), arr in zip(cells, results):
        acc[x] += arr
    for x in sizes:
        acc[x] /= replicates
        out.curves[x] = {name: acc[x][i] for i, name in enumerate(CURVE_NAMES)}
    return out


def fit_alpha(curves: MeanCurves, h: int) -> float:
    """Least-squares alpha of ratio(x, h) = 1 + alpha x^2, where ratio is
    mean distance over (mean size - x) at time h."""
    if len(curves.sizes) < 3:
        raise FitError("need at least 3 initial sizes to fit alpha")
    num = 0.0
    den = 0.0
    for x in curves.sizes:
        denom = curves.curves[x]["size"][h] - x
        if denom <= 0:
            raise FitError(f"degenerate mean size at x={x}, h={h}")
        ratio = float(curves.curves[x]["dist"][h]) / float(denom)
        num += (ratio - 1.0) * x * x
        den += float(x) ** 4
    return float(num / den)


def fit_beta(alpha: dict[int, float]) -> float:
    """Closed-form least squares of alpha_h = beta h^(-5/4)."""
    if not alpha:
        raise FitError("no alpha values to fit")
    num = sum(a * h ** (-POWER_EXPONENT) for h, a in alpha.items())
    den = sum(h ** (-2 * POWER_EXPONENT) for h in alpha)
    return float(num / den)


def bound_ratios(curves: MeanCurves, h: int) -> dict[int, tuple[float, float, float]]:
    """(dist/size, dist/(size - x), dist/(size + x)) at time h, per initial
    size: how well the three size proxies track the distance."""
    out = {}
    for x in curves.sizes:
        dist = float(curves.curves[x]["dist"][h])
        size = float(curves.curves[x]["size"][h])
        if size - x == 0 or size == 0:
            raise FitError(f"degenerate mean size at x={x}, h={h}")
        out[x] = (dist / size, dist / (size - x), dist / (size + x))
    return out


def alpha_grid(steps: int, points: int = 10) -> list[int]:
    """Probe times for the alpha fits: steps/points, 2 steps/points, ..."""
    stride = max(1, steps // points)
    return sorted({stride * i for i in range(1, points + 1)} | {steps})


def fit_escape_model(curves: MeanCurves, grid: list[int] | None = None) -> EscapeModel:
    """Two-stage fit: alpha_h on the probe grid, then beta on the alphas.

    Probe times where the walk has not escaped yet (mean size still at the
    initial size) cannot be fitted and are skipped."""
    if grid is None:
        grid = alpha_grid(curves.steps)
    alpha = {}
    for h in grid:
        try:
            alpha[h] = fit_alpha(curves, h)
        except FitError:
            continue
    return EscapeModel(
        beta=fit_beta(alpha),
        exponent=POWER_EXPONENT,
        alpha=alpha,
        sizes=list(curves.sizes),
        steps=curves.steps,
        replicates=curves.replicates,
    )
