"""Growth-scale analysis of entire functions.

Maximum and minimum modulus on circles, the threshold ladder M^n(R),
order and lower-order estimation from coefficients, gap structure of
the exponent sequence, and the growth inequalities (convexity, AHr,
small growth, minimum-modulus condition) that feed the certifiers.

Everything here speaks Magnitude so radii and moduli can leave the
double range without losing comparability; sampled estimates (circle
maxima and minima) are one-sided by construction and documented as
such on each operation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

from fastescape.functions import EntireFunction, OverflowSignal, safe_abs
from fastescape.magnitude import LOG_OVERFLOW, Magnitude

VERDICT_HOLDS = "holds-empirically"
VERDICT_FAILS = "fails"
VERDICT_INCONCLUSIVE = "inconclusive"

SCAN_TESTS = ("convexity", "ahr", "small_growth", "min_condition")

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0
_ANGLE_TOL = 1e-10
_SUP_SCAN_CAP = 5_000_000
_GRID_RATIO_MIN_R = 1.05
_GRID_RATIO_REGULAR = 1.02
_DELTA = 0.01


def _check_radius(r: float) -> float:
    r = float(r)
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError(f"radius must be positive and finite, got {r!r}")
    return r


def _check_samples(samples: int) -> int:
    samples = int(samples)
    if samples < 16:
        raise ValueError(f"need at least 16 circle samples, got {samples}")
    return samples


def _modulus_at(f: EntireFunction, r: float, theta: float) -> Magnitude:
    z = complex(r * math.cos(theta), r * math.sin(theta))
    try:
        w = f.evaluate(z)
    except OverflowSignal as sig:
        return sig.magnitude
    return Magnitude.from_real(safe_abs(w.real, w.imag))


def _refine_angle(
    objective: Callable[[float], Magnitude],
    lo: float,
    hi: float,
    maximize: bool,
) -> Magnitude:
    """Golden-section refinement of a circle extremum to angular width 1e-10."""

    def better(a: Magnitude, b: Magnitude) -> bool:
        return a > b if maximize else a < b

    c = hi - _GOLD * (hi - lo)
    d = lo + _GOLD * (hi - lo)
    fc = objective(c)
    fd = objective(d)
    best = fc if better(fc, fd) else fd
    while hi - lo > _ANGLE_TOL:
        if better(fc, fd):
            hi, d, fd = d, c, fc
            c = hi - _GOLD * (hi - lo)
            fc = objective(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLD * (hi - lo)
            fd = objective(d)
        cand = fc if better(fc, fd) else fd
        if better(cand, best):
            best = cand
    return best


def _sampled_extremum(
    f: EntireFunction, r: float, samples: int, maximize: bool
) -> Magnitude:
    step = 2.0 * math.pi / samples
    values = [_modulus_at(f, r, j * step) for j in range(samples)]
    if maximize:
        best_j = max(range(samples), key=lambda j: values[j])
    else:
        best_j = min(range(samples), key=lambda j: values[j])
    best = values[best_j]
    refined = _refine_angle(
        lambda theta: _modulus_at(f, r, theta),
        (best_j - 1) * step,
        (best_j + 1) * step,
        maximize,
    )
    if (refined > best) == maximize and refined != best:
        return refined
    return best


def max_modulus(f: EntireFunction, r: float, samples: int = 64) -> Magnitude:
    """M(r) = max |f(z)| on |z| = r.

    Exact for positive-coefficient functions (there M(r) = f(r)); otherwise
    a lower estimate from `samples` equally spaced circle points with
    golden-section refinement of the best angle.
    """
    r = _check_radius(r)
    samples = _check_samples(samples)
    if f.positive_coefficients:
        if f.log_maxmod is not None:
            return Magnitude.from_log(f.log_maxmod(math.log(r)))
        try:
            w = f.evaluate(complex(r, 0.0))
        except OverflowSignal as sig:
            return sig.magnitude
        return Magnitude.from_real(safe_abs(w.real, w.imag))
    return _sampled_extremum(f, r, samples, maximize=True)


def min_modulus(f: EntireFunction, r: float, samples: int = 64) -> Magnitude:
    """m(r) = min |f(z)| on |z| = r: a sampled upper estimate (same scheme)."""
    r = _check_radius(r)
    samples = _check_samples(samples)
    return _sampled_extremum(f, r, samples, maximize=False)


def series_sup_term(f: EntireFunction, r: float) -> tuple[Magnitude, int]:
    """The maximal term mu(r) = sup_n |a_n| r^n and its central index N(r).

    N(r) is the largest maximizing exponent; the scan stops once terms have
    decayed for 50 consecutive indices past the running maximum.
    """
    r = _check_radius(r)
    if not f.has_coefficients:
        raise ValueError(f"{f.name}: coefficients unavailable")
    log_r = math.log(r)
    best = -math.inf
    best_e = 0
    decay = 0
    count = 0
    for e, log_a, _sign in f.terms():
        t = log_a + e * log_r
        if t > best:
            best, best_e, decay = t, e, 0
        elif t == best:
            best_e, decay = e, 0
        else:
            decay += 1
            if decay >= 50:
                break
        count += 1
        if count > _SUP_SCAN_CAP:
            raise ValueError(f"{f.name}: sup-term scan did not stabilize")
    if best == -math.inf:
        raise ValueError(f"{f.name}: no nonzero coefficients")
    return Magnitude.from_log(best), best_e


def _log_of(m: Magnitude) -> float:
    """log of a Magnitude as a double; defined up to tower depth 1."""
    if m.depth == 0:
        if m.mantissa <= 0.0:
            return -math.inf
        return math.log(m.mantissa)
    if m.depth == 1:
        return m.mantissa
    raise ValueError("logarithm exceeds the double range")


@dataclass(frozen=True)
class ThresholdLadder:
    """The iterated maximum-modulus sequence M^n(R), n = 0..depth.

    ``rungs[0]`` denotes R; rungs are strictly increasing.  ``truncated_at``
    is the index of the last computed rung when the requested depth was cut
    short (rungs beyond tower depth 1 with no closed form are not invented).
    ``samples_used`` is 0 on the exact (positive-coefficient) path.
    """

    R: float
    rungs: tuple[Magnitude, ...]
    function_name: str
    samples_used: int
    requested_depth: int
    truncated_at: int | None = None

    @property
    def depth(self) -> int:
        return len(self.rungs) - 1

    def rung(self, n: int) -> Magnitude:
        if not 0 <= n < len(self.rungs):
            raise IndexError(f"ladder holds rungs 0..{self.depth}, asked for {n}")
        return self.rungs[n]


def build_ladder(
    f: EntireFunction, R: float, N: int, samples: int = 64
) -> ThresholdLadder:
    """Iterate M from R: rungs [R, M(R), M^2(R), ..., M^N(R)].

    Validates the standing assumption M(r) > r on 64 log-spaced radii in
    [R, max(1e8, 1e6 R)] before iterating.  Once a rung leaves the double
    range the walk continues through the function's tower map or positive
    log-modulus rule; without one the ladder truncates honestly.
    """
    R = _check_radius(R)
    N = int(N)
    if N < 1:
        raise ValueError(f"ladder depth must be >= 1, got {N}")
    r_big = max(1e8, R * 1e6)
    lo, hi = math.log(R), math.log(r_big)
    for j in range(64):
        r = math.exp(lo + (hi - lo) * j / 63)
        if not max_modulus(f, r, samples) > Magnitude.from_real(r):
            raise ValueError(
                f"R invalid: M(r) <= r at r = {r:.9g} (needs M(r) > r for r >= R)"
            )
    rungs = [Magnitude.from_real(R)]
    truncated_at = None
    for n in range(N):
        prev = rungs[-1]
        if prev.depth == 0:
            nxt = max_modulus(f, prev.mantissa, samples)
        elif f.maxmod_pair is not None:
            nxt = Magnitude(*f.maxmod_pair(prev.depth, prev.mantissa))
        elif f.log_maxmod is not None and prev.depth == 1:
            try:
                nxt = Magnitude.from_log(f.log_maxmod(prev.mantissa))
            except OverflowError:
                truncated_at = n
                break
        else:
            truncated_at = n
            break
        if not nxt > prev:
            raise ValueError(
                f"R invalid: ladder not strictly increasing at rung {n + 1}"
            )
        rungs.append(nxt)
    return ThresholdLadder(
        R=R,
        rungs=tuple(rungs),
        function_name=f.name,
        samples_used=0 if f.positive_coefficients else samples,
        requested_depth=N,
        truncated_at=truncated_at,
    )


def find_min_R(f: EntireFunction, search_max: float = 1e6, samples: int = 64) -> float:
    """Smallest grid radius R* with M(r) > r at every grid point >= R*.

    The grid is geometric with ratio 1.05 on [1, search_max].
    """
    search_max = float(search_max)
    if not search_max > 1.0:
        raise ValueError(f"search_max must exceed 1, got {search_max!r}")
    grid = [1.0]
    while grid[-1] * _GRID_RATIO_MIN_R <= search_max:
        grid.append(grid[-1] * _GRID_RATIO_MIN_R)
    last_bad = -1
    for i, r in enumerate(grid):
        if not max_modulus(f, r, samples) > Magnitude.from_real(r):
            last_bad = i
    if last_bad == len(grid) - 1:
        raise ValueError(f"no valid R found below search_max = {search_max:.9g}")
    return grid[last_bad + 1]


def _collect_terms(f: EntireFunction, n_max: int) -> list[tuple[int, float]]:
    """Nonzero (exponent, log |a_n|) pairs with exponent <= n_max."""
    if not f.has_coefficients:
        raise ValueError(f"{f.name}: coefficients unavailable")
    pts = []
    for e, log_a, _sign in f.terms():
        if e > n_max:
            break
        pts.append((e, log_a))
    return pts


def _regression_order(pts: list[tuple[int, float]]) -> float:
    """1 / slope of ln(1/|a_n|)/n against ln n, the order of the series.

    For order-rho functions ln(1/|a_n|) grows like (n/rho) ln n, so the
    fitted slope converges to 1/rho much faster than the pointwise ratio
    n ln n / ln(1/|a_n|) does.
    """
    xs = [math.log(e) for e, _ in pts]
    ys = [-log_a / e for e, log_a in pts]
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    if sxx == 0.0:
        return math.inf
    slope = sxy / sxx
    if slope <= 0.0:
        return math.inf
    return 1.0 / slope


def _lower_hull(pts: list[tuple[int, float]]) -> list[tuple[int, float]]:
    """Vertices of the lower convex hull of (n, ln 1/|a_n|), by n."""

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    hull: list[tuple[int, float]] = []
    for p in pts:
        while len(hull) >= 2 and cross(hull[-2], hull[-1], p) <= 0.0:
            hull.pop()
        hull.append(p)
    return hull


def order_estimate(f: EntireFunction, n_max: int = 2000) -> tuple[float, float]:
    """(order, lower order) from the coefficient decay.

    Order: regression fit over the nonzero exponents in [n_max/2, n_max]
    (widened to the last 10 nonzero exponents when the window is thin).
    Lower order: the minimum of the secant-based local estimates along the
    principal indices (lower-convex-minorant vertices of (n, ln 1/|a_n|)),
    clamped to [0, order].
    """
    n_max = int(n_max)
    if n_max < 100:
        raise ValueError(f"n_max must be >= 100, got {n_max}")
    pts = [(e, la) for e, la in _collect_terms(f, n_max) if e >= 2]
    if len(pts) < 10:
        raise ValueError(
            f"{f.name}: fewer than 10 nonzero coefficients below n_max = {n_max}"
        )
    window = [(e, la) for e, la in pts if e >= n_max // 2]
    if len(window) < 10:
        window = pts[-10:]
    order = _regression_order(window)

    hull = _lower_hull([(e, -la) for e, la in pts])
    locals_: list[tuple[int, float]] = []
    for (n0, y0), (n1, y1) in zip(hull, hull[1:]):
        dx = math.log(n1) - math.log(n0)
        dy = y1 / n1 - y0 / n0
        if dx > 0.0 and dy > 0.0:
            locals_.append((n1, dx / dy))
    tail = [est for n1, est in locals_ if n1 >= n_max // 2]
    if not tail:
        tail = [est for _n1, est in locals_[-9:]]
    lower = min(tail) if tail else order
    lower = max(0.0, min(lower, order))
    return order, lower


def maxmod_order_estimate(f: EntireFunction, samples: int = 64) -> float:
    """Order from the growth of M(r): max of ln ln M(r)/ln r on the upper
    half of 30 dyadic radii 1000 * 2^i."""
    ratios = []
    for i in range(30):
        r = 1000.0 * 2.0**i
        log_m = _log_of(max_modulus(f, r, samples))
        if log_m <= 0.0:
            ratios.append(0.0)
        else:
            ratios.append(math.log(log_m) / math.log(r))
    return max(ratios[15:])


@dataclass(frozen=True)
class GapAnalysis:
    """Structure of the nonzero-exponent sequence n_k (1-indexed)."""

    exponents: tuple[int, ...]
    ratios: tuple[float, ...]
    fabry_verdict: str
    hayman_verdict: str
    alpha: float


def gap_analysis(
    f: EntireFunction, k_max: int = 200, alpha: float = 3.0
) -> GapAnalysis:
    """Fabry (n_k/k -> infinity) and Hayman (n_k > k ln k (ln ln k)^alpha)
    gap checks over the first k_max nonzero exponents.

    Verdicts are empirical: "holds-empirically" when the trend is clean over
    the sampled range, "fails" when it is cleanly absent, "inconclusive"
    when mixed.
    """
    k_max = int(k_max)
    if k_max < 20:
        raise ValueError(f"k_max must be >= 20, got {k_max}")
    alpha = float(alpha)
    if not alpha > 2.0:
        raise ValueError(f"the Hayman check needs alpha > 2, got {alpha!r}")
    if not f.has_coefficients:
        raise ValueError(f"{f.name}: coefficients unavailable")
    exponents: list[int] = []
    for e, _log_a, _sign in f.terms():
        exponents.append(e)
        if len(exponents) >= k_max:
            break
    if len(exponents) < 20:
        raise ValueError(f"{f.name}: fewer than 20 nonzero coefficients")
    ratios = [n / k for k, n in enumerate(exponents, start=1)]

    tail = ratios[len(ratios) // 2 :]
    nondecreasing = all(b >= a - 1e-12 for a, b in zip(tail, tail[1:]))
    if nondecreasing and ratios[-1] > 10.0:
        fabry = VERDICT_HOLDS
    elif ratios[-1] <= 10.0:
        fabry = VERDICT_FAILS
    else:
        fabry = VERDICT_INCONCLUSIVE

    holds = 0
    total = 0
    for k in range(10, len(exponents) + 1):
        bound = k * math.log(k) * math.log(math.log(k)) ** alpha
        total += 1
        if exponents[k - 1] > bound:
            holds += 1
    if holds == total:
        hayman = VERDICT_HOLDS
    elif holds == 0:
        hayman = VERDICT_FAILS
    else:
        hayman = VERDICT_INCONCLUSIVE

    return GapAnalysis(
        exponents=tuple(exponents),
        ratios=tuple(ratios),
        fabry_verdict=fabry,
        hayman_verdict=hayman,
        alpha=alpha,
    )


def _iterated_log(r: float, m: int) -> float:
    v = r
    for _ in range(m):
        if v <= 0.0:
            raise ValueError(f"radius {r:.9g} too small for {m} iterated logs")
        v = math.log(v)
    return v


def growth_inequality_scan(
    f: EntireFunction,
    test: str,
    param: float,
    r_range: tuple[float, float],
    points: int = 64,
    samples: int = 64,
) -> tuple[str, list[dict]]:
    """Scan one growth inequality over log-spaced radii.

    test: "convexity" (param c > 1: log M(r^c) >= c log M(r)),
    "ahr" (param c > 0: phi'(x)/phi(x) >= (1+c)/x for phi(x) = log M(e^x),
    centered difference, h = 1e-3), "small_growth" (param integer m >= 1:
    ln ln M(r) < ln r / log^m r with the m-th iterated log), or
    "min_condition" (param m > 1: some rho in (r, r^m) has m(rho) >= M(r),
    searched over 64 log-spaced rho).

    Returns (verdict, witnesses): "holds-empirically" when no sampled radius
    violates, else "fails"; each witness records the violating radius and
    the measured quantities.
    """
    if test not in SCAN_TESTS:
        raise ValueError(f"unknown test {test!r}; known: {', '.join(SCAN_TESTS)}")
    r_lo, r_hi = float(r_range[0]), float(r_range[1])
    _check_radius(r_lo)
    if not r_hi > r_lo:
        raise ValueError(f"empty radius range [{r_lo!r}, {r_hi!r}]")
    points = int(points)
    if points < 16:
        raise ValueError(f"need at least 16 scan points, got {points}")
    param = float(param)

    lo, hi = math.log(r_lo), math.log(r_hi)
    radii = [math.exp(lo + (hi - lo) * j / (points - 1)) for j in range(points)]
    witnesses: list[dict] = []

    if test == "convexity":
        if not param > 1.0:
            raise ValueError(f"convexity needs c > 1, got {param!r}")
        for r in radii:
            lhs = _log_of(max_modulus(f, r**param, samples))
            rhs = param * _log_of(max_modulus(f, r, samples))
            if lhs < rhs - 1e-9 * abs(rhs):
                witnesses.append(
                    {"test": test, "r": r, "log_M_r_c": lhs, "c_log_M_r": rhs}
                )
    elif test == "ahr":
        if not param > 0.0:
            raise ValueError(f"ahr needs c > 0, got {param!r}")
        if r_lo <= 1.0:
            raise ValueError("ahr needs radii above 1 (phi must be positive)")
        h = 1e-3
        for r in radii:
            x = math.log(r)
            phi = _log_of(max_modulus(f, r, samples))
            phi_hi = _log_of(max_modulus(f, math.exp(x + h), samples))
            phi_lo = _log_of(max_modulus(f, math.exp(x - h), samples))
            lhs = (phi_hi - phi_lo) / (2.0 * h) / phi
            rhs = (1.0 + param) / x
            if lhs < rhs - 1e-9 * abs(rhs):
                witnesses.append({"test": test, "r": r, "phi_ratio": lhs, "target": rhs})
    elif test == "small_growth":
        m = int(param)
        if m < 1 or m != param:
            raise ValueError(f"small_growth needs an integer m >= 1, got {param!r}")
        _iterated_log(r_lo, m)  # validates the whole range (logs are monotone)
        for r in radii:
            log_m_val = _log_of(max_modulus(f, r, samples))
            if log_m_val <= 0.0:
                continue
            lhs = math.log(log_m_val)
            rhs = math.log(r) / _iterated_log(r, m)
            if not lhs < rhs:
                witnesses.append({"test": test, "r": r, "loglog_M": lhs, "bound": rhs})
    else:  # min_condition
        if not param > 1.0:
            raise ValueError(f"min_condition needs m > 1, got {param!r}")
        for r in radii:
            target = max_modulus(f, r, samples)
            x = math.log(r)
            best_rho = 0.0
            best_min: Magnitude | None = None
            found = False
            for j in range(1, 65):
                rho = math.exp(x + (param - 1.0) * x * j / 65.0)
                mm = min_modulus(f, rho, samples)
                if best_min is None or mm > best_min:
                    best_min, best_rho = mm, rho
                if mm >= target:
                    found = True
                    break
            if not found:
                witnesses.append(
                    {
                        "test": test,
                        "r": r,
                        "best_rho": best_rho,
                        "best_min_modulus": float(best_min),
                        "max_modulus": float(target),
                    }
                )

    verdict = VERDICT_HOLDS if not witnesses else VERDICT_FAILS
    return verdict, witnesses


def find_regular_sequence(
    f: EntireFunction,
    R: float,
    m: float,
    depth: int,
    samples: int = 64,
    delta: float = _DELTA,
) -> list[float]:
    """Radii r_0..r_{depth-1} with r_n > M^n(R) and M(r_n) >= r_{n+1}^m.

    Backward greedy on a geometric grid (ratio 1.02): the deepest radius is
    the smallest grid point above M^(depth-1)(R)(1+delta); walking down, r_n
    is the smallest grid point above M^n(R)(1+delta) whose M(r_n) reaches
    r_{n+1}^m (1+delta).  The safety factor delta guards the strict
    inequalities against sampling error.  Raises ValueError when some level
    admits no radius within the double range.
    """
    f.require_transcendental()
    m = float(m)
    if not m > 1.0:
        raise ValueError(f"regular growth needs m > 1, got {m!r}")
    depth = int(depth)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must be in [0, 1), got {delta!r}")
    ladder = build_ladder(f, R, depth - 1, samples)
    if ladder.truncated_at is not None or ladder.rungs[depth - 1].depth > 0:
        raise ValueError(
            f"ladder for R = {R:.9g} leaves the double range before depth {depth}"
        )
    thresholds = [rung.mantissa * (1.0 + delta) for rung in ladder.rungs]

    ln_ratio = math.log(_GRID_RATIO_REGULAR)

    def grid_above(value: float) -> tuple[int, float]:
        i = math.floor(math.log(value) / ln_ratio) + 1
        while math.pow(_GRID_RATIO_REGULAR, i) <= value:
            i += 1
        while i > 0 and math.pow(_GRID_RATIO_REGULAR, i - 1) > value:
            i -= 1
        return i, math.pow(_GRID_RATIO_REGULAR, i)

    radii = [0.0] * depth
    _, radii[depth - 1] = grid_above(thresholds[depth - 1])
    for n in range(depth - 2, -1, -1):
        need = m * math.log(radii[n + 1]) + math.log1p(delta)
        i, r = grid_above(thresholds[n])
        while True:
            if _log_of(max_modulus(f, r, samples)) >= need:
                radii[n] = r
                break
            i += 1
            if math.pow(_GRID_RATIO_REGULAR, i) >= 1e300:
                raise ValueError(
                    f"no radius for level {n} reaches M(r) >= r_{n + 1}^m "
                    "within the double range"
                )
            r = math.pow(_GRID_RATIO_REGULAR, i)
    return radii


@dataclass(frozen=True)
class GrowthReport:
    """One function's growth profile, serializable as text and JSON."""

    function_name: str
    order_estimate: float
    lower_order_estimate: float
    maxmod_order_estimate: float | None
    fabry_verdict: str
    hayman_verdict: str
    hayman_alpha: float
    ahr_verdict: str
    ahr_c: float
    small_growth_verdict: str
    small_growth_m: int
    convexity_verdict: str
    convexity_c: float
    convexity_violations: int
    witnesses: tuple[dict, ...]
    n_max: int
    k_max: int
    r_range: tuple[float, float]

    def to_json_dict(self) -> dict:
        return {
            "schema": "fastescape.growth-report/1",
            "function": self.function_name,
            "order_estimate": self.order_estimate,
            "lower_order_estimate": self.lower_order_estimate,
            "maxmod_order_estimate": self.maxmod_order_estimate,
            "fabry_verdict": self.fabry_verdict,
            "hayman_verdict": self.hayman_verdict,
            "hayman_alpha": self.hayman_alpha,
            "ahr_verdict": self.ahr_verdict,
            "ahr_c": self.ahr_c,
            "small_growth_verdict": self.small_growth_verdict,
            "small_growth_m": self.small_growth_m,
            "convexity_verdict": self.convexity_verdict,
            "convexity_c": self.convexity_c,
            "convexity_violations": self.convexity_violations,
            "witnesses": list(self.witnesses),
            "n_max": self.n_max,
            "k_max": self.k_max,
            "r_range": list(self.r_range),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        def fmt(v) -> str:
            if isinstance(v, float):
                return f"{v:.9g}"
            return str(v)

        lines = [
            f"function: {self.function_name}",
            f"order_estimate: {fmt(self.order_estimate)}",
            f"lower_order_estimate: {fmt(self.lower_order_estimate)}",
        ]
        if self.maxmod_order_estimate is not None:
            lines.append(f"maxmod_order_estimate: {fmt(self.maxmod_order_estimate)}")
        lines += [
            f"fabry_verdict: {self.fabry_verdict}",
            f"hayman_verdict: {self.hayman_verdict} (alpha = {fmt(self.hayman_alpha)})",
            f"ahr_verdict: {self.ahr_verdict} (c = {fmt(self.ahr_c)})",
            f"small_growth_verdict: {self.small_growth_verdict} (m = {self.small_growth_m})",
            f"convexity_verdict: {self.convexity_verdict} (c = {fmt(self.convexity_c)})",
            f"convexity_violations: {self.convexity_violations}",
            f"n_max: {self.n_max}",
            f"k_max: {self.k_max}",
            f"r_range: [{fmt(self.r_range[0])}, {fmt(self.r_range[1])}]",
            f"witnesses: {len(self.witnesses)}",
        ]
        for w in self.witnesses:
            parts = ", ".join(f"{k} = {fmt(v)}" for k, v in w.items() if k != "test")
            lines.append(f"  - {w['test']}: {parts}")
        return "\n".join(lines) + "\n"


def build_growth_report(
    f: EntireFunction,
    n_max: int = 2000,
    k_max: int = 200,
    alpha: float = 3.0,
    ahr_c: float = 0.5,
    small_m: int = 2,
    convexity_c: float = 2.0,
    r_range: tuple[float, float] | None = None,
    points: int = 32,
    samples: int = 64,
) -> GrowthReport:
    """Assemble the full growth profile of one function.

    The default radius range starts at max(find_min_R, 5) so the convexity
    and AHr statements are evaluated where they are meaningful (both fail
    spuriously at small radii for functions like exp).
    """
    if r_range is None:
        r_range = (max(find_min_R(f, samples=samples), 5.0), 1e6)
    order, lower = order_estimate(f, n_max)
    maxmod_order = (
        maxmod_order_estimate(f, samples) if f.positive_coefficients else None
    )
    gaps = gap_analysis(f, k_max, alpha)
    witnesses: list[dict] = []
    conv_verdict, conv_w = growth_inequality_scan(
        f, "convexity", convexity_c, r_range, points, samples
    )
    witnesses += conv_w
    ahr_verdict, ahr_w = growth_inequality_scan(
        f, "ahr", ahr_c, r_range, points, samples
    )
    witnesses += ahr_w
    small_verdict, small_w = growth_inequality_scan(
        f, "small_growth", small_m, r_range, points, samples
    )
    witnesses += small_w
    return GrowthReport(
        function_name=f.name,
        order_estimate=order,
        lower_order_estimate=lower,
        maxmod_order_estimate=maxmod_order,
        fabry_verdict=gaps.fabry_verdict,
        hayman_verdict=gaps.hayman_verdict,
        hayman_alpha=alpha,
        ahr_verdict=ahr_verdict,
        ahr_c=ahr_c,
        small_growth_verdict=small_verdict,
        small_growth_m=small_m,
        convexity_verdict=conv_verdict,
        convexity_c=convexity_c,
        convexity_violations=len(conv_w),
        witnesses=tuple(witnesses),
        n_max=n_max,
        k_max=k_max,
        r_range=(float(r_range[0]), float(r_range[1])),
    )
