"""The function zoo: built-in entire functions, user series, and iterates.

Built-ins come in two flavours.  The four closed-form ones (``exp``,
``cosh_sq``, ``quarter_order``, ``sinh_plus_sq``) carry a *step function*
working on raw coordinate pairs; the raster kernel's compiled twin
reproduces those step functions operation for operation, so they stick to
libm-backed ``math`` calls, avoid ``**`` and ``math.hypot``, and gate all
overflow-prone branches explicitly.  The gap-type built-ins and user
series evaluate by adaptive truncated summation over their coefficient
rules.

Every function also exposes coefficient data (where defined) and, for the
closed forms, a max-modulus map acting on magnitude towers, which is what
the growth ladders and orbit propagation run on.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterator

from fastescape.magnitude import LOG_OVERFLOW, OVERFLOW, Magnitude, normalize_pair

_LN2 = 0.6931471805599453
_LN4 = 1.3862943611198906
_PI = math.pi

# a term this many nats below the running peak is < 1e-18 of the scale
_WINDOW = 41.44653167389282
_TERM_CAP = 200_000

# largest log-radius at which z itself can be reconstructed in doubles
_POLAR_DIRECT = 705.0

_MASK64 = (1 << 64) - 1


def safe_abs(x: float, y: float) -> float:
    """|x + iy| via a scaled square root.

    Hand-rolled instead of ``math.hypot`` because CPython's hypot is
    correctly rounded by a custom algorithm the compiled twin's libm call
    would not match bit for bit.
    """
    ax = math.fabs(x)
    ay = math.fabs(y)
    if ay > ax:
        ax, ay = ay, ax
    if ax == 0.0:
        return 0.0
    t = ay / ax
    return ax * math.sqrt(1.0 + t * t)


def random_sign(seed: int, n: int) -> int:
    """The n-th +-1 sign of the fixed splitmix-style generator."""
    z = (seed + n * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return 1 if (z >> 63) == 0 else -1


class OverflowSignal(Exception):
    """|f(z)| reached the top of the double range.

    ``magnitude`` is the exact log-scale modulus for a single application
    of a closed form or series; for iterates that overflow more than once
    it degrades to an upper estimate and ``phase`` becomes None.  The
    orbit logic tracks that distinction itself.
    """

    def __init__(self, magnitude: Magnitude, phase: float | None):
        super().__init__(f"modulus {magnitude} exceeds the double range")
        self.magnitude = magnitude
        self.phase = phase


# ---------------------------------------------------------------------------
# closed-form step functions (mirrored by the compiled raster kernel)

def _exp_step(x: float, y: float) -> tuple[float, float]:
    if x >= LOG_OVERFLOW:
        raise OverflowSignal(Magnitude.from_log(x), y)
    e = math.exp(x)
    return (e * math.cos(y), e * math.sin(y))


def _cosh_sq_step(x: float, y: float) -> tuple[float, float]:
    ax = math.fabs(x)
    if ax >= 346.0:
        # log|cosh^2 z| = 2(|x| - ln 2) + log1p(e^{-2|x|}(2 cos 2y + e^{-2|x|}))
        w = math.exp(-2.0 * ax) * (2.0 * math.cos(2.0 * y) + math.exp(-2.0 * ax))
        logabs = 2.0 * (ax - _LN2) + math.log1p(w)
        if logabs >= LOG_OVERFLOW:
            phase = 2.0 * y if x >= 0.0 else -2.0 * y
            raise OverflowSignal(Magnitude.from_log(logabs), phase)
        # narrow band below the cap: the direct form still fits in doubles
    a = math.cosh(x) * math.cos(y)
    b = math.sinh(x) * math.sin(y)
    return (a * a - b * b, 2.0 * a * b)


_QUARTER_COEFFS = (
    1.0,
    1.0 / 24.0,
    1.0 / 40320.0,
    1.0 / 479001600.0,
    1.0 / 20922789888000.0,
    1.0 / 2432902008176640000.0,
    1.0 / 620448401733239439360000.0,
    1.0 / 304888344611713860501504000000.0,
)


def _quarter_step(x: float, y: float) -> tuple[float, float]:
    r = safe_abs(x, y)
    if r < 1.0:
        # series in z; cancellation is harmless here and the closed form's
        # fourth root loses accuracy near the origin
        sr = _QUARTER_COEFFS[7]
        si = 0.0
        for k in range(6, -1, -1):
            tr = sr * x - si * y + _QUARTER_COEFFS[k]
            si = sr * y + si * x
            sr = tr
        return (sr, si)
    t = 0.25 * math.atan2(y, x)
    q = math.pow(r, 0.25)
    u = q * math.cos(t)
    v = q * math.sin(t)
    # principal fourth root keeps |t| <= pi/4, so u >= |v| >= 0 always
    if u >= 690.0:
        # f = (e^{iw} + e^{-iw} + e^w + e^{-w})/4, w = u + iv; peak term e^u
        e1 = math.exp(-v - u)
        e2 = math.exp(v - u)
        e4 = math.exp(-2.0 * u)
        sr = e1 * math.cos(u) + e2 * math.cos(u) + math.cos(v) + e4 * math.cos(v)
        si = e1 * math.sin(u) - e2 * math.sin(u) + math.sin(v) - e4 * math.sin(v)
        sa = safe_abs(sr, si)
        if sa == 0.0:
            return (0.0, 0.0)
        logabs = u - _LN4 + math.log(sa)
        phase = math.atan2(si, sr)
        if logabs >= LOG_OVERFLOW:
            raise OverflowSignal(Magnitude.from_log(logabs), phase)
        ea = math.exp(logabs)
        return (ea * math.cos(phase), ea * math.sin(phase))
    re = 0.5 * (math.cos(u) * math.cosh(v) + math.cosh(u) * math.cos(v))
    im = 0.5 * (math.sinh(u) * math.sin(v) - math.sin(u) * math.sinh(v))
    return (re, im)


def _sinh_sq_step(x: float, y: float) -> tuple[float, float]:
    r = safe_abs(x, y)
    if (math.fabs(x) - _LN2 >= 688.0) or (r >= 1e149):
        # f = e^z/2 - e^{-z}/2 + z^2 as three log-scale terms
        lr = math.log(r)
        t1 = x - _LN2
        t2 = -x - _LN2
        t3 = 2.0 * lr
        m = max(t1, t2, t3)
        p1 = y
        p2 = _PI - y
        p3 = 2.0 * math.atan2(y, x)
        e1 = math.exp(t1 - m)
        e2 = math.exp(t2 - m)
        e3 = math.exp(t3 - m)
        sr = e1 * math.cos(p1) + e2 * math.cos(p2) + e3 * math.cos(p3)
        si = e1 * math.sin(p1) + e2 * math.sin(p2) + e3 * math.sin(p3)
        sa = safe_abs(sr, si)
        if sa == 0.0:
            return (0.0, 0.0)
        logabs = m + math.log(sa)
        phase = math.atan2(si, sr)
        if logabs >= LOG_OVERFLOW:
            raise OverflowSignal(Magnitude.from_log(logabs), phase)
        ea = math.exp(logabs)
        return (ea * math.cos(phase), ea * math.sin(phase))
    re = math.sinh(x) * math.cos(y) + x * x - y * y
    im = math.cosh(x) * math.sin(y) + 2.0 * x * y
    return (re, im)


# ---------------------------------------------------------------------------
# max-modulus maps on magnitude towers (depth, mantissa) -> (depth, mantissa)

def _exp_maxmod(depth: int, v: float) -> tuple[int, float]:
    return normalize_pair(depth + 1, v)


def _cosh_sq_maxmod(depth: int, v: float) -> tuple[int, float]:
    if depth == 0:
        return normalize_pair(1, 2.0 * (v - _LN2 + math.log1p(math.exp(-2.0 * v))))
    if depth == 1:
        if v <= 705.0:
            return normalize_pair(1, 2.0 * math.exp(v) - 2.0 * _LN2)
        return normalize_pair(2, v + _LN2)
    return normalize_pair(depth + 1, v)


def _quarter_maxmod(depth: int, v: float) -> tuple[int, float]:
    if depth == 0:
        q = math.pow(v, 0.25)
        if q <= 300.0:
            return normalize_pair(0, 0.5 * (math.cos(q) + math.cosh(q)))
        w = math.exp(-q) * (2.0 * math.cos(q) + math.exp(-q))
        return normalize_pair(1, q - _LN4 + math.log1p(w))
    if depth == 1:
        t = 0.25 * v
        if t <= 705.0:
            return normalize_pair(1, math.exp(t) - _LN4)
        return normalize_pair(2, t)
    if depth == 2:
        return normalize_pair(3, v - _LN4)
    # deeper towers: the quarter power and the 1/4 factor are both below
    # the representation's resolution
    return normalize_pair(depth + 1, v)


def _sinh_sq_maxmod(depth: int, v: float) -> tuple[int, float]:
    if depth == 0:
        if v <= 300.0:
            return normalize_pair(0, math.sinh(v) + v * v)
        w = 2.0 * v * v * math.exp(-v) - math.exp(-2.0 * v)
        return normalize_pair(1, v - _LN2 + math.log1p(w))
    if depth == 1:
        if v <= 705.0:
            return normalize_pair(1, math.exp(v) - _LN2)
        return normalize_pair(2, v)
    return normalize_pair(depth + 1, v)


# ---------------------------------------------------------------------------
# polar tails: apply a closed form to z = exp(log_r + i theta) when z itself
# no longer fits in doubles (log_r > _POLAR_DIRECT)

def _exp_polar_tail(log_r: float, theta: float) -> tuple[float, float]:
    c = math.cos(theta)
    if c <= 0.0:
        # |f| = e^{Re z} with Re z <= 0: collapses to zero in doubles
        return (0.0, 0.0)
    raise OverflowSignal(Magnitude(2, log_r + math.log(c)), None)


def _cosh_sq_polar_tail(log_r: float, theta: float) -> tuple[float, float]:
    c = math.fabs(math.cos(theta))
    if c == 0.0:
        return (0.0, 0.0)  # on the imaginary axis cosh^2 stays in [0, 1]
    raise OverflowSignal(Magnitude(2, log_r + math.log(c) + _LN2), None)


def _quarter_polar_tail(log_r: float, theta: float) -> tuple[float, float]:
    t = 0.25 * theta
    # principal fourth root: cos t >= cos(pi/4) > 0, growth is certain
    raise OverflowSignal(Magnitude(2, 0.25 * log_r + math.log(math.cos(t))), None)


def _sinh_sq_polar_tail(log_r: float, theta: float) -> tuple[float, float]:
    c = math.fabs(math.cos(theta))
    if c == 0.0:
        # pure imaginary z: f = i sin y - y^2, dominated by y^2
        raise OverflowSignal(Magnitude.from_log(2.0 * log_r), _PI)
    a = log_r + math.log(c)
    if a <= _POLAR_DIRECT:
        raise OverflowSignal(Magnitude(1, math.exp(a) - _LN2), None)
    raise OverflowSignal(Magnitude(2, a), None)


def polar_step(f: "EntireFunction", log_r: float, theta: float) -> tuple[float, float]:
    """Apply closed-form ``f`` to the point with log-modulus ``log_r``.

    Used to continue an orbit one step past an overflow, where the point
    is only known in polar log form.  Returns coordinates or raises
    ``OverflowSignal``; beyond the reconstructible range the signal's
    phase is None and, on rays where the function collapses, the value
    degrades to 0 (an under-estimate, safe for min-modulus sampling).
    """
    if f.step is None:
        raise ValueError(f"{f.name} has no closed form to polar-step")
    if log_r <= _POLAR_DIRECT:
        s = math.exp(log_r)
        return f.step(s * math.cos(theta), s * math.sin(theta))
    return f._polar_tail(log_r, theta)


# ---------------------------------------------------------------------------
# coefficient rules

def _int_ratio(num: int, den: int) -> float:
    """Correctly rounded float of num/den for positive ints."""
    try:
        return num / den
    except OverflowError:
        return 0.0 if den > num else math.inf


def _exp_terms() -> Iterator[tuple[int, float, int]]:
    n = 0
    while True:
        yield (n, -math.lgamma(n + 1), 1)
        n += 1


def _cosh_sq_terms() -> Iterator[tuple[int, float, int]]:
    yield (0, 0.0, 1)
    m = 1
    while True:
        n = 2 * m
        yield (n, (n - 1) * _LN2 - math.lgamma(n + 1), 1)
        m += 1


def _quarter_terms() -> Iterator[tuple[int, float, int]]:
    n = 0
    while True:
        yield (n, -math.lgamma(4 * n + 1), 1)
        n += 1


def _sinh_sq_terms() -> Iterator[tuple[int, float, int]]:
    yield (1, 0.0, 1)
    yield (2, 0.0, 1)
    k = 1
    while True:
        n = 2 * k + 1
        yield (n, -math.lgamma(n + 1), 1)
        k += 1


def _gap_exponent(c: float, k: int) -> int:
    return int(math.floor(c * k)) ** 2


def _gap_terms(c: float) -> Callable[[], Iterator[tuple[int, float, int]]]:
    def gen() -> Iterator[tuple[int, float, int]]:
        # exponents floor(ck)^2 can repeat for c < 1; repeats merge by
        # summing coefficients (log-sum-exp keeps it stable)
        pending_e = 0
        pending_log = 0.0  # k = 0 term: z^0 / 0!
        k = 1
        while True:
            e = _gap_exponent(c, k)
            log_a = -math.lgamma(k * k + 1)
            if e == pending_e:
                hi = max(pending_log, log_a)
                lo = min(pending_log, log_a)
                pending_log = hi + math.log1p(math.exp(lo - hi))
            else:
                yield (pending_e, pending_log, 1)
                pending_e, pending_log = e, log_a
            k += 1

    return gen


def _power_gap_terms(p: int, q: int) -> Callable[[], Iterator[tuple[int, float, int]]]:
    def gen() -> Iterator[tuple[int, float, int]]:
        n = 0
        while True:
            yield (p * n, -math.lgamma(q * n + 1), 1)
            n += 1

    return gen


def _lacunary_log_maxmod(
    exponent_of: Callable[[int], int],
    log_coeff_of: Callable[[int], float],
    peak_ln_index: Callable[[float], float],
) -> Callable[[float], float]:
    """log M(e^x) for a positive series, found by jumping to the maximal term.

    Valid because M(r) = f(r) when all coefficients are nonnegative and the
    term sequence t_k = x e_k + log a_k is unimodal in k; only the terms
    within _WINDOW of the peak contribute at double precision, so the cost
    is independent of the peak position.  ``peak_ln_index`` is the analytic
    estimate of ln(argmax k); raises OverflowError once the result would
    need tower depth >= 2, which callers treat as honest truncation.
    """

    def term(k: int, x: float) -> float:
        return x * exponent_of(k) + log_coeff_of(k)

    def log_maxmod(x: float) -> float:
        ln_k = peak_ln_index(x)
        if ln_k > 344.0:
            raise OverflowError("maximum modulus beyond tower depth 1")
        hi = max(64, 4 * int(math.exp(max(ln_k, 0.0))))
        lo = 0
        while hi - lo > 16:
            m1 = lo + (hi - lo) // 3
            m2 = hi - (hi - lo) // 3
            if term(m1, x) < term(m2, x):
                lo = m1 + 1
            else:
                hi = m2
        k_hat = max(range(max(0, lo - 8), hi + 9), key=lambda k: term(k, x))
        peak = term(k_hat, x)
        if peak >= OVERFLOW:
            raise OverflowError("maximum modulus beyond tower depth 1")
        if peak >= 4e17:
            # the window correction (at most ~_WINDOW) is below one ulp
            # of the peak, and peak - _WINDOW == peak in doubles would
            # keep the scans below from terminating
            return peak
        acc = 1.0
        k = k_hat - 1
        while k >= 0:
            t = term(k, x)
            if t < peak - _WINDOW:
                break
            acc += math.exp(t - peak)
            k -= 1
        k = k_hat + 1
        while True:
            t = term(k, x)
            if t < peak - _WINDOW:
                break
            acc += math.exp(t - peak)
            k += 1
        return peak + math.log(acc)

    return log_maxmod


def _exp_coefficient(n: int) -> float:
    return _int_ratio(1, math.factorial(n)) if n <= 5000 else 0.0


def _cosh_sq_coefficient(n: int) -> float:
    if n == 0:
        return 1.0
    if n % 2 or n < 0:
        return 0.0
    if n > 5000:
        return 0.0
    return _int_ratio(1 << (n - 1), math.factorial(n))


def _quarter_coefficient(n: int) -> float:
    return _int_ratio(1, math.factorial(4 * n)) if n <= 1500 else 0.0


def _sinh_sq_coefficient(n: int) -> float:
    if n == 1 or n == 2:
        return 1.0
    if n % 2 == 0 or n < 0:
        return 0.0
    return _int_ratio(1, math.factorial(n)) if n <= 5000 else 0.0


def _gap_coefficient(c: float, n: int) -> float:
    total = Fraction(0)
    k = 0
    while True:
        e = _gap_exponent(c, k)
        if e > n:
            break
        if e == n and k * k <= 2000:
            total += Fraction(1, math.factorial(k * k))
        k += 1
    return float(total)


def _power_gap_coefficient(p: int, q: int, n: int) -> float:
    if n % p:
        return 0.0
    m = n // p
    return _int_ratio(1, math.factorial(q * m)) if q * m <= 5000 else 0.0


def _exp_log_coeff(n: int) -> float | None:
    return -math.lgamma(n + 1)


def _cosh_sq_log_coeff(n: int) -> float | None:
    if n == 0:
        return 0.0
    if n % 2:
        return None
    return (n - 1) * _LN2 - math.lgamma(n + 1)


def _quarter_log_coeff(n: int) -> float | None:
    return -math.lgamma(4 * n + 1)


def _sinh_sq_log_coeff(n: int) -> float | None:
    if n == 1 or n == 2:
        return 0.0
    if n % 2 == 0:
        return None
    return -math.lgamma(n + 1)


def _gap_log_coeff(c: float, n: int) -> float | None:
    logs = []
    k = 0
    while True:
        e = _gap_exponent(c, k)
        if e > n:
            break
        if e == n:
            logs.append(-math.lgamma(k * k + 1))
        k += 1
    if not logs:
        return None
    hi = max(logs)
    return hi + math.log(sum(math.exp(v - hi) for v in logs))


def _power_gap_log_coeff(p: int, q: int, n: int) -> float | None:
    if n % p:
        return None
    return -math.lgamma(q * (n // p) + 1)


# ---------------------------------------------------------------------------

class EntireFunction:
    """An entire function with evaluation, coefficient, and growth rules.

    Instances are immutable after construction and safe to share across
    threads; evaluation is pure.  Construct through ``make_builtin``,
    ``make_series``, ``make_random_signs``, or ``iterate_function``.
    """

    def __init__(
        self,
        name: str,
        *,
        params: dict | None = None,
        step: Callable[[float, float], tuple[float, float]] | None = None,
        terms: Callable[[], Iterator[tuple[int, float, int]]] | None = None,
        coefficient: Callable[[int], float] | None = None,
        coeff_log_abs: Callable[[int], float | None] | None = None,
        positive_coefficients: bool = False,
        maxmod_pair: Callable[[int, float], tuple[int, float]] | None = None,
        log_maxmod: Callable[[float], float] | None = None,
        polar_tail: Callable[[float, float], tuple[float, float]] | None = None,
        transcendental: bool = True,
        kernel_id: int = 0,
        base: "EntireFunction | None" = None,
        iterate_power: int = 1,
    ):
        self.name = name
        self.params = dict(params or {})
        self.step = step
        self._terms_rule = terms
        self._coefficient_rule = coefficient
        self._coeff_log_abs_rule = coeff_log_abs
        self.positive_coefficients = positive_coefficients
        self.maxmod_pair = maxmod_pair
        self.log_maxmod = log_maxmod
        self._polar_tail = polar_tail
        self.transcendental = transcendental
        self.kernel_id = kernel_id
        self.base = base
        self.iterate_power = iterate_power

    # -- evaluation -----------------------------------------------------

    def evaluate(self, z: complex) -> complex:
        """f(z); raises OverflowSignal when |f(z)| reaches the double cap."""
        z = complex(z)
        if self.base is not None:
            return self._evaluate_iterate(z)
        if self.step is not None:
            re, im = self.step(z.real, z.imag)
            return complex(re, im)
        return self._evaluate_series(z.real, z.imag)

    def _evaluate_iterate(self, z: complex) -> complex:
        base = self.base
        w = z
        polar: tuple[float, float] | None = None
        bound: Magnitude | None = None
        for _ in range(self.iterate_power):
            if bound is not None:
                # phase is gone; the best remaining statement is the
                # max-modulus upper bound, which the signal documents
                if base.maxmod_pair is None:
                    raise OverflowSignal(bound, None)
                bound = Magnitude(*base.maxmod_pair(bound.depth, bound.mantissa))
                continue
            try:
                if polar is None:
                    w = base.evaluate(w)
                else:
                    re, im = polar_step(base, polar[0], polar[1])
                    w = complex(re, im)
                    polar = None
            except OverflowSignal as sig:
                if sig.phase is not None and sig.magnitude.depth == 1:
                    polar = (sig.magnitude.mantissa, sig.phase)
                else:
                    bound = sig.magnitude
        if bound is not None:
            raise OverflowSignal(bound, None)
        if polar is not None:
            raise OverflowSignal(Magnitude.from_log(polar[0]), polar[1])
        return w

    def _evaluate_series(self, x: float, y: float) -> complex:
        r = safe_abs(x, y)
        if r == 0.0:
            for e, log_a, sign in self._terms_rule():
                if e == 0:
                    return complex(sign * math.exp(log_a), 0.0)
                return complex(0.0, 0.0)
            return complex(0.0, 0.0)
        log_r = math.log(r)
        theta = math.atan2(y, x)
        window: list[tuple[int, float, int]] = []
        peak = -math.inf
        peak_e = -1
        below = 0
        count = 0
        for e, log_a, sign in self._terms_rule():
            t = log_a + e * log_r
            count += 1
            if count > _TERM_CAP:
                raise ValueError("series not entire at working precision")
            if t > peak:
                peak, peak_e = t, e
                below = 0
                if (
                    count > 4096
                    and peak >= LOG_OVERFLOW
                    and self.positive_coefficients
                    and self.log_maxmod is not None
                ):
                    # the maximal term is past the double cap and still
                    # climbing: the sum is decided, but the scan would need
                    # to walk to an unreachable peak index.  Signal overflow
                    # through the structural growth rule instead; off the
                    # positive axis that is an upper claim, so no phase.
                    try:
                        log_m = self.log_maxmod(log_r)
                    except OverflowError:
                        raise ValueError(
                            f"{self.name}: modulus at |z| = {r:.6g} exceeds"
                            " representable growth"
                        ) from None
                    raise OverflowSignal(
                        Magnitude.from_log(log_m),
                        0.0 if theta == 0.0 else None,
                    )
            elif t < peak - _WINDOW:
                if e > peak_e:
                    below += 1
                    if below >= 3:
                        break
                continue
            else:
                below = 0
            window.append((e, t, sign))
        sr = 0.0
        si = 0.0
        for e, t, sign in window:
            if t < peak - _WINDOW:
                continue
            w = sign * math.exp(t - peak)
            sr += w * math.cos(e * theta)
            si += w * math.sin(e * theta)
        sa = safe_abs(sr, si)
        if sa == 0.0:
            return complex(0.0, 0.0)
        logabs = peak + math.log(sa)
        if logabs >= LOG_OVERFLOW:
            raise OverflowSignal(Magnitude.from_log(logabs), math.atan2(si, sr))
        if peak <= 700.0:
            scale = math.exp(peak)
            return complex(scale * sr, scale * si)
        phase = math.atan2(si, sr)
        ea = math.exp(logabs)
        return complex(ea * math.cos(phase), ea * math.sin(phase))

    # -- coefficients ----------------------------------------------------

    @property
    def has_coefficients(self) -> bool:
        return self._terms_rule is not None

    def coefficient(self, n: int) -> float:
        """a_n exactly as the rule defines it (0.0 where absent or underflowed)."""
        if self._coefficient_rule is None:
            raise ValueError(f"coefficients unavailable for {self.name}")
        n = int(n)
        if n < 0:
            raise ValueError("coefficient index must be nonnegative")
        return self._coefficient_rule(n)

    def coeff_log_abs(self, n: int) -> float | None:
        """log|a_n| without underflow, or None where a_n = 0."""
        if self._coeff_log_abs_rule is None:
            raise ValueError(f"coefficients unavailable for {self.name}")
        n = int(n)
        if n < 0:
            raise ValueError("coefficient index must be nonnegative")
        return self._coeff_log_abs_rule(n)

    def terms(self) -> Iterator[tuple[int, float, int]]:
        """Nonzero terms as (exponent, log|a_n|, sign), ascending exponents."""
        if self._terms_rule is None:
            raise ValueError(f"coefficients unavailable for {self.name}")
        return self._terms_rule()

    # -- misc -------------------------------------------------------------

    def require_transcendental(self) -> None:
        if not self.transcendental:
            raise ValueError(f"{self.name} is not transcendental")

    def __repr__(self) -> str:
        args = "".join(f", {k}={v!r}" for k, v in self.params.items())
        return f"EntireFunction({self.name!r}{args})"


# ---------------------------------------------------------------------------
# factories

_CLOSED_BUILTINS = {
    "exp": dict(
        step=_exp_step,
        maxmod_pair=_exp_maxmod,
        polar_tail=_exp_polar_tail,
        terms=_exp_terms,
        coefficient=_exp_coefficient,
        coeff_log_abs=_exp_log_coeff,
        positive_coefficients=True,
        kernel_id=1,
    ),
    "cosh_sq": dict(
        step=_cosh_sq_step,
        maxmod_pair=_cosh_sq_maxmod,
        polar_tail=_cosh_sq_polar_tail,
        terms=_cosh_sq_terms,
        coefficient=_cosh_sq_coefficient,
        coeff_log_abs=_cosh_sq_log_coeff,
        positive_coefficients=True,
        kernel_id=2,
    ),
    "quarter_order": dict(
        step=_quarter_step,
        maxmod_pair=_quarter_maxmod,
        polar_tail=_quarter_polar_tail,
        terms=_quarter_terms,
        coefficient=_quarter_coefficient,
        coeff_log_abs=_quarter_log_coeff,
        positive_coefficients=True,
        kernel_id=3,
    ),
    "sinh_plus_sq": dict(
        step=_sinh_sq_step,
        maxmod_pair=_sinh_sq_maxmod,
        polar_tail=_sinh_sq_polar_tail,
        terms=_sinh_sq_terms,
        coefficient=_sinh_sq_coefficient,
        coeff_log_abs=_sinh_sq_log_coeff,
        positive_coefficients=True,
        kernel_id=4,
    ),
}

BUILTIN_NAMES = ("exp", "cosh_sq", "quarter_order", "sinh_plus_sq", "gap_series", "power_gap")


def make_builtin(name: str, **params) -> EntireFunction:
    """One of the built-in entire functions.

    ``gap_series`` needs ``c > 0`` (exponents floor(ck)^2, coefficients
    1/(k^2)!); ``power_gap`` needs integers ``p, q >= 1`` (exponents pn,
    coefficients 1/(qn)!).  The other four take no parameters.
    """
    if name in _CLOSED_BUILTINS:
        if params:
            raise ValueError(f"{name} takes no parameters, got {sorted(params)}")
        return EntireFunction(name, **_CLOSED_BUILTINS[name])
    if name == "gap_series":
        c = float(params.pop("c", 0.0))
        if params:
            raise ValueError(f"unknown parameters for gap_series: {sorted(params)}")
        if not (0.0 < c <= 4.0):
            raise ValueError(f"gap_series needs c in (0, 4], got {c!r}")
        return EntireFunction(
            "gap_series",
            params={"c": c},
            terms=_gap_terms(c),
            coefficient=lambda n: _gap_coefficient(c, n),
            coeff_log_abs=lambda n: _gap_log_coeff(c, n),
            positive_coefficients=True,
            log_maxmod=_lacunary_log_maxmod(
                lambda k: _gap_exponent(c, k),
                lambda k: -math.lgamma(k * k + 1),
                lambda x: 0.5 * c * c * x,
            ),
        )
    if name == "power_gap":
        p = params.pop("p", 0)
        q = params.pop("q", 0)
        if params:
            raise ValueError(f"unknown parameters for power_gap: {sorted(params)}")
        if int(p) != p or int(q) != q or p < 1 or q < 1:
            raise ValueError(f"power_gap needs integers p, q >= 1, got p={p!r} q={q!r}")
        p, q = int(p), int(q)
        return EntireFunction(
            "power_gap",
            params={"p": p, "q": q},
            terms=_power_gap_terms(p, q),
            coefficient=lambda n: _power_gap_coefficient(p, q, n),
            coeff_log_abs=lambda n: _power_gap_log_coeff(p, q, n),
            positive_coefficients=True,
            log_maxmod=_lacunary_log_maxmod(
                lambda n: p * n,
                lambda n: -math.lgamma(q * n + 1),
                lambda x: x * p / q - math.log(q),
            ),
        )
    raise ValueError(f"unknown builtin {name!r}; known: {', '.join(BUILTIN_NAMES)}")


_PROBE = 257  # construction-time coefficient probe for user series


def make_series(
    rule: Callable[[int], float],
    positive_coefficients: bool = False,
    name: str = "user_series",
) -> EntireFunction:
    """An entire function from a total coefficient rule n -> a_n.

    The caller asserts entirety; divergence is detected at evaluation
    time.  Rules whose probed support ends early are accepted but flagged
    non-transcendental (at working precision a finitely supported rule is
    a polynomial), and downstream certifiers refuse them.
    """
    probe = []
    for n in range(_PROBE):
        a = float(rule(n))
        if not math.isfinite(a):
            raise ValueError(f"coefficient rule returned non-finite a_{n} = {a!r}")
        if positive_coefficients and a < 0.0:
            raise ValueError(f"positivity asserted but a_{n} = {a!r} < 0")
        probe.append(a)
    nonzero = [n for n, a in enumerate(probe) if a != 0.0]
    transcendental = bool(nonzero) and nonzero[-1] >= _PROBE - 128

    def terms() -> Iterator[tuple[int, float, int]]:
        # exhaust once the rule looks permanently zero, otherwise rules
        # that underflow to 0.0 would spin the evaluation loop forever;
        # the allowance grows with the last seen exponent so lacunary
        # rules with widening gaps are not cut short
        n = 0
        last_nonzero = 0
        while True:
            a = float(rule(n))
            if a != 0.0:
                last_nonzero = n
                yield (n, math.log(math.fabs(a)), 1 if a > 0.0 else -1)
            elif n - last_nonzero > max(1024, 4 * last_nonzero):
                return
            n += 1

    def coeff_log_abs(n: int) -> float | None:
        a = float(rule(n))
        if a == 0.0:
            return None
        return math.log(math.fabs(a))

    return EntireFunction(
        name,
        terms=terms,
        coefficient=lambda n: float(rule(n)),
        coeff_log_abs=coeff_log_abs,
        positive_coefficients=positive_coefficients,
        transcendental=transcendental,
    )


def make_random_signs(base: EntireFunction, seed: int) -> EntireFunction:
    """``base`` with its n-th coefficient multiplied by a seeded sign.

    Signs come from the fixed splitmix-style generator, indexed by the
    coefficient index, so the sequence is reproducible bit-exactly.
    """
    if base._terms_rule is None:
        raise ValueError(f"{base.name} lacks coefficients to perturb")
    seed = int(seed) & _MASK64
    base_terms = base._terms_rule
    base_coeff = base._coefficient_rule
    base_log = base._coeff_log_abs_rule

    def terms() -> Iterator[tuple[int, float, int]]:
        for e, log_a, sign in base_terms():
            yield (e, log_a, sign * random_sign(seed, e))

    coefficient = None
    if base_coeff is not None:
        coefficient = lambda n: base_coeff(n) * random_sign(seed, n)

    return EntireFunction(
        f"random_signs({base.name})",
        params={**base.params, "seed": seed},
        terms=terms,
        coefficient=coefficient,
        coeff_log_abs=base_log,
        positive_coefficients=False,
        transcendental=base.transcendental,
    )


def iterate_function(f: EntireFunction, m: int) -> EntireFunction:
    """The m-fold composition of ``f``; coefficients are not tracked for m >= 2."""
    m = int(m)
    if m < 1:
        raise ValueError(f"iterate power must be >= 1, got {m}")
    if m == 1:
        return f
    base = f.base if f.base is not None else f
    power = m * f.iterate_power
    maxmod = None
    if base.maxmod_pair is not None:
        base_pair = base.maxmod_pair

        def maxmod(depth: int, v: float, _n: int = power) -> tuple[int, float]:
            for _ in range(_n):
                depth, v = base_pair(depth, v)
            return (depth, v)

    return EntireFunction(
        f"{base.name}^{power}",
        params=dict(base.params),
        positive_coefficients=base.positive_coefficients,
        maxmod_pair=maxmod,
        transcendental=base.transcendental,
        base=base,
        iterate_power=power,
    )
