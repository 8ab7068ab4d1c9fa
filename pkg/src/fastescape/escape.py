"""Depth-bounded escape-level classification of orbits.

The level-L test at depth N checks |f^n(z)| >= M^(n+L)(R) for every
0 <= n <= N with n + L >= 0.  Passing is necessary, never sufficient, for
true membership, so every verdict carries its depth.  Orbits are tracked
in complex doubles while possible, then continued in log space; once a
modulus is only an assumed bound, satisfied comparisons set the
``indeterminate`` flag instead of silently claiming an ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from fastescape.functions import (
    _POLAR_DIRECT,
    EntireFunction,
    OverflowSignal,
    polar_step,
    safe_abs,
)
from fastescape.growth import ThresholdLadder, max_modulus
from fastescape.magnitude import Magnitude

DEFAULT_L_RANGE = (-8, 8)


def _tower_map(f: EntireFunction, m: Magnitude) -> Magnitude | None:
    """M(m) through the function's growth map, or None when unavailable."""
    if f.maxmod_pair is not None:
        return Magnitude(*f.maxmod_pair(m.depth, m.mantissa))
    if f.log_maxmod is not None and m.depth == 1:
        try:
            return Magnitude.from_log(f.log_maxmod(m.mantissa))
        except OverflowError:
            return None
    return None


@dataclass(frozen=True)
class OrbitRecord:
    """The orbit z, f(z), ..., with moduli carried past double overflow.

    ``values`` is the prefix of the orbit representable as complex doubles;
    ``moduli`` extends it as Magnitudes and may stop early when no growth
    map can continue the tower.  ``overflow_step`` is the first index with
    no complex value.  Moduli before ``approx_from`` are exact to rounding;
    from it onward they are one-sided estimates (a max-modulus bound after
    the phase is lost, or a collapsed value on a bounded ray).
    """

    start: complex
    values: tuple[complex, ...]
    moduli: tuple[Magnitude, ...]
    requested_depth: int
    overflow_step: int | None = None
    approx_from: int | None = None

    @property
    def depth(self) -> int:
        return len(self.moduli) - 1

    def modulus(self, n: int) -> Magnitude | None:
        """|f^n(z)| if still tracked, else None (beyond every growth map)."""
        if not 0 <= n <= self.requested_depth:
            raise IndexError(f"orbit index {n} outside 0..{self.requested_depth}")
        if n < len(self.moduli):
            return self.moduli[n]
        return None


def compute_orbit(f: EntireFunction, z: complex, N: int) -> OrbitRecord:
    """Iterate f from z for N steps, recording values and moduli.

    Overflow is encoded, never raised: past the double range the orbit is
    continued exactly while the point stays on the positive real axis of a
    positive-coefficient function or its polar form is reconstructible,
    and as a max-modulus bound afterwards; the record truncates when no
    continuation exists.
    """
    z = complex(z)
    N = int(N)
    if N < 1:
        raise ValueError(f"orbit depth must be >= 1, got {N}")
    values = [z]
    moduli = [Magnitude.from_real(safe_abs(z.real, z.imag))]
    overflow_step: int | None = None
    approx_from: int | None = None
    current: complex | None = z
    polar: tuple[float, float] | None = None
    exact_tower: Magnitude | None = None
    bound: Magnitude | None = None

    def absorb(sig: OverflowSignal, n: int) -> bool:
        """Classify an overflow signal; False when the orbit must truncate."""
        nonlocal polar, exact_tower, bound, overflow_step, approx_from
        if overflow_step is None:
            overflow_step = n
        if sig.phase is not None and sig.phase == 0.0 and f.positive_coefficients:
            exact_tower = sig.magnitude
        elif sig.phase is not None and sig.magnitude.depth == 1:
            polar = (sig.magnitude.mantissa, sig.phase)
        else:
            bound = sig.magnitude
            if approx_from is None:
                approx_from = n
        moduli.append(sig.magnitude)
        return True

    for n in range(1, N + 1):
        if bound is not None or exact_tower is not None:
            state = bound if bound is not None else exact_tower
            nxt = _tower_map(f, state)
            if nxt is None:
                break
            if bound is not None:
                bound = nxt
            else:
                exact_tower = nxt
            moduli.append(nxt)
            continue
        try:
            if polar is not None:
                log_r, theta = polar
                polar = None
                if theta == 0.0 and f.positive_coefficients:
                    # on the positive axis f(r) = M(r): continue exactly
                    nxt = _tower_map(f, Magnitude.from_log(log_r))
                    if nxt is None:
                        break
                    exact_tower = nxt
                    moduli.append(nxt)
                    continue
                if f.step is None:
                    # series function off axis: only the bound remains
                    nxt = _tower_map(f, Magnitude.from_log(log_r))
                    if nxt is None:
                        break
                    bound = nxt
                    if approx_from is None:
                        approx_from = n
                    moduli.append(nxt)
                    continue
                re, im = polar_step(f, log_r, theta)
                if log_r > _POLAR_DIRECT and approx_from is None:
                    # the closed form collapsed the point on a bounded ray;
                    # the reconstructed value is a one-sided estimate
                    approx_from = n
                current = complex(re, im)
                moduli.append(Magnitude.from_real(safe_abs(re, im)))
                continue
            current = f.evaluate(current)
            moduli.append(
                Magnitude.from_real(safe_abs(current.real, current.imag))
            )
            if overflow_step is None:
                values.append(current)
        except OverflowSignal as sig:
            if not absorb(sig, n):
                break

    return OrbitRecord(
        start=z,
        values=tuple(values),
        moduli=tuple(moduli),
        requested_depth=N,
        overflow_step=overflow_step,
        approx_from=approx_from,
    )


@dataclass(frozen=True)
class LevelVerdict:
    """The largest passing level of the depth-limited test, or None."""

    level: int | None
    depth: int
    indeterminate: bool
    ladder_R: float


def _compare(record: OrbitRecord, ladder: ThresholdLadder, L: int, N: int
             ) -> tuple[bool, bool]:
    """(member, indeterminate) for one level against a computed orbit."""
    member = True
    indeterminate = False
    rungs = ladder.rungs
    for n in range(0, N + 1):
        k = n + L
        if k < 0:
            continue
        approx = record.approx_from is not None and n >= record.approx_from
        mod = record.moduli[n] if n < len(record.moduli) else None
        rung = rungs[k] if k < len(rungs) else None
        if mod is None:
            # the orbit outran every growth map: beyond any stored rung
            indeterminate = True
            continue
        if rung is None:
            # the rung outran the double-range tower
            if mod.depth >= 1:
                indeterminate = True
                continue
            return False, indeterminate
        if mod.depth >= 1 and rung.depth >= 1:
            # tower against tower: counted satisfied, never trusted
            indeterminate = True
            continue
        if mod >= rung:
            if approx:
                indeterminate = True
            continue
        if approx:
            indeterminate = True
        return False, indeterminate
    return member, indeterminate


def _check_coverage(ladder: ThresholdLadder, L: int, N: int) -> None:
    need = N + L
    if need >= 0 and need > ladder.depth and ladder.truncated_at is None:
        raise ValueError(
            f"ladder of depth {ladder.depth} cannot test level {L} at depth {N}"
        )


def level_membership(
    f: EntireFunction,
    ladder: ThresholdLadder,
    L: int,
    z: complex,
    N: int,
) -> tuple[bool, bool]:
    """(member, indeterminate) of the depth-N test for level L.

    Member means |f^n(z)| >= M^(n+L)(R) held (in Magnitude order) for all
    0 <= n <= N with n + L >= 0.  Comparisons undecidable in doubles count
    as satisfied and set the indeterminate flag.
    """
    L = int(L)
    N = int(N)
    if N < 1:
        raise ValueError(f"depth must be >= 1, got {N}")
    _check_coverage(ladder, L, N)
    record = compute_orbit(f, z, N)
    return _compare(record, ladder, L, N)


def max_level(
    f: EntireFunction,
    ladder: ThresholdLadder,
    z: complex,
    N: int,
    L_min: int = DEFAULT_L_RANGE[0],
    L_max: int = DEFAULT_L_RANGE[1],
) -> LevelVerdict:
    """The largest L in [L_min, L_max] whose depth-N test passes.

    Membership is antitone in L (rungs only move up), so a binary search
    over the range is exact.  Returns level None when even L_min fails.
    """
    L_min, L_max = int(L_min), int(L_max)
    N = int(N)
    if N < 1:
        raise ValueError(f"depth must be >= 1, got {N}")
    if L_min > L_max:
        raise ValueError(f"empty level range [{L_min}, {L_max}]")
    _check_coverage(ladder, L_max, N)
    record = compute_orbit(f, z, N)

    member_lo, indet_lo = _compare(record, ladder, L_min, N)
    if not member_lo:
        return LevelVerdict(None, N, indet_lo, ladder.R)
    member_hi, indet_hi = _compare(record, ladder, L_max, N)
    if member_hi:
        return LevelVerdict(L_max, N, indet_hi, ladder.R)
    lo, hi = L_min, L_max
    best_indet = indet_lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        member, indet = _compare(record, ladder, mid, N)
        if member:
            lo, best_indet = mid, indet
        else:
            hi = mid
    return LevelVerdict(lo, N, best_indet, ladder.R)


def mu_criterion(
    f: EntireFunction,
    z: complex,
    eps: float,
    R: float,
    L: int,
    N: int,
    samples: int = 64,
) -> bool:
    """Does the orbit dominate the ladder of mu(r) = eps*M(r) from R?

    True iff |f^(n+L)(z)| >= mu^n(R) for 0 <= n <= N - L, with the same
    counted-as-satisfied rule as level membership once both sides leave
    the double range.  Raises when eps*M(r) <= r somewhere on the spot
    grid (the mu-ladder would not even be increasing).
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps!r}")
    R = float(R)
    if not R > 0.0:
        raise ValueError(f"R must be positive, got {R!r}")
    L = int(L)
    N = int(N)
    if N < 1:
        raise ValueError(f"depth must be >= 1, got {N}")
    if not 0 <= L <= N:
        raise ValueError(f"level shift must satisfy 0 <= L <= N, got {L}")

    lo, hi = math.log(R), math.log(max(1e8, R * 1e6))
    for j in range(64):
        r = math.exp(lo + (hi - lo) * j / 63.0)
        if not max_modulus(f, r, samples).mul(eps) > Magnitude.from_real(r):
            raise ValueError(
                f"R invalid for mu: eps*M(r) <= r at r = {r:.9g}"
            )

    record = compute_orbit(f, z, N)
    mu: Magnitude | None = Magnitude.from_real(R)
    for n in range(0, N - L + 1):
        mod = record.modulus(n + L)
        if mod is None or mu is None:
            pass  # beyond the double range on either side: counted satisfied
        elif mod.depth >= 1 and mu.depth >= 1:
            pass
        elif not mod >= mu:
            return False
        if mu is not None:
            if mu.depth == 0:
                mu = max_modulus(f, mu.mantissa, samples).mul(eps)
            else:
                nxt = _tower_map(f, mu)
                mu = None if nxt is None else nxt.mul(eps)
    return True
