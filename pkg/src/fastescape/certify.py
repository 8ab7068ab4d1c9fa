"""Certificates that the minimum modulus climbs the threshold ladder.

A certificate lists radii rho_0 < rho_1 < ... with rho_n > M^n(R) and
sampled m(rho_n) >= rho_{n+1} * (1 + delta).  Sampled minima are upper
estimates of the true minimum modulus, so "certified" is numerical
evidence with a safety margin, never a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from fastescape.functions import EntireFunction
from fastescape.growth import (
    ThresholdLadder,
    build_ladder,
    find_regular_sequence,
    max_modulus,
    min_modulus,
)
from fastescape.magnitude import LOG_OVERFLOW, Magnitude

M_CAP = 4.0
DEFAULT_DELTA = 0.01

STATUS_CERTIFIED = "certified"
STATUS_FAILED = "failed"
STATUS_TRUNCATED = "truncated"

REASON_CEILING = "min-modulus ceiling"


@dataclass(frozen=True)
class WebCertificate:
    """Chained evidence rho_n > M^n(R), m(rho_n) >= rho_{n+1}(1+delta).

    ``status`` is certified, failed (see ``reason``), or truncated when
    the radii left the double range before the requested depth.  ``rho``
    and ``m_values`` keep whatever was computed either way.
    """

    function: EntireFunction
    method: str
    R: float
    rho: tuple[float, ...]
    m_values: tuple[Magnitude, ...]
    ladder: ThresholdLadder
    samples: int
    delta: float
    status: str
    reason: str | None = None

    @property
    def depth(self) -> int:
        """Number of chained inequalities (len(rho) - 1)."""
        return len(self.rho) - 1

    def to_json_dict(self) -> dict:
        return {
            "schema": "fastescape.web-certificate/1",
            "method": self.method,
            "function": self.function.name,
            "params": dict(self.function.params),
            "R": self.R,
            "depth": self.depth,
            "samples": self.samples,
            "delta": self.delta,
            "status": self.status,
            "reason": self.reason,
            "rho": list(self.rho),
            "min_modulus": [[m.depth, m.mantissa] for m in self.m_values],
            "ladder_rungs": [[g.depth, g.mantissa] for g in self.ladder.rungs],
            "ladder_truncated_at": self.ladder.truncated_at,
        }


def _validate(f: EntireFunction, depth: int, delta: float) -> None:
    if not f.transcendental:
        raise ValueError(f"{f.name} is not transcendental")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta!r}")


def _chain_rhs(rho_next: float, delta: float) -> Magnitude:
    return Magnitude.from_log(math.log(rho_next) + math.log1p(delta))


def certify_disc_sequence(
    f: EntireFunction,
    R: float,
    depth: int,
    samples: int = 64,
    delta: float = DEFAULT_DELTA,
) -> WebCertificate:
    """Greedy disc-sequence chain: pick each rho_n maximizing sampled m.

    rho_n is the argmax of m over 128 log-spaced radii in the window from
    M^n(R)(1+delta) up to M^n(R)^4 (at least one e-fold wide, capped at
    the double range).  Certified when every m(rho_n) clears the next
    radius with margin delta; the first obstruction is reported, with
    reason "min-modulus ceiling" when m never reaches the next rung.
    """
    depth = int(depth)
    _validate(f, depth, delta)
    ladder = build_ladder(f, R, depth, samples)

    usable = 0
    while usable < len(ladder.rungs) and ladder.rungs[usable].depth == 0:
        usable += 1
    d = min(depth, usable - 1)

    def cert(rho, mins, status, reason=None):
        return WebCertificate(
            f, "disc-sequence", ladder.R, tuple(rho), tuple(mins),
            ladder, samples, delta, status, reason,
        )

    if d < 1:
        return cert((), (), STATUS_TRUNCATED)

    rho: list[float] = []
    mins: list[Magnitude] = []
    for n in range(d + 1):
        llo = math.log(ladder.rungs[n].mantissa) + math.log1p(delta)
        lhi = min(LOG_OVERFLOW, max(M_CAP * math.log(ladder.rungs[n].mantissa), llo + 1.0))
        if lhi <= llo:
            d = n - 1
            break
        best_r = 0.0
        best_m: Magnitude | None = None
        for j in range(128):
            r_j = math.exp(llo + (lhi - llo) * j / 127.0)
            m_j = min_modulus(f, r_j, samples)
            if best_m is None or m_j > best_m:
                best_m, best_r = m_j, r_j
        rho.append(best_r)
        mins.append(best_m)
    if d < 1:
        return cert(rho, mins, STATUS_TRUNCATED)

    for n in range(d):
        if not mins[n] >= _chain_rhs(rho[n + 1], delta):
            if not mins[n] > ladder.rungs[n + 1]:
                return cert(rho, mins, STATUS_FAILED, REASON_CEILING)
            return cert(rho, mins, STATUS_FAILED, f"chain margin at rung {n}")
    if d < depth:
        return cert(rho, mins, STATUS_TRUNCATED)
    return cert(rho, mins, STATUS_CERTIFIED)


def certify_regular_growth(
    f: EntireFunction,
    R: float,
    m: float,
    depth: int,
    samples: int = 64,
    delta: float = DEFAULT_DELTA,
) -> WebCertificate:
    """Regularity route: radii with M(r_n) >= r_{n+1}^m, then a minimum
    above M(r_n) inside each (r_n, r_n^m).

    For each r_n of find_regular_sequence, rho_n is the first of 64
    log-spaced candidates in (r_n, r_n^m) whose sampled m reaches
    M(r_n)(1+delta); candidate windows clamp below the previous rho so
    the chain is increasing.  m(rho_n) >= M(r_n) >= r_{n+1}^m(1+delta)
    then yields the same chained inequalities as the disc route.
    """
    depth = int(depth)
    m = float(m)
    if not m > 1.0:
        raise ValueError(f"growth exponent m must be > 1, got {m!r}")
    _validate(f, depth, delta)
    radii = find_regular_sequence(f, R, m, depth, samples, delta)
    ladder = build_ladder(f, R, depth - 1, samples)

    def cert(rho, mins, status, reason=None):
        return WebCertificate(
            f, "regular-growth", ladder.R, tuple(rho), tuple(mins),
            ladder, samples, delta, status, reason,
        )

    rho: list[float] = []
    mins: list[Magnitude] = []
    prev: float | None = None
    for n, r_n in enumerate(radii):
        lo = r_n if prev is None else max(r_n, prev * 1.000001)
        llo = math.log(lo)
        lhi = min(LOG_OVERFLOW, m * math.log(r_n))
        if lhi <= llo:
            return cert(
                rho, mins, STATUS_FAILED,
                f"clause (a): window above {r_n:.6g} leaves the double range",
            )
        target = max_modulus(f, r_n, samples).mul(1.0 + delta)
        hit: float | None = None
        hit_m: Magnitude | None = None
        for j in range(1, 65):
            r_c = math.exp(llo + (lhi - llo) * j / 65.0)
            m_c = min_modulus(f, r_c, samples)
            if m_c >= target:
                hit, hit_m = r_c, m_c
                break
        if hit is None:
            return cert(
                rho, mins, STATUS_FAILED,
                f"clause (a): no radius in (r, r^{m:g}) with sampled min"
                f" >= M(r) at rung {n}",
            )
        rho.append(hit)
        mins.append(hit_m)
        prev = hit

    for n in range(len(rho) - 1):
        if not mins[n] >= _chain_rhs(rho[n + 1], delta):
            return cert(rho, mins, STATUS_FAILED, f"chain margin at rung {n}")
    return cert(rho, mins, STATUS_CERTIFIED)


def verify_certificate(cert: WebCertificate, oversample: int = 4) -> bool:
    """Re-check every inequality with oversample-times the circle samples.

    False on any violation (including tampered or non-certified input);
    never raises for well-formed certificates.
    """
    oversample = int(oversample)
    if oversample < 1:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    if cert.status != STATUS_CERTIFIED:
        return False
    if len(cert.rho) < 2 or len(cert.m_values) != len(cert.rho):
        return False
    rungs = cert.ladder.rungs
    if len(cert.rho) > len(rungs):
        return False
    for n, r in enumerate(cert.rho):
        if n + 1 < len(cert.rho) and not r < cert.rho[n + 1]:
            return False
        if not Magnitude.from_real(r) > rungs[n]:
            return False
    samples = cert.samples * oversample
    mins = [min_modulus(cert.function, r, samples) for r in cert.rho]
    for n in range(len(cert.rho) - 1):
        if not mins[n] >= _chain_rhs(cert.rho[n + 1], cert.delta):
            return False
    return True
