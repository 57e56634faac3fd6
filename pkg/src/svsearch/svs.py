"""The search-on-vertical-strips driver.

A run walks through a budget of pairwise-distinct strips, specializes
the system on each strip and hands the zero-dimensional remainder to a
solver backend, stopping at the first strip that carries a rational
solution.  Runs are deterministic given the stream and replay
byte-for-byte after serialization.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UsageError
from .sampler import RngStream, Strip, SystemSpec, sample_strips
from .zdsolve import CertResult, ZeroDimQuery, cond_h_certificate, find_zero


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # "success" | "failure"
    strip_index: int | None  # 1-based, success only
    strip: Strip | None  # the successful strip
    point: tuple[int, ...] | None  # success only
    strips_tried: int
    strips: tuple[Strip, ...]  # the strips actually visited, in order
    certificates: tuple[CertResult, ...] | None  # one per visited strip, on request
    backend: str
    hstar: int

    def to_dict(self, system: SystemSpec) -> dict:
        ctx = system.ctx

        def elt(x: int):
            return x if ctx.k == 1 else list(ctx.coeffs(x))

        doc = {
            "status": self.status,
            "strip_index": self.strip_index,
            "strip": [elt(x) for x in self.strip] if self.strip is not None else None,
            "point": [elt(x) for x in self.point] if self.point is not None else None,
            "strips_tried": self.strips_tried,
            "strips": [[elt(x) for x in a] for a in self.strips],
            "backend": self.backend,
            "hstar": self.hstar,
        }
        if self.certificates is not None:
            doc["certificates"] = [
                {
                    "verdict": c.verdict,
                    "resultant_degree": c.resultant_degree,
                    "squarefree": c.squarefree,
                }
                for c in self.certificates
            ]
        return doc


def verify_solution(system: SystemSpec, strip: Strip, point) -> bool:
    """True iff every polynomial vanishes at strip || point."""
    if len(strip) != system.r - system.s or len(point) != system.s:
        raise UsageError("strip/point dimensions do not match the system")
    full = tuple(strip) + tuple(point)
    ctx = system.ctx
    return all(f.evaluate(full, ctx) == 0 for f in system.polys)


def run_svs(
    system: SystemSpec,
    strips: list[Strip] | None = None,
    rng: RngStream | None = None,
    backend: str = "exhaustive",
    hstar: int | None = None,
    certify: bool = False,
) -> SolveOutcome:
    """One search over at most hstar vertical strips.

    Strips come either from an explicit pairwise-distinct list or from a
    stream (prefix-consistent, so a larger budget visits the same strips
    first).  The default budget is r - s + 1.  When certify is set (s = 2
    only) each visited strip's specialization also gets the
    transversality certificate.
    """
    ctx = system.ctx
    m = system.r - system.s
    if (strips is None) == (rng is None):
        raise UsageError("provide exactly one strip source: explicit strips or a stream")
    if certify and system.s != 2:
        raise UsageError("certificates are only defined for s = 2")

    if strips is not None:
        strips = [tuple(a) for a in strips]
        for a in strips:
            if len(a) != m:
                raise UsageError(f"strip {a} must have {m} coordinates")
            for x in a:
                ctx.check(x)
        if len(set(strips)) != len(strips):
            raise UsageError("explicit strips must be pairwise distinct")
        budget = hstar if hstar is not None else len(strips)
        if budget > len(strips):
            raise UsageError("budget exceeds the number of explicit strips")
        plan = strips[:budget]
    else:
        budget = hstar if hstar is not None else system.hstar
        plan = sample_strips(ctx, m, budget, rng)

    visited: list[Strip] = []
    certs: list[CertResult] = []
    for i, a in enumerate(plan, start=1):
        visited.append(a)
        specialized = tuple(f.specialize(a, ctx) for f in system.polys)
        query = ZeroDimQuery(ctx, system.s, specialized, system.d)
        if certify:
            certs.append(cond_h_certificate(query))
        point = find_zero(query, backend)
        if point is not None:
            if not verify_solution(system, a, point):
                raise AssertionError("solver returned a point that does not solve the system")
            return SolveOutcome(
                status="success",
                strip_index=i,
                strip=a,
                point=point,
                strips_tried=i,
                strips=tuple(visited),
                certificates=tuple(certs) if certify else None,
                backend=backend,
                hstar=budget,
            )
    return SolveOutcome(
        status="failure",
        strip_index=None,
        strip=None,
        point=None,
        strips_tried=len(visited),
        strips=tuple(visited),
        certificates=tuple(certs) if certify else None,
        backend=backend,
        hstar=budget,
    )
