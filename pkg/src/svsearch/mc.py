"""Monte Carlo harness: many independent searches vs. the exact bounds.

Trial t of an experiment draws everything from the stream (seed, t), so
records are identical across reruns, worker counts and schedulings; CSV
rows are emitted in trial order.  Estimates are compared against the
bound intervals widened by three standard errors, with all comparisons
done in exact rational arithmetic.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool

from .errors import CapacityError, UsageError
from .ffield import FieldCtx, field_for_order, matrix_rank
from .mpoly import monomials
from .sampler import RngStream, Strip, m_matrix, sample_system
from .svs import run_svs
from .theory import (
    BoundInterval,
    cert_rate_lower_bound,
    expected_strips_bound,
    failure_bound,
    first_strip_bounds,
    hypothesis_report,
    strip_index_bound,
    strip_index_series_bound,
)

ENUM_LIMIT = 1 << 26

CSV_COLUMNS = (
    "trial_id",
    "seed",
    "q",
    "r",
    "s",
    "d",
    "hstar",
    "backend",
    "status",
    "strip_index",
    "certificate",
    "wall_ns",
)


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    seed: int
    q: int
    r: int
    s: int
    d: int
    hstar: int
    backend: str
    status: str  # "success" | "failure" | "aborted"
    strip_index: int | None  # None encodes the infinity sentinel / aborted
    certificate: str  # first-strip verdict, "" when not requested
    strips: tuple[Strip, ...]
    wall_ns: int  # kept at 0: rows must be identical across reruns

    def csv_row(self) -> str:
        if self.status == "success":
            idx = str(self.strip_index)
        elif self.status == "failure":
            idx = "inf"
        else:
            idx = ""
        return ",".join(
            [
                str(self.trial_id),
                str(self.seed),
                str(self.q),
                str(self.r),
                str(self.s),
                str(self.d),
                str(self.hstar),
                self.backend,
                self.status,
                idx,
                self.certificate,
                str(self.wall_ns),
            ]
        )


def records_to_csv(records: list[TrialRecord]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(rec.csv_row() for rec in records)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# one trial


def _run_trial(args: tuple) -> TrialRecord:
    (trial_id, seed, ctx, r, s, d, hstar, backend, want_certificates, allow_zero) = args
    rng = RngStream(seed, trial_id)
    system = sample_system(ctx, r, s, d, rng, allow_zero=allow_zero)
    try:
        outcome = run_svs(
            system,
            rng=rng,
            backend=backend,
            hstar=hstar,
            certify=want_certificates and s == 2,
        )
    except CapacityError:
        return TrialRecord(
            trial_id, seed, ctx.q, r, s, d, hstar, backend, "aborted", None, "", (), 0
        )
    cert = ""
    if outcome.certificates:
        cert = outcome.certificates[0].verdict  # first strip: one-shot rate
    return TrialRecord(
        trial_id,
        seed,
        ctx.q,
        r,
        s,
        d,
        hstar,
        backend,
        outcome.status,
        outcome.strip_index,
        cert,
        outcome.strips,
        0,
    )


# ---------------------------------------------------------------------------
# exact rational comparison helpers


def estimate_with_ci(count: int, n: int) -> tuple[float, float, tuple[float, float]]:
    """Frequency estimate with its standard error and a 3-sigma interval.

    At the boundary (count 0 or n) the interval half-width is the
    rule-of-three value 3/n instead.
    """
    if n < 1 or not 0 <= count <= n:
        raise UsageError("need 0 <= count <= n and n >= 1")
    phat = count / n
    se = math.sqrt(phat * (1 - phat) / n)
    if count == 0:
        return phat, se, (0.0, 3 / n)
    if count == n:
        return phat, se, (1 - 3 / n, 1.0)
    return phat, se, (max(phat - 3 * se, 0.0), min(phat + 3 * se, 1.0))


def _widened_distance_ok(count: int, n: int, interval: BoundInterval) -> bool:
    """Exact check: the estimate sits within the interval widened by 3 SE."""
    phat = Fraction(count, n)
    dist = interval.distance(phat)
    if dist == 0:
        return True
    if count in (0, n):
        return dist <= Fraction(3, n)
    se_sq = phat * (1 - phat) / n
    return dist * dist <= 9 * se_sq


def _comparison(name: str, count: int, n: int, interval: BoundInterval) -> dict:
    phat, se, ci = estimate_with_ci(count, n)
    return {
        "name": name,
        "count": count,
        "estimate": phat,
        "se": se,
        "ci3": list(ci),
        "interval": interval.as_dict(),
        "passed": _widened_distance_ok(count, n, interval),
    }


# ---------------------------------------------------------------------------
# experiments


def run_experiment(
    q: int,
    r: int,
    s: int,
    d: int,
    n_trials: int,
    seed: int,
    backend: str = "exhaustive",
    want_certificates: bool = False,
    hstar: int | None = None,
    trial_offset: int = 0,
    workers: int = 1,
    allow_zero: bool = True,
) -> tuple[list[TrialRecord], dict]:
    """N independent searches on fresh random systems, plus the scorecard.

    Returns the per-trial records (trial_id order) and a summary document
    that sets every estimate against its bound interval.
    """
    if n_trials < 1:
        raise UsageError("need at least one trial")
    ctx = field_for_order(q)
    hstar = hstar if hstar is not None else r - s + 1
    t0 = time.monotonic()
    jobs = [
        (trial_offset + t, seed, ctx, r, s, d, hstar, backend, want_certificates, allow_zero)
        for t in range(n_trials)
    ]
    if workers > 1:
        with Pool(workers) as pool:
            records = pool.map(_run_trial, jobs, chunksize=max(1, n_trials // (4 * workers)))
    else:
        records = [_run_trial(job) for job in jobs]
    records.sort(key=lambda rec: rec.trial_id)
    elapsed = time.monotonic() - t0
    summary = summarize(records, q, r, s, d, seed, backend, want_certificates, hstar, elapsed)
    return records, summary


def summarize(
    records: list[TrialRecord],
    q: int,
    r: int,
    s: int,
    d: int,
    seed: int,
    backend: str,
    want_certificates: bool,
    hstar: int,
    elapsed_s: float = 0.0,
) -> dict:
    aborted = sum(1 for rec in records if rec.status == "aborted")
    live = [rec for rec in records if rec.status != "aborted"]
    n = len(live)
    counts = {h: 0 for h in range(1, hstar + 1)}
    failures = 0
    for rec in live:
        if rec.status == "success":
            counts[rec.strip_index] += 1
        else:
            failures += 1
    if sum(counts.values()) + failures != n:
        raise AssertionError("summary counts do not add up")

    comparisons = []
    if n:
        comparisons.append(_comparison("first_strip_exact", counts.get(1, 0), n, first_strip_bounds(q, s, d)))
        for h in range(2, hstar + 1):
            comparisons.append(
                _comparison(f"strip_index_exact[h={h}]", counts[h], n, strip_index_bound(q, s, d, h))
            )
            comparisons.append(
                _comparison(
                    f"strip_index_series[h={h}]", counts[h], n, strip_index_series_bound(q, s, d, h)
                )
            )
        comparisons.append(_comparison("failure_probability", failures, n, failure_bound(q, r, s, d)))

    mean_block = None
    if n:
        values = [rec.strip_index if rec.status == "success" else hstar for rec in live]
        mean_block = _mean_strips_block(values, q, r, s, d)

    cert_block = None
    if want_certificates and s == 2 and n:
        certified = sum(1 for rec in live if rec.certificate == "certified")
        bound = cert_rate_lower_bound(q, s, d)
        rate = Fraction(certified, n)
        if rate >= bound:
            passed = True
        elif certified in (0, n):
            passed = bound - rate <= Fraction(3, n)
        else:
            se_sq = rate * (1 - rate) / n
            passed = (bound - rate) ** 2 <= 9 * se_sq
        cert_block = {
            "certified": certified,
            "rate": float(rate),
            "lower_bound": str(bound),
            "lower_bound_float": float(bound),
            "vacuous": bound == 0,
            "passed": passed,
        }

    summary = {
        "parameters": {
            "q": q,
            "r": r,
            "s": s,
            "d": d,
            "hstar": hstar,
            "seed": seed,
            "backend": backend,
            "want_certificates": want_certificates,
            "trials": len(records),
        },
        "aborted": aborted,
        "counts": {str(h): counts[h] for h in range(1, hstar + 1)},
        "failures": failures,
        "estimates": {
            str(h): _estimate_dict(counts[h], n) for h in range(1, hstar + 1)
        }
        | {"failure": _estimate_dict(failures, n)},
        "comparisons": [_jsonable_comparison(c) for c in comparisons],
        "all_passed": all(c["passed"] for c in comparisons),
        "mean_strips": mean_block,
        "certificates": cert_block,
        "hypotheses": hypothesis_report(q, r, s, d, hstar if hstar > 1 else None),
        "total_runtime_s": round(elapsed_s, 3),
    }
    return summary


def _estimate_dict(count: int, n: int) -> dict:
    if n == 0:
        return {"count": count, "phat": None, "se": None, "ci3": None}
    phat, se, ci = estimate_with_ci(count, n)
    return {"count": count, "phat": phat, "se": se, "ci3": list(ci)}


def _mean_strips_block(values: list[int], q: int, r: int, s: int, d: int) -> dict:
    n = len(values)
    bound = expected_strips_bound(q, r, s, d)
    mean = Fraction(sum(values), n)
    if n > 1:
        ssq = sum(v * v for v in values)
        var = (Fraction(ssq) - n * mean * mean) / (n - 1)
        se_sq_mean = var / n
    else:
        se_sq_mean = Fraction(0)
    if mean <= bound.value:
        passed = True
    else:
        passed = (mean - bound.value) ** 2 <= 9 * se_sq_mean
    return {
        "mean": float(mean),
        "mean_fraction": str(mean),
        "se_mean": math.sqrt(float(se_sq_mean)),
        "bound": bound.as_dict(),
        "passed": passed,
    }


def _jsonable_comparison(c: dict) -> dict:
    out = dict(c)
    out["estimate"] = float(c["estimate"])
    return out


# ---------------------------------------------------------------------------
# exhaustive oracles


def _enum_capacity(q: int, r: int, s: int, d: int) -> int:
    slots = len(monomials(r, d))
    pairs = q ** (s * slots) * q ** (r - s)
    if pairs > ENUM_LIMIT:
        raise CapacityError(f"{pairs} system-strip pairs exceed the 2^26 enumeration cap")
    return slots


def _strip_mask_counts(ctx: FieldCtx, r: int, s: int, d: int, strip: Strip) -> dict[int, int]:
    """For one strip: how many single polynomials have each zero pattern.

    The pattern is a bitmask over the q^s grid points of the strip (bit i
    set = the polynomial vanishes at grid point i, row-major order).
    """
    q = ctx.q
    exps = monomials(r, d)
    grid = []
    for x in itertools.product(ctx.elements(), repeat=s):
        grid.append(tuple(strip) + x)
    # monomial value table per grid point
    tables = []
    for pt in grid:
        row = []
        for e in exps:
            v = 1
            for var, exp in enumerate(e):
                if exp:
                    v = ctx.mul(v, ctx.pow(pt[var], exp))
            row.append(v)
        tables.append(row)
    counts: dict[int, int] = {}
    nslots = len(exps)
    coeffs = [0] * nslots
    total = q ** nslots
    for idx in range(total):
        m = idx
        for i in range(nslots):
            coeffs[i] = m % q
            m //= q
        mask = 0
        for bit, row in enumerate(tables):
            acc = 0
            for c, mv in zip(coeffs, row):
                if c and mv:
                    acc = ctx.add(acc, ctx.mul(c, mv))
            if acc == 0:
                mask |= 1 << bit
        counts[mask] = counts.get(mask, 0) + 1
    return counts


def _tuple_counts(counts: dict[int, int], s: int) -> dict[int, int]:
    """Distribution of the AND of s independent zero patterns."""
    acc = dict(counts)
    for _ in range(s - 1):
        new: dict[int, int] = {}
        for m1, c1 in acc.items():
            for m2, c2 in counts.items():
                key = m1 & m2
                new[key] = new.get(key, 0) + c1 * c2
        acc = new
    return acc


def exhaustive_p1(q: int, r: int, s: int, d: int, strip_order: list[Strip] | None = None) -> Fraction:
    """Exact first-strip success probability by full enumeration.

    Every coefficient vector (zero polynomial included) and every strip
    is visited; the result is the exact fraction of (strip, system)
    pairs whose specialized system has a rational zero.  strip_order, if
    given, must be a permutation of the full strip set.
    """
    slots = _enum_capacity(q, r, s, d)
    ctx = field_for_order(q)
    strips = (
        [tuple(a) for a in itertools.product(ctx.elements(), repeat=r - s)]
        if strip_order is None
        else [tuple(a) for a in strip_order]
    )
    numer = 0
    for strip in strips:
        counts = _strip_mask_counts(ctx, r, s, d, strip)
        for mask, cnt in _tuple_counts(counts, s).items():
            if mask:
                numer += cnt
    denom = len(strips) * q ** (s * slots)
    return Fraction(numer, denom)


def exhaustive_sk(q: int, r: int, s: int, d: int, strips: list[Strip]) -> tuple[Fraction, bool]:
    """Exact fraction of systems with a zero in every one of the given strips.

    Also reports whether the strips' coordinate matrix is invertible (the
    hypothesis of the joint bound); the fraction is computed either way.
    """
    if not strips:
        raise UsageError("need at least one strip")
    slots = _enum_capacity(q, r, s, d)
    ctx = field_for_order(q)
    strips = [tuple(a) for a in strips]
    if len(set(strips)) != len(strips):
        raise UsageError("strips must be distinct")
    exps = monomials(r, d)
    grids = []
    for a in strips:
        pts = [tuple(a) + x for x in itertools.product(ctx.elements(), repeat=s)]
        grids.append(pts)
    tables = []  # per strip: per grid point: monomial values
    for pts in grids:
        tab = []
        for pt in pts:
            row = []
            for e in exps:
                v = 1
                for var, exp in enumerate(e):
                    if exp:
                        v = ctx.mul(v, ctx.pow(pt[var], exp))
                row.append(v)
            tab.append(row)
        tables.append(tab)
    coeffs = [0] * slots
    joint_counts: dict[tuple[int, ...], int] = {}
    for idx in range(q ** slots):
        m = idx
        for i in range(slots):
            coeffs[i] = m % q
            m //= q
        key = []
        for tab in tables:
            mask = 0
            for bit, row in enumerate(tab):
                acc = 0
                for c, mv in zip(coeffs, row):
                    if c and mv:
                        acc = ctx.add(acc, ctx.mul(c, mv))
                if acc == 0:
                    mask |= 1 << bit
            key.append(mask)
        key = tuple(key)
        joint_counts[key] = joint_counts.get(key, 0) + 1
    acc = dict(joint_counts)
    for _ in range(s - 1):
        new: dict[tuple[int, ...], int] = {}
        for k1, c1 in acc.items():
            for k2, c2 in joint_counts.items():
                key = tuple(a & b for a, b in zip(k1, k2))
                new[key] = new.get(key, 0) + c1 * c2
        acc = new
    numer = sum(cnt for key, cnt in acc.items() if all(key))
    mat = m_matrix(strips)
    invertible = matrix_rank(mat, ctx) == len(strips)
    return Fraction(numer, q ** (s * slots)), invertible
