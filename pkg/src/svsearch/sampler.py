"""Uniform random systems and strips from deterministic 64-bit streams.

The generator is a SplitMix64 walk; a stream is addressed by (seed,
stream_id) and two streams with the same address produce identical bytes
on every host, which is what makes experiments replayable and
worker-count independent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError, DomainError, UsageError
from .ffield import FieldCtx, FMatrix
from .mpoly import MPoly, monomials

_M64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

Strip = tuple[int, ...]

MAX_STRIPS = 1 << 20


def _mix64(z: int) -> int:
    z &= _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


class RngStream:
    """One independently addressable SplitMix64 stream."""

    __slots__ = ("seed", "stream_id", "state")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = seed & _M64
        self.stream_id = stream_id & _M64
        self.state = _mix64(self.seed ^ _mix64((self.stream_id + 1) * _GAMMA))

    def next_u64(self) -> int:
        self.state = s = (self.state + _GAMMA) & _M64
        z = ((s ^ (s >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Unbiased draw from [0, n) by rejection."""
        if n <= 0:
            raise UsageError("bound must be positive")
        if n == 1:
            return 0
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n


@dataclass(frozen=True)
class SystemSpec:
    """An input instance: s polynomials of degree <= d in r variables."""

    ctx: FieldCtx
    r: int
    s: int
    d: int
    polys: tuple[MPoly, ...]

    def __post_init__(self) -> None:
        if not 1 < self.s < self.r:
            raise UsageError(f"need 1 < s < r, got s={self.s}, r={self.r}")
        if self.d < 2:
            raise UsageError(f"degree bound must be >= 2, got {self.d}")
        if len(self.polys) != self.s:
            raise UsageError(f"expected {self.s} polynomials, got {len(self.polys)}")
        for f in self.polys:
            if f.nvars != self.r:
                raise UsageError("polynomial variable count does not match r")
            if f.degree > self.d:
                raise UsageError("polynomial degree exceeds the bound d")

    @property
    def coeff_slots(self) -> int:
        """Number of coefficient slots per polynomial."""
        return len(monomials(self.r, self.d))

    @property
    def hstar(self) -> int:
        """Default strip budget r - s + 1."""
        return self.r - self.s + 1


def sample_system(
    ctx: FieldCtx, r: int, s: int, d: int, rng: RngStream, allow_zero: bool = True
) -> SystemSpec:
    """Draw every coefficient independently and uniformly from the field.

    Slots follow the canonical monomial order.  With allow_zero=False an
    all-zero polynomial is rejected and redrawn.
    """
    if not 1 < s < r:
        raise UsageError(f"need 1 < s < r, got s={s}, r={r}")
    if d < 2:
        raise UsageError(f"degree bound must be >= 2, got {d}")
    exps = monomials(r, d)
    q = ctx.q
    polys = []
    for _ in range(s):
        while True:
            coeffs = [rng.next_below(q) for _ in range(len(exps))]
            if allow_zero or any(coeffs):
                break
        polys.append(MPoly.from_terms(r, zip(exps, coeffs), ctx))
    return SystemSpec(ctx, r, s, d, tuple(polys))


def sample_strips(ctx: FieldCtx, m: int, h: int, rng: RngStream) -> list[Strip]:
    """h pairwise-distinct strips, uniform over injective sequences.

    Strips are drawn one at a time with rejection on collision, so the
    first k outputs coincide with a call that asked for only k: budgets
    can be extended without disturbing the prefix.
    """
    if m < 1:
        raise UsageError("strips need at least one coordinate")
    if h > MAX_STRIPS:
        raise CapacityError(f"strip count {h} exceeds 2^20 cap")
    if h > ctx.q ** m:
        raise DomainError(f"cannot draw {h} distinct strips from {ctx.q ** m}")
    q = ctx.q
    seen: set[Strip] = set()
    out: list[Strip] = []
    while len(out) < h:
        cand = tuple(rng.next_below(q) for _ in range(m))
        if cand in seen:
            continue
        seen.add(cand)
        out.append(cand)
    return out


# ---------------------------------------------------------------------------
# matrix builders for the rank properties of the sampling arguments


def m_matrix(strips: list[Strip]) -> FMatrix:
    """Square matrix with row i = (1, a_i1, ..., a_i,h-1)."""
    h = len(strips)
    if h < 1:
        raise UsageError("need at least one strip")
    for a in strips:
        if len(a) < h - 1:
            raise DomainError(f"strip {a} has fewer than {h - 1} coordinates")
    entries: list[int] = []
    for a in strips:
        entries.append(1)
        entries.extend(a[: h - 1])
    return FMatrix(h, h, entries)


def vandermonde_a(points: list[tuple[int, ...]], d: int, ctx: FieldCtx) -> FMatrix:
    """Rows = all monomials of degree <= d evaluated at each point.

    The points must be pairwise distinct and there must be at most d + 1
    of them; under those conditions the matrix always has full row rank.
    """
    s = len(points)
    if s == 0:
        raise UsageError("need at least one point")
    if len(set(points)) != s:
        raise DomainError("points must be pairwise distinct")
    if s > d + 1:
        raise UsageError(f"rank property needs at most d + 1 = {d + 1} points")
    r = len(points[0])
    if any(len(pt) != r for pt in points):
        raise UsageError("points must share a dimension")
    exps = monomials(r, d)
    entries: list[int] = []
    for pt in points:
        for e in exps:
            v = 1
            for var, exp in enumerate(e):
                if exp:
                    v = ctx.mul(v, ctx.pow(pt[var], exp))
            entries.append(v)
    return FMatrix(s, len(exps), entries)


def condition_matrix(
    strips: list[Strip],
    point_sets: list[list[tuple[int, ...]]],
    d: int,
    r: int,
    ctx: FieldCtx,
) -> FMatrix:
    """Stacked monomial-evaluation rows at (a_i, x) for x in the i-th set.

    Encodes the linear conditions "vanish on X_i inside strip a_i" on the
    coefficients of a degree-<= d polynomial in r variables.  Set sizes
    must be descending and bounded by d.
    """
    h = len(strips)
    if h == 0 or len(point_sets) != h:
        raise UsageError("need one point set per strip")
    sizes = [len(ps) for ps in point_sets]
    if any(j < 1 for j in sizes) or any(sizes[i] < sizes[i + 1] for i in range(h - 1)):
        raise UsageError(f"set sizes must be descending and >= 1, got {sizes}")
    if sizes[0] > d:
        raise UsageError(f"largest set size {sizes[0]} exceeds degree bound {d}")
    for ps in point_sets:
        if len(set(ps)) != len(ps):
            raise UsageError("points within a set must be distinct")
    s_dim = len(point_sets[0][0])
    if any(len(x) != s_dim for ps in point_sets for x in ps):
        raise UsageError("points must share a dimension")
    exps = monomials(r, d)
    entries: list[int] = []
    nrows = 0
    for a, ps in zip(strips, point_sets):
        if len(a) + s_dim != r:
            raise UsageError("strip length plus point dimension must equal r")
        for x in ps:
            full = tuple(a) + tuple(x)
            for e in exps:
                v = 1
                for var, exp in enumerate(e):
                    if exp:
                        v = ctx.mul(v, ctx.pow(full[var], exp))
                entries.append(v)
            nrows += 1
    return FMatrix(nrows, len(exps), entries)
