import pytest

from svsearch.errors import DomainError, UsageError
from svsearch.ffield import field_for_order, prime_field
from svsearch.mpoly import (
    MPoly,
    is_squarefree,
    lagrange_interpolate,
    monomials,
    rational_roots,
    resultant_y,
    resultant_y_general,
    sylvester_determinant,
    upoly_deg,
    upoly_eval,
    upoly_gcd,
    upoly_add,
    upoly_monic,
    upoly_mul,
    upoly_sub,
    upoly_trim,
    xq_mod,
)
from svsearch.sampler import RngStream


def P(nvars, terms, ctx):
    return MPoly.from_terms(nvars, terms, ctx)


def random_poly(nvars, d, ctx, rng):
    exps = monomials(nvars, d)
    return P(nvars, [(e, rng.next_below(ctx.q)) for e in exps], ctx)


# ---------------------------------------------------------------------------
# canonical form


def test_monomials_count_and_order():
    exps = monomials(3, 2)
    assert len(exps) == 10  # C(5, 3)
    assert exps[0] == (2, 0, 0)
    assert exps[-1] == (0, 0, 0)
    degs = [sum(e) for e in exps]
    assert degs == sorted(degs, reverse=True)
    for a, b in zip(exps, exps[1:]):
        assert (sum(a), a) > (sum(b), b)


def test_canonical_form_merges_and_drops():
    c5 = prime_field(5)
    f = P(2, [((1, 0), 2), ((1, 0), 3), ((0, 1), 4)], c5)  # 2+3 = 0 mod 5
    assert f.terms == (((0, 1), 4),)
    assert MPoly.zero(3).degree == -1


def test_term_string_roundtrip():
    c7 = prime_field(7)
    rng = RngStream(11, 0)
    for _ in range(50):
        f = random_poly(3, 3, c7, rng)
        g = MPoly.from_term_strings(3, f.term_strings(), c7)
        assert f == g
        # shuffled input parses to the same canonical form
        lines = f.term_strings()[::-1]
        assert MPoly.from_term_strings(3, lines, c7) == f


def test_duplicate_terms_rejected_on_parse():
    c3 = prime_field(3)
    with pytest.raises(UsageError):
        MPoly.from_term_strings(2, ["1 1 0", "2 1 0"], c3)


# ---------------------------------------------------------------------------
# evaluate / specialize


def test_evaluate_examples():
    c5 = prime_field(5)
    f = P(3, [((1, 0, 1), 1), ((0, 2, 0), 1)], c5)  # X1 X3 + X2^2
    assert f.evaluate((1, 2, 3), c5) == 2  # 3 + 4
    assert MPoly.zero(3).evaluate((1, 2, 3), c5) == 0
    c2 = prime_field(2)
    g = P(1, [((2,), 1), ((1,), 1), ((0,), 1)], c2)
    assert g.evaluate((1,), c2) == 1


def test_evaluate_dimension_mismatch():
    c5 = prime_field(5)
    f = P(2, [((1, 0), 1)], c5)
    with pytest.raises(UsageError):
        f.evaluate((1,), c5)


def test_specialize_examples():
    c3 = prime_field(3)
    f = P(3, [((1, 0, 1), 1), ((0, 2, 0), 1), ((0, 0, 0), 1)], c3)  # X1 X3 + X2^2 + 1
    g = f.specialize((2,), c3)
    assert g == P(2, [((0, 1), 2), ((1, 0), 0), ((2, 0), 1), ((0, 0), 1)], c3)
    c2 = prime_field(2)
    h = P(3, [((2, 0, 0), 1), ((1, 0, 0), 1)], c2)  # X1^2 + X1
    assert h.specialize((1,), c2).is_zero()
    k = P(3, [((0, 1, 0), 1), ((0, 0, 1), 1)], c2)  # X2 + X3
    for c in (0, 1):
        assert k.specialize((c,), c2) == P(2, [((1, 0), 1), ((0, 1), 1)], c2)


def test_specialize_errors_and_degree():
    c5 = prime_field(5)
    f = P(2, [((1, 1), 2)], c5)
    with pytest.raises(UsageError):
        f.specialize((1, 2), c5)
    rng = RngStream(3, 1)
    for _ in range(40):
        g = random_poly(3, 3, c5, rng)
        a = (rng.next_below(5),)
        assert g.specialize(a, c5).degree <= g.degree


def test_specialize_composition_and_agreement():
    c7 = prime_field(7)
    rng = RngStream(4, 2)
    for _ in range(40):
        f = random_poly(4, 2, c7, rng)
        a = (rng.next_below(7),)
        b = (rng.next_below(7),)
        x = (rng.next_below(7), rng.next_below(7))
        two_step = f.specialize(a, c7).specialize(b, c7)
        one_step = f.specialize(a + b, c7)
        assert two_step == one_step
        assert one_step.evaluate(x, c7) == f.evaluate(a + b + x, c7)


# ---------------------------------------------------------------------------
# univariate toolkit


def test_upoly_gcd_examples():
    c5 = prime_field(5)
    assert upoly_gcd((4, 0, 1), (4, 1), c5) == (4, 1)  # gcd(X^2-1, X-1) = X-1
    f = (3, 1)
    assert upoly_gcd(f, (), c5) == upoly_monic(f, c5)
    c2 = prime_field(2)
    assert upoly_gcd((0, 1, 1), (1, 0, 1), c2) == (1, 1)
    with pytest.raises(DomainError):
        upoly_gcd((), (), c5)


def test_xq_mod_examples():
    c2 = prime_field(2)
    assert xq_mod((0, 0, 1), c2) == ()  # X^2 mod X^2
    c3 = prime_field(3)
    assert xq_mod((1, 0, 1), c3) == (0, 2)  # X^3 mod (X^2+1) = -X
    for q in (2, 3, 5, 7, 9):
        ctx = field_for_order(q)
        for c in range(q):
            assert xq_mod((ctx.neg(c), 1), ctx) == upoly_trim([c])
    with pytest.raises(UsageError):
        xq_mod((1,), c3)


def test_rational_roots_examples():
    c5 = prime_field(5)
    assert rational_roots((4, 0, 1), c5) == {1, 4}
    c3 = prime_field(3)
    assert rational_roots((1, 0, 1), c3) == set()
    for q in (2, 3, 4, 5):
        ctx = field_for_order(q)
        xq_minus_x = upoly_sub(tuple([0] * q + [1]), (0, 1), ctx)
        assert rational_roots(xq_minus_x, ctx) == set(ctx.elements())
    with pytest.raises(DomainError):
        rational_roots((), c5)


def test_rational_roots_agree_with_scan_small_fields():
    rng = RngStream(17, 0)
    for q in (2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 37, 41, 43, 47, 49, 53, 59, 61, 64):  # every prime power <= 64
        ctx = field_for_order(q)
        for _ in range(10):
            deg = 1 + rng.next_below(4)
            f = upoly_trim([rng.next_below(q) for _ in range(deg)] + [1 + rng.next_below(q - 1)])
            expected = {x for x in ctx.elements() if upoly_eval(f, x, ctx) == 0}
            assert rational_roots(f, ctx) == expected


def test_rational_roots_splitting_path_large_q():
    # q > 2^16 forces the gcd-splitting branch
    ctx = prime_field(131071)  # 2^17 - 1, above the scan threshold
    rng = RngStream(23, 5)
    for _ in range(5):
        roots = {1 + rng.next_below(ctx.q - 1) for _ in range(4)}
        f = (1,)
        for root in roots:
            f = upoly_mul(f, (ctx.neg(root), 1), ctx)
        assert rational_roots(f, ctx) == roots


def test_is_squarefree_examples():
    c7 = prime_field(7)
    f = upoly_mul((6, 1), (5, 1), c7)  # (X-1)(X-2)
    assert is_squarefree(f, c7)
    assert not is_squarefree((0, 0, 1), c7)  # X^2
    c5 = prime_field(5)
    assert is_squarefree((3, 0, 0, 0, 1), c5)  # X^4 - 2
    # derivative vanishes: X^p over GF(p)
    c3 = prime_field(3)
    assert not is_squarefree((0, 0, 0, 1), c3)
    with pytest.raises(DomainError):
        is_squarefree((), c5)


def test_lagrange_interpolation_roundtrip():
    c11 = prime_field(11)
    rng = RngStream(31, 0)
    for _ in range(20):
        deg = rng.next_below(5)
        f = upoly_trim([rng.next_below(11) for _ in range(deg)] + [1 + rng.next_below(10)])
        xs = list(range(upoly_deg(f) + 1))
        ys = [upoly_eval(f, x, c11) for x in xs]
        assert lagrange_interpolate(xs, ys, c11) == f


# ---------------------------------------------------------------------------
# resultants


def test_resultant_examples():
    c5 = prime_field(5)
    f = P(2, [((0, 1), 1), ((1, 0), 4)], c5)  # Y - X
    g = P(2, [((0, 1), 1), ((1, 0), 1)], c5)  # Y + X
    assert resultant_y(f, g, c5) == (0, 2)
    a, b = 2, 4
    fa = P(2, [((0, 1), 1), ((0, 0), c5.neg(a))], c5)
    gb = P(2, [((0, 1), 1), ((0, 0), c5.neg(b))], c5)
    assert resultant_y(fa, gb, c5) == upoly_trim([c5.sub(a, b)])
    f = P(2, [((2, 0), 1), ((0, 1), 4)], c5)  # Y1^2 - Y2
    g = P(2, [((0, 2), 1), ((0, 0), 3)], c5)  # Y2^2 - 2
    assert resultant_y(f, g, c5) == (3, 0, 0, 0, 1)  # Y1^4 - 2


def test_resultant_usage_errors():
    c5 = prime_field(5)
    const_in_y = P(2, [((2, 0), 1)], c5)
    g = P(2, [((0, 1), 1)], c5)
    with pytest.raises(UsageError):
        resultant_y(const_in_y, g, c5)
    with pytest.raises(UsageError):
        resultant_y(MPoly.zero(2), g, c5)


def _sylvester_symbolic(f, g, ctx):
    """Slow oracle: the Sylvester determinant with polynomial entries,
    expanded by cofactors."""
    fc = f.coeffs_in_last_var(ctx)
    gc = g.coeffs_in_last_var(ctx)
    n, m = len(fc) - 1, len(gc) - 1
    size = n + m
    rows = []
    frow = list(reversed(fc))
    grow = list(reversed(gc))
    for i in range(m):
        rows.append([()] * i + frow + [()] * (size - n - 1 - i))
    for i in range(n):
        rows.append([()] * i + grow + [()] * (size - m - 1 - i))

    def det(mat):
        if len(mat) == 1:
            return mat[0][0]
        acc = ()
        for j, entry in enumerate(mat[0]):
            if not entry:
                continue
            minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
            term = upoly_mul(entry, det(minor), ctx)
            acc = upoly_sub(acc, term, ctx) if j % 2 else upoly_add(acc, term, ctx)
        return acc

    return det(rows)


def test_resultant_matches_symbolic_sylvester():
    rng = RngStream(47, 0)
    for q in (2, 3, 5, 7):
        ctx = field_for_order(q)
        trials = 0
        while trials < 12:
            f = random_poly(2, 3, ctx, rng)
            g = random_poly(2, 3, ctx, rng)
            fc = f.coeffs_in_last_var(ctx) if not f.is_zero() else []
            gc = g.coeffs_in_last_var(ctx) if not g.is_zero() else []
            if len(fc) - 1 < 1 or len(gc) - 1 < 1:
                continue
            trials += 1
            assert resultant_y(f, g, ctx) == _sylvester_symbolic(f, g, ctx)


def test_resultant_vanishes_iff_shared_root_or_lc_collapse():
    rng = RngStream(53, 0)
    for q in (3, 5, 7):
        ctx = field_for_order(q)
        trials = 0
        while trials < 10:
            f = random_poly(2, 2, ctx, rng)
            g = random_poly(2, 2, ctx, rng)
            if f.is_zero() or g.is_zero():
                continue
            fc = f.coeffs_in_last_var(ctx)
            gc = g.coeffs_in_last_var(ctx)
            if len(fc) - 1 < 1 or len(gc) - 1 < 1:
                continue
            res = resultant_y(f, g, ctx)
            if not res:
                continue  # identically zero: shared factor, nothing to scan
            trials += 1
            lcf, lcg = fc[-1], gc[-1]
            for x0 in ctx.elements():
                f0 = upoly_trim([upoly_eval(c, x0, ctx) for c in fc])
                g0 = upoly_trim([upoly_eval(c, x0, ctx) for c in gc])
                both_lc_vanish = (
                    upoly_eval(lcf, x0, ctx) == 0 and upoly_eval(lcg, x0, ctx) == 0
                )
                if not f0 and not g0:
                    shares = True
                elif not f0:
                    shares = upoly_deg(g0) >= 1
                elif not g0:
                    shares = upoly_deg(f0) >= 1
                else:
                    shares = upoly_deg(upoly_gcd(f0, g0, ctx)) >= 1
                vanishes = upoly_eval(res, x0, ctx) == 0
                assert vanishes == (shares or both_lc_vanish), (q, f.terms, g.terms, x0)


def test_resultant_general_conventions():
    c5 = prime_field(5)
    f = P(2, [((2, 0), 1)], c5)  # Y1^2, constant in Y
    g = P(2, [((0, 2), 1)], c5)  # Y2^2
    assert resultant_y_general(f, g, c5) == (0, 0, 0, 0, 1)  # Y1^4
    assert resultant_y_general(f, P(2, [((1, 0), 1)], c5), c5) is None
    assert resultant_y_general(MPoly.zero(2), g, c5) == ()


def test_sylvester_determinant_requires_positive_degrees():
    c5 = prime_field(5)
    with pytest.raises(UsageError):
        sylvester_determinant((1,), (0, 1), c5)


def test_resultant_root_criterion_matches_extension_scan():
    # dual route for the vanishing criterion: a nonconstant gcd of the two
    # specialized univariates must mean a genuinely shared root in a small
    # extension, found by explicit scanning through the lift
    from svsearch.mpoly import lift_with_embedding

    rng = RngStream(61, 0)
    for q in (2, 3, 5):
        ctx = field_for_order(q)
        checked = 0
        while checked < 8:
            f = random_poly(2, 2, ctx, rng)
            g = random_poly(2, 2, ctx, rng)
            if f.is_zero() or g.is_zero():
                continue
            fc = f.coeffs_in_last_var(ctx)
            gc = g.coeffs_in_last_var(ctx)
            if len(fc) - 1 < 1 or len(gc) - 1 < 1:
                continue
            checked += 1
            for x0 in ctx.elements():
                f0 = upoly_trim([upoly_eval(c, x0, ctx) for c in fc])
                g0 = upoly_trim([upoly_eval(c, x0, ctx) for c in gc])
                if not f0 or not g0 or upoly_deg(f0) < 1 or upoly_deg(g0) < 1:
                    continue
                gcd_says = upoly_deg(upoly_gcd(f0, g0, ctx)) >= 1
                # scan GF(q^e) for e up to the smaller degree: any common
                # root of the pair lives that low
                emax = min(upoly_deg(f0), upoly_deg(g0))
                scan_says = False
                for e in range(1, emax + 1):
                    ext, embed, _ = lift_with_embedding(ctx, e)
                    lift = (lambda c: c) if embed is None else embed
                    fe = tuple(lift(c) for c in f0)
                    ge = tuple(lift(c) for c in g0)
                    for y in ext.elements():
                        if upoly_eval(fe, y, ext) == 0 and upoly_eval(ge, y, ext) == 0:
                            scan_says = True
                            break
                    if scan_says:
                        break
                assert gcd_says == scan_says, (q, x0, f0, g0)
