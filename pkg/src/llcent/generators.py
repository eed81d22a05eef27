"""Seeded random instances for property campaigns and tests.

Automorphisms are built constructively (shifts, levelwise changes of
basis, unipotent finite-window perturbations) so an exact inverse is
always available; invariant patterns for the addition checks are built
as slot subsets preserved by block-diagonal operators.
"""

from __future__ import annotations

import random

from .linalg import SubspaceBasis, invert_matrix
from .operators import (
    BandedOperator,
    compose,
    identity_operator,
    make_shift,
    operator_add,
    scale_operator,
    verify_inverse,
    zero_operator,
    _boundary_span,
)
from .spaces import BlockwisePattern, CompactOpenSubspace, LlcVector, Profile


def random_matrix(rng: random.Random, field, rows: int, cols: int):
    if rows == 0 or cols == 0:
        return field.zeros(rows, cols)
    if hasattr(field, "p"):
        return field.array([[rng.randrange(field.p) for _ in range(cols)] for _ in range(rows)])
    return field.array([[rng.randint(-3, 3) for _ in range(cols)] for _ in range(rows)])


def random_invertible(rng: random.Random, field, n: int):
    while True:
        m = random_matrix(rng, field, n, n)
        if invert_matrix(field, m) is not None:
            return m


def random_vector(rng: random.Random, profile: Profile, levels) -> LlcVector:
    support = {}
    for n in levels:
        for i in range(profile.dim(n)):
            if rng.random() < 0.5:
                v = rng.randrange(1, profile.field.p) if hasattr(profile.field, "p") else rng.randint(1, 3)
                support[(n, i)] = v
    return LlcVector(profile, support)


def random_open_subspace(
    rng: random.Random, profile: Profile, tail_lo: int = -3, top_hi: int = 3
) -> CompactOpenSubspace:
    tail = rng.randint(tail_lo, 0)
    gens = [
        random_vector(rng, profile, range(tail + 1, top_hi + 1))
        for _ in range(rng.randint(0, 3))
    ]
    return CompactOpenSubspace.make(profile, tail, gens)


def random_endomorphism(
    rng: random.Random, profile: Profile, width: int = 1, boundary: int = 2
) -> BandedOperator:
    """A random banded eventually-stationary operator (no invertibility)."""
    f = profile.field
    left = {j: random_matrix(rng, f, profile.d_left, profile.d_left) for j in range(-width, width + 1)}
    right = {j: random_matrix(rng, f, profile.d_right, profile.d_right) for j in range(-width, width + 1)}
    b_lo = min(profile.n_lo - width, -boundary)
    b_hi = max(profile.n_hi + width, boundary)
    columns = {}
    for n in range(b_lo, b_hi + 1):
        per = []
        for _i in range(profile.dim(n)):
            lo, hi = n - width, n + width
            vec = random_vector(rng, profile, range(lo, hi + 1))
            per.append(vec)
        columns[n] = per
    return BandedOperator(profile, width, left, right, columns)


def levelwise_change_of_basis(
    rng: random.Random, profile: Profile, window: tuple = (-1, 1)
):
    """A width-0 automorphism acting by an invertible matrix at each level."""
    f = profile.field
    left_m = random_invertible(rng, f, profile.d_left)
    right_m = random_invertible(rng, f, profile.d_right)
    lo = min(window[0], profile.n_lo)
    hi = max(window[1], profile.n_hi)
    mats = {n: random_invertible(rng, f, profile.dim(n)) for n in range(lo, hi + 1)}

    def build(level_mat, lmat, rmat):
        columns = {}
        for n in range(lo, hi + 1):
            m = level_mat[n]
            per = []
            for i in range(profile.dim(n)):
                support = {(n, r): m[r, i] for r in range(profile.dim(n)) if m[r, i] != 0}
                per.append(LlcVector(profile, support))
            columns[n] = per
        return BandedOperator(profile, 0, {0: lmat}, {0: rmat}, columns)

    op = build(mats, left_m, right_m)
    inv_mats = {n: invert_matrix(f, m) for n, m in mats.items()}
    inv = build(inv_mats, invert_matrix(f, left_m), invert_matrix(f, right_m))
    return op, inv


def unipotent_pair(rng: random.Random, profile: Profile, src_window: tuple = (-2, 1)):
    """(1 + N, 1 - N + N^2 - ...) for a strictly level-increasing nilpotent N."""
    f = profile.field
    width = 1
    step = rng.choice((1, -1))
    b_lo = min(profile.n_lo - width, src_window[0] - width)
    b_hi = max(profile.n_hi + width, src_window[1] + width)
    columns = {}
    for n in range(b_lo, b_hi + 1):
        per = []
        for _i in range(profile.dim(n)):
            if src_window[0] <= n <= src_window[1]:
                vec = random_vector(rng, profile, [n + step])
            else:
                vec = LlcVector.zero(profile)
            per.append(vec)
        columns[n] = per
    nil = BandedOperator(profile, width, {}, {}, columns)

    ident = identity_operator(profile)
    op = operator_add(ident, nil)
    inv = ident
    term = nil
    sign = -1
    zero = zero_operator(profile)
    minus_one = f.neg(f.one)
    while not term == zero:
        inv = operator_add(inv, scale_operator(term, f.one if sign > 0 else minus_one))
        term = compose(nil, term)
        sign = -sign
    return op, inv


def random_automorphism(
    rng: random.Random, profile: Profile, max_width: int = 2, boundary: int = 3
):
    """A random banded automorphism with its exact inverse.

    Composes a few invertible factors; retries until the band width and
    boundary region fit the requested budget.
    """
    for _attempt in range(64):
        factors = []
        n_factors = rng.randint(1, 3)
        used_width = 0
        for _ in range(n_factors):
            kind = rng.choice(("shift", "cob", "unipotent"))
            if kind == "shift" and used_width < max_width and profile.is_constant():
                direction = rng.choice(("left", "right"))
                other = "left" if direction == "right" else "right"
                factors.append((make_shift(profile, direction), make_shift(profile, other)))
                used_width += 1
            elif kind == "unipotent" and used_width < max_width:
                factors.append(unipotent_pair(rng, profile, (-2, 1)))
                used_width += 1
            else:
                factors.append(levelwise_change_of_basis(rng, profile, (-1, 1)))
        op = factors[0][0]
        for fwd, _back in factors[1:]:
            op = compose(op, fwd)
        inv = _reverse_inverse(factors)
        if op.width <= max_width and op.b_lo >= -boundary and op.b_hi <= boundary:
            assert verify_inverse(op, inv), "generator produced a bad inverse pair"
            return op, inv
    raise RuntimeError("could not fit an automorphism into the requested budget")


def _reverse_inverse(factors):
    rev = factors[-1][1]
    for _fwd, back in reversed(factors[:-1]):
        rev = compose(rev, back)
    return rev


def block_diagonal_instance(rng: random.Random, field, dims: tuple):
    """A block-diagonal operator on a constant profile of total dimension sum(dims).

    Each slot group carries an independent shift-flavoured automorphism;
    any union of groups yields an invariant slot-subset pattern.  Returns
    (op, inverse, group slot index sets, group entropies by closed form).
    """
    from .entropy import shift_closed_form
    from .operators import direct_sum_operator

    parts = []
    ents = []
    for d in dims:
        sub_profile = Profile.constant(field, d)
        direction = rng.choice(("left", "right"))
        other = "left" if direction == "right" else "right"
        op, inv = make_shift(sub_profile, direction), make_shift(sub_profile, other)
        if rng.random() < 0.5:
            cob, cob_inv = levelwise_change_of_basis(rng, sub_profile, (0, 0))
            op = compose(cob, compose(op, cob_inv))
            inv = compose(cob, compose(inv, cob_inv))
        parts.append((op, inv))
        ents.append(shift_closed_form(sub_profile, direction, 1))
    op, inv = parts[0]
    groups = []
    start = 0
    for d in dims:
        groups.append(tuple(range(start, start + d)))
        start += d
    for nxt, nxt_inv in parts[1:]:
        op = direct_sum_operator(op, nxt)
        inv = direct_sum_operator(inv, nxt_inv)
    return op, inv, groups, ents


def group_pattern(profile: Profile, groups, chosen) -> BlockwisePattern:
    slots = sorted(s for g in chosen for s in g)
    return BlockwisePattern.slot_subset(profile, slots)
