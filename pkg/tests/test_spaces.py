"""Canonical presentations and lattice operations of compact open subspaces."""

import random

import pytest

from llcent.errors import NotContained, ProfileMismatch
from llcent.fields import PrimeField
from llcent.linalg import SubspaceBasis
from llcent.spaces import (
    BlockwisePattern,
    CompactOpenSubspace,
    LlcVector,
    Profile,
    blockwise_restrict_quotient,
    canonicalize,
    cofinal_chain,
    open_combine,
    open_quotient_dim,
)

from _dense import dim_of, subspace_bits, span_set, vector_bits

F2 = PrimeField(2)
F3 = PrimeField(3)
P1 = Profile.constant(F2, 1)
P2 = Profile.constant(F2, 2)


def unit(profile, n, i=0):
    return LlcVector.unit(profile, n, i)


class TestCanonicalization:
    def test_tail_generators_absorb(self):
        w = canonicalize(P1, -2, [unit(P1, -1), unit(P1, 0)])
        assert (w.tail, w.top, w.window.rank) == (0, 0, 0)
        assert w == cofinal_chain(P1, 0)

    def test_window_reduces_to_rref(self):
        g = unit(P1, 1).add(unit(P1, 2))
        w = canonicalize(P1, 0, [g, unit(P1, 2)])
        assert w.window.mat.tolist() == [[1, 0], [0, 1]]
        assert w == cofinal_chain(P1, 2)

    def test_single_tail_generator(self):
        w = canonicalize(P1, -1, [unit(P1, 0)])
        assert w == cofinal_chain(P1, 0)

    def test_idempotent(self):
        w = canonicalize(P1, -3, [unit(P1, -1), unit(P1, 1).add(unit(P1, 2))])
        again = canonicalize(P1, w.tail, w.window_vectors())
        assert w == again

    def test_partial_block_not_absorbed(self):
        w = canonicalize(P2, -1, [unit(P2, 0, 0)])
        assert w.tail == -1
        assert w.window.rank == 1

    def test_tail_cap_at_zero(self):
        w = canonicalize(P1, 0, [unit(P1, 1)])
        assert w.tail == 0 and w.top == 1


class TestMembership:
    def test_tail_members(self):
        c0 = cofinal_chain(P1, 0)
        assert c0.member(unit(P1, -5))
        assert not c0.member(unit(P1, 1))

    def test_window_member(self):
        g = unit(P1, 1).add(unit(P1, 2))
        w = canonicalize(P1, 0, [g])
        assert w.member(g)
        assert not w.member(unit(P1, 1))
        assert w.member(LlcVector.zero(P1))

    def test_profile_mismatch(self):
        with pytest.raises(ProfileMismatch):
            cofinal_chain(P1, 0).member(unit(P2, 0, 0))


class TestCombine:
    def test_chain_containments(self):
        c2, c5 = cofinal_chain(P1, 2), cofinal_chain(P1, 5)
        assert open_combine(c2, c5, "sum") == c5
        assert open_combine(c2, c5, "intersect") == c2

    def test_tails_merge(self):
        a = CompactOpenSubspace.make(P1, -1)
        b = CompactOpenSubspace.make(P1, 0)
        assert open_combine(a, b, "sum") == b
        assert open_combine(a, b, "intersect") == a

    def test_quotient_examples(self):
        for m, k in ((5, 2), (3, 3), (4, 0)):
            got = open_quotient_dim(cofinal_chain(P1, m), cofinal_chain(P1, k))
            assert got == m - k
        assert open_quotient_dim(cofinal_chain(P2, 1), cofinal_chain(P2, 0)) == 2

    def test_not_contained(self):
        with pytest.raises(NotContained):
            open_quotient_dim(cofinal_chain(P1, 1), canonicalize(P1, 0, [unit(P1, 2)]))


class TestCofinalChain:
    def test_base(self):
        c0 = cofinal_chain(P1, 0)
        assert (c0.tail, c0.window.rank) == (0, 0)

    def test_nested(self):
        for m in range(20):
            assert open_quotient_dim(cofinal_chain(P1, m + 1), cofinal_chain(P1, m)) == 1

    def test_dimension_count(self):
        for m in range(6):
            assert open_quotient_dim(cofinal_chain(P1, m), cofinal_chain(P1, 0)) == m

    def test_cofinal_for_canonical_subspaces(self):
        rng = random.Random(3)
        for _ in range(20):
            w = random_subspace(rng, P1)
            cm = cofinal_chain(P1, max(w.top, 0))
            assert open_quotient_dim(cm, w) >= 0


def random_subspace(rng, profile, tail_lo=-3, top_hi=3):
    tail = rng.randint(tail_lo, 0)
    gens = []
    for _ in range(rng.randint(0, 3)):
        support = {}
        for n in range(tail + 1, top_hi + 1):
            for i in range(profile.dim(n)):
                if rng.random() < 0.5:
                    support[(n, i)] = rng.randrange(1, profile.field.p)
        gens.append(LlcVector(profile, support))
    return CompactOpenSubspace.make(profile, tail, gens)


class TestCanonicalEquality:
    def test_non_canonical_presentations_agree(self):
        rng = random.Random(17)
        for _ in range(60):
            w = random_subspace(rng, P1)
            # re-present with a deeper tail and redundant generators
            deeper = w.tail - rng.randint(0, 2)
            gens = [unit(P1, n) for n in range(deeper + 1, w.tail + 1)]
            gens += w.window_vectors()
            mixed = list(gens)
            if len(gens) >= 2:
                mixed.append(gens[0].add(gens[1]))
            rng.shuffle(mixed)
            assert canonicalize(P1, deeper, mixed) == w

    def test_scaled_generators_gf3(self):
        p = Profile.constant(F3, 1)
        g = unit(p, 1).add(unit(p, 2).scale(2))
        w1 = canonicalize(p, 0, [g])
        w2 = canonicalize(p, 0, [g.scale(2)])
        assert w1 == w2


class TestLatticeLaws:
    def test_laws_on_random_triples(self):
        rng = random.Random(29)
        for _ in range(40):
            a, b, c = (random_subspace(rng, P1) for _ in range(3))
            for mode in ("sum", "intersect"):
                assert open_combine(a, b, mode) == open_combine(b, a, mode)
                lhs = open_combine(open_combine(a, b, mode), c, mode)
                rhs = open_combine(a, open_combine(b, c, mode), mode)
                assert lhs == rhs
            # absorption
            assert open_combine(a, open_combine(a, b, "intersect"), "sum") == a
            assert open_combine(a, open_combine(a, b, "sum"), "intersect") == a

    def test_modular_dimension_additivity(self):
        rng = random.Random(37)
        for _ in range(40):
            a, b = random_subspace(rng, P1), random_subspace(rng, P1)
            mid = open_combine(a, b, "sum")
            c = open_combine(mid, cofinal_chain(P1, rng.randint(0, 3)), "sum")
            assert open_quotient_dim(c, a) == open_quotient_dim(c, mid) + open_quotient_dim(mid, a)


class TestDenseOracle:
    LO, HI = -3, 3

    def test_combine_and_quotient_match_enumeration(self):
        rng = random.Random(41)
        for _ in range(120):
            a = random_subspace(rng, P1, tail_lo=self.LO, top_hi=self.HI)
            b = random_subspace(rng, P1, tail_lo=self.LO, top_hi=self.HI)
            sa, sb = subspace_bits(a, self.LO, self.HI), subspace_bits(b, self.LO, self.HI)
            total = open_combine(a, b, "sum")
            inter = open_combine(a, b, "intersect")
            assert subspace_bits(total, self.LO, self.HI) == span_set(sorted(sa | sb))
            assert subspace_bits(inter, self.LO, self.HI) == sa & sb
            assert open_quotient_dim(total, a) == dim_of(span_set(sorted(sa | sb))) - dim_of(sa)


class TestBlockwise:
    def test_full_pattern_is_identity(self):
        pat = BlockwisePattern.full(P2)
        u = cofinal_chain(P2, 1)
        uw, uq = blockwise_restrict_quotient(pat, u)
        assert uw == cofinal_chain(pat.sub_profile(), 1)
        assert uq.window.rank == 0 and uq.tail == 0

    def test_slot_split(self):
        pat = BlockwisePattern.first_slots(P2, 1)
        uw, uq = blockwise_restrict_quotient(pat, cofinal_chain(P2, 1))
        assert uw == cofinal_chain(pat.sub_profile(), 1)
        assert uq == cofinal_chain(pat.quotient_profile(), 1)

    def test_zero_pattern(self):
        pat = BlockwisePattern.zero(P1)
        u = cofinal_chain(P1, 2)
        uw, uq = blockwise_restrict_quotient(pat, u)
        assert uw.window.rank == 0
        assert uq == cofinal_chain(pat.quotient_profile(), 2)

    def test_diagonal_pattern_restriction(self):
        # W_n = span{(1,1)} at every level; U = C_1
        diag = SubspaceBasis.span(F2, [[1, 1]])
        pat = BlockwisePattern.make(P2, diag, {0: diag}, diag)
        uw, uq = blockwise_restrict_quotient(pat, cofinal_chain(P2, 1))
        assert uw == cofinal_chain(pat.sub_profile(), 1)
        assert uq == cofinal_chain(pat.quotient_profile(), 1)

    def test_window_intersection(self):
        # U with a mixed-slot window generator against the first-slot pattern
        pat = BlockwisePattern.first_slots(P2, 1)
        g = LlcVector(P2, {(1, 0): 1, (1, 1): 1})
        u = canonicalize(P2, 0, [g])
        uw, uq = blockwise_restrict_quotient(pat, u)
        assert uw.window.rank == 0  # the generator leaves the pattern
        assert uq.window.rank == 1  # but survives in the quotient


class TestProfileShapes:
    def test_flags(self):
        assert P1.is_constant()
        discrete = Profile(F2, 0, (0, 2), 2, 0, 1)
        assert discrete.is_discrete() and not discrete.is_linearly_compact()
        compact = Profile(F2, 1, (1, 0), 0, 0, 1)
        assert compact.is_linearly_compact() and not compact.is_discrete()

    def test_bad_profiles_rejected(self):
        with pytest.raises(ValueError):
            Profile(F2, 1, (1,), 1, 1, 1)
        with pytest.raises(ValueError):
            Profile(F2, 1, (1, 1), 1, 0, 0)

    def test_zero_dim_levels_absorbed(self):
        gappy = Profile(F2, 1, (0, 1, 0), 1, -1, 1)
        w = canonicalize(gappy, -2, [unit(gappy, 0)])
        assert w.tail == 0 and w.window.rank == 0
