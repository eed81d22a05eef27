"""Locally linearly compact spaces presented by dimension profiles.

The ambient space is V = prod_{n<=0} K^{d(n)}  (+)  sum_{n>0} K^{d(n)},
where d is an eventually constant dimension profile over the integer
levels.  Levels <= 0 carry the full product (the linearly compact side),
levels > 0 the direct sum (the discrete side).  Writing U_a for the set
of all coordinates at levels <= a, the family {U_a : a <= 0} is a
neighborhood basis at 0 of linearly compact open subspaces.

Every linearly compact open subspace W admits a canonical finite
presentation (tail cut, window basis), and this module is built on that
fact.  Sketch: W is open, so it contains some U_a.  The quotient W/U_a
is discrete (U_a is open) and linearly compact (continuous image of W),
hence finite-dimensional, and finite-dimensional subspaces of
V/U_a = sum_{n>a} K^{d(n)} are supported on finitely many levels.  So
W = U_a (+) S for a finite window subspace S; taking the largest
admissible a <= 0 and the unique reduced echelon basis of S over the
flattened window coordinates (level ascending, slot ascending) makes the
presentation canonical: two subspaces are equal iff their presentations
are identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .errors import NotContained, ProfileMismatch
from .linalg import SubspaceBasis, subspace_combine


@dataclass(frozen=True)
class Profile:
    """Eventually constant dimension function d: levels -> naturals."""

    field: object
    d_left: int
    boundary: tuple
    d_right: int
    n_lo: int
    n_hi: int

    def __post_init__(self):
        if self.n_lo > 0 or self.n_hi < 0:
            raise ValueError("profile boundary must satisfy n_lo <= 0 <= n_hi")
        if len(self.boundary) != self.n_hi - self.n_lo + 1:
            raise ValueError("boundary list must cover levels n_lo..n_hi")
        if self.d_left < 0 or self.d_right < 0 or any(d < 0 for d in self.boundary):
            raise ValueError("dimensions must be non-negative")

    @classmethod
    def constant(cls, field, d: int) -> "Profile":
        return cls(field, d, (d,), d, 0, 0)

    @classmethod
    def from_dims(cls, field, dims_by_level: dict, d_left: int, d_right: int) -> "Profile":
        lo = min(min(dims_by_level, default=0), 0)
        hi = max(max(dims_by_level, default=0), 0)
        boundary = tuple(
            dims_by_level.get(n, d_left if n < lo else d_right) for n in range(lo, hi + 1)
        )
        return cls(field, d_left, boundary, d_right, lo, hi)

    def dim(self, n: int) -> int:
        if n < self.n_lo:
            return self.d_left
        if n > self.n_hi:
            return self.d_right
        return self.boundary[n - self.n_lo]

    def is_constant(self) -> bool:
        return all(d == self.d_left for d in self.boundary) and self.d_right == self.d_left

    def is_discrete(self) -> bool:
        """All levels <= 0 are zero-dimensional (V is a discrete space)."""
        return self.d_left == 0 and all(
            self.boundary[n - self.n_lo] == 0 for n in range(self.n_lo, 1)
        )

    def is_linearly_compact(self) -> bool:
        """All levels > 0 are zero-dimensional (V is linearly compact)."""
        return self.d_right == 0 and all(
            self.boundary[n - self.n_lo] == 0 for n in range(1, self.n_hi + 1)
        )

    # -- window flattening: coordinates of levels in (a, b] ----------------
    @lru_cache(maxsize=4096)
    def window_coords(self, a: int, b: int):
        return [(n, i) for n in range(a + 1, b + 1) for i in range(self.dim(n))]

    @lru_cache(maxsize=4096)
    def window_dim(self, a: int, b: int) -> int:
        return sum(self.dim(n) for n in range(a + 1, b + 1))

    @lru_cache(maxsize=4096)
    def window_offsets(self, a: int, b: int) -> dict:
        offs, pos = {}, 0
        for n in range(a + 1, b + 1):
            offs[n] = pos
            pos += self.dim(n)
        return offs


class LlcVector:
    """A finitely supported element of V: a map (level, slot) -> nonzero scalar."""

    __slots__ = ("profile", "support")

    def __init__(self, profile: Profile, support: dict):
        self.profile = profile
        clean = {}
        for (n, i), v in support.items():
            v = profile.field.coerce(v)
            if v == profile.field.zero:
                continue
            if not (0 <= i < profile.dim(n)):
                raise ValueError(f"slot {i} out of range at level {n}")
            clean[(n, int(i))] = v
        self.support = clean

    @classmethod
    def zero(cls, profile: Profile) -> "LlcVector":
        return cls(profile, {})

    @classmethod
    def unit(cls, profile: Profile, level: int, slot: int) -> "LlcVector":
        return cls(profile, {(level, slot): profile.field.one})

    def is_zero(self) -> bool:
        return not self.support

    def levels(self):
        return sorted({n for (n, _i) in self.support})

    def add(self, other: "LlcVector") -> "LlcVector":
        self._check(other)
        f = self.profile.field
        out = dict(self.support)
        for key, v in other.support.items():
            out[key] = f.add(out.get(key, f.zero), v)
        return LlcVector(self.profile, out)

    def scale(self, c) -> "LlcVector":
        f = self.profile.field
        c = f.coerce(c)
        return LlcVector(self.profile, {k: f.mul(v, c) for k, v in self.support.items()})

    def neg(self) -> "LlcVector":
        f = self.profile.field
        return LlcVector(self.profile, {k: f.neg(v) for k, v in self.support.items()})

    def sub(self, other: "LlcVector") -> "LlcVector":
        return self.add(other.neg())

    def restrict(self, lo=None, hi=None) -> "LlcVector":
        """Keep only coordinates with lo <= level <= hi (either bound optional)."""
        keep = {
            k: v
            for k, v in self.support.items()
            if (lo is None or k[0] >= lo) and (hi is None or k[0] <= hi)
        }
        return LlcVector(self.profile, keep)

    def level_component(self, n: int) -> np.ndarray:
        f = self.profile.field
        comp = f.zeros(1, self.profile.dim(n))[0]
        for (m, i), v in self.support.items():
            if m == n:
                comp[i] = v
        return comp

    def to_window(self, a: int, b: int, clip_low: bool = False) -> np.ndarray:
        """Flatten over the coordinates of levels (a, b]."""
        f = self.profile.field
        offs = self.profile.window_offsets(a, b)
        arr = f.zeros(1, self.profile.window_dim(a, b))[0]
        for (n, i), v in self.support.items():
            if n <= a:
                if clip_low:
                    continue
                raise ValueError(f"support at level {n} below window cut {a}")
            if n > b:
                raise ValueError(f"support at level {n} above window top {b}")
            arr[offs[n] + i] = v
        return arr

    @classmethod
    def from_window(cls, profile: Profile, a: int, b: int, arr) -> "LlcVector":
        arr = profile.field.array(arr).reshape(-1)
        support = {}
        for idx, (n, i) in enumerate(profile.window_coords(a, b)):
            if arr[idx] != 0:
                support[(n, i)] = arr[idx]
        return cls(profile, support)

    def _check(self, other):
        if self.profile != other.profile:
            raise ProfileMismatch("vectors over different profiles")

    def __eq__(self, other):
        return (
            isinstance(other, LlcVector)
            and self.profile == other.profile
            and self.support == other.support
        )

    def __repr__(self):
        if not self.support:
            return "0"
        terms = []
        for (n, i) in sorted(self.support):
            v = self.support[(n, i)]
            coeff = "" if v == self.profile.field.one else f"{v}*"
            terms.append(f"{coeff}e[{n},{i}]")
        return " + ".join(terms)


class CompactOpenSubspace:
    """A linearly compact open subspace W = U_tail (+) span(window).

    Instances are always canonical: the tail cut is the largest a <= 0
    with U_a <= W, the window basis is in RREF over the flattened
    coordinates of levels (tail, top], and top is minimal.  Construct via
    :meth:`make` (from generators) or :func:`cofinal_chain`.
    """

    __slots__ = ("profile", "tail", "top", "window")

    def __init__(self, profile, tail, top, window):
        self.profile = profile
        self.tail = tail
        self.top = top
        self.window = window

    @classmethod
    def make(cls, profile: Profile, tail: int, gens=()) -> "CompactOpenSubspace":
        """Canonical subspace U_tail + span(gens); gens are LlcVectors.

        Generator coordinates at levels <= tail are absorbed by the tail.
        """
        if tail > 0:
            raise ValueError("tail cut must be <= 0")
        gens = list(gens)
        top = tail
        for g in gens:
            if g.profile != profile:
                raise ProfileMismatch("generator over a different profile")
            if g.support:
                top = max(top, max(n for (n, _i) in g.support))
        rows = [g.to_window(tail, top, clip_low=True) for g in gens]
        window = SubspaceBasis.span(
            profile.field, np.array(rows) if rows else [], ambient_dim=profile.window_dim(tail, top)
        )
        return cls._canonicalize(profile, tail, top, window)

    @classmethod
    def from_rows(cls, profile: Profile, tail: int, rows: np.ndarray, top: int) -> "CompactOpenSubspace":
        """Canonical subspace from raw window rows over the levels (tail, top]."""
        if tail > 0:
            raise ValueError("tail cut must be <= 0")
        window = SubspaceBasis.span(profile.field, rows, ambient_dim=profile.window_dim(tail, top))
        return cls._canonicalize(profile, tail, top, window)

    @classmethod
    def _canonicalize(cls, profile, tail, top, window):
        f = profile.field
        # absorb full leading blocks into the tail (up to the cap at 0)
        while tail < 0:
            d1 = profile.dim(tail + 1)
            if d1 > 0:
                if window.ambient_dim < d1:
                    break
                units = f.zeros(d1, window.ambient_dim)
                for k in range(d1):
                    units[k, k] = f.one
                if not all(window.contains_vector(units[k]) for k in range(d1)):
                    break
                stacked = SubspaceBasis.span(
                    f,
                    np.concatenate([units, window.mat], axis=0)
                    if window.rank
                    else units,
                    ambient_dim=window.ambient_dim,
                )
                # stacked = [I | 0 ; 0 | rest]; drop the absorbed block
                window = SubspaceBasis.span(
                    f, stacked.mat[d1:, d1:], ambient_dim=window.ambient_dim - d1
                )
            tail += 1
        # trim trailing all-zero levels
        while top > tail:
            dtop = profile.dim(top)
            if dtop == 0:
                top -= 1
                continue
            tail_cols = window.mat[:, window.ambient_dim - dtop :]
            if window.rank and bool(np.any(tail_cols != 0)):
                break
            window = SubspaceBasis.span(
                f, window.mat[:, : window.ambient_dim - dtop], ambient_dim=window.ambient_dim - dtop
            )
            top -= 1
        return cls(profile, tail, top, window)

    @property
    def field(self):
        return self.profile.field

    def window_rank(self) -> int:
        return self.window.rank

    def window_vectors(self):
        """The window basis rows as LlcVectors."""
        return [
            LlcVector.from_window(self.profile, self.tail, self.top, row)
            for row in self.window.mat
        ]

    def member(self, v: LlcVector) -> bool:
        if v.profile != self.profile:
            raise ProfileMismatch("vector over a different profile")
        high = {k for k in v.support if k[0] > self.top}
        if high:
            return False
        arr = v.to_window(self.tail, self.top, clip_low=True)
        return self.window.contains_vector(arr)

    def expand_window(self, a: int, b: int) -> SubspaceBasis:
        """This subspace seen inside the flattened coordinates of (a, b].

        Requires a <= tail and b >= top; levels (a, tail] expand into full
        blocks.  The stacked result (identity block, then the shifted
        window basis) is already in reduced echelon form, so it is
        assembled directly without another elimination pass.
        """
        if a > self.tail or b < self.top:
            raise ValueError("expansion window must contain the presentation window")
        f = self.profile.field
        total = self.profile.window_dim(a, b)
        shift = self.profile.window_dim(a, self.tail)
        rank = shift + self.window.rank
        mat = f.zeros(rank, total)
        for i in range(shift):
            mat[i, i] = f.one
        if self.window.rank:
            mat[shift:, shift : shift + self.window.ambient_dim] = self.window.mat
        pivots = tuple(range(shift)) + tuple(p + shift for p in self.window.pivots)
        return SubspaceBasis(f, total, mat, pivots)

    def __eq__(self, other):
        return (
            isinstance(other, CompactOpenSubspace)
            and self.profile == other.profile
            and self.tail == other.tail
            and self.top == other.top
            and self.window == other.window
        )

    def __repr__(self):
        gens = ", ".join(repr(v) for v in self.window_vectors())
        return f"U_{self.tail} + <{gens}>"


def canonicalize(profile: Profile, tail: int, gens=()) -> CompactOpenSubspace:
    """Canonical form of a raw (tail, generators) presentation."""
    return CompactOpenSubspace.make(profile, tail, gens)


def _padded_window_rows(w: CompactOpenSubspace, a: int, b: int) -> np.ndarray:
    """Window basis of w over the coordinates (a, b] (no tail blocks).

    When the cut a sits above w's tail, the columns at levels <= a are
    dropped: callers always combine the result with the full tail U_a,
    which absorbs them.
    """
    f = w.profile.field
    total = w.profile.window_dim(a, b)
    mat = f.zeros(w.window.rank, total)
    if w.window.rank:
        if a <= w.tail:
            shift = w.profile.window_dim(a, w.tail)
            mat[:, shift : shift + w.window.ambient_dim] = w.window.mat
        else:
            drop = w.profile.window_dim(w.tail, a)
            mat[:, : w.window.ambient_dim - drop] = w.window.mat[:, drop:]
    return mat


def open_combine(x: CompactOpenSubspace, y: CompactOpenSubspace, mode: str) -> CompactOpenSubspace:
    """Sum or intersection inside the lattice of compact open subspaces."""
    if x.profile != y.profile:
        raise ProfileMismatch("subspaces over different profiles")
    profile = x.profile
    if mode == "sum":
        a = max(x.tail, y.tail)
        b = max(x.top, y.top, a)
        rows = np.concatenate(
            [_padded_window_rows(x, a, b), _padded_window_rows(y, a, b)], axis=0
        )
        return CompactOpenSubspace.from_rows(profile, a, rows, b)
    if mode == "intersect":
        a = min(x.tail, y.tail)
        b = max(x.top, y.top)
        inter = subspace_combine(x.expand_window(a, b), y.expand_window(a, b), "intersect")
        return CompactOpenSubspace.from_rows(profile, a, inter.mat, b)
    raise ValueError(f"unknown mode {mode!r}")


def open_quotient_dim(big: CompactOpenSubspace, small: CompactOpenSubspace) -> int:
    """Codimension of small in big; raises NotContained when not nested."""
    if big.profile != small.profile:
        raise ProfileMismatch("subspaces over different profiles")
    if small.tail > big.tail:
        # canonical tails are maximal, so U_{small.tail} cannot fit in big
        raise NotContained("tail of the small subspace exceeds the big one")
    b = max(big.top, small.top)
    big_exp = big.expand_window(small.tail, b)
    if not big_exp.contains_rows(_padded_window_rows(small, small.tail, b)):
        raise NotContained("a window generator of small is not in the big subspace")
    return big_exp.rank - small.window.rank


def open_contains(big: CompactOpenSubspace, small: CompactOpenSubspace) -> bool:
    try:
        open_quotient_dim(big, small)
        return True
    except NotContained:
        return False


def cofinal_chain(profile: Profile, m: int) -> CompactOpenSubspace:
    """C_m = all coordinates at levels <= m (tail V_c plus m discrete levels).

    The family {C_m} is a chain cofinal in the lattice of compact open
    subspaces: every canonical subspace is contained in C_{top}.
    """
    if m < 0:
        raise ValueError("chain index must be >= 0")
    gens = [
        LlcVector.unit(profile, n, i)
        for n in range(1, m + 1)
        for i in range(profile.dim(n))
    ]
    return CompactOpenSubspace.make(profile, 0, gens)


@dataclass(frozen=True)
class BlockwisePattern:
    """A closed blockwise subspace W = prod/sum of per-level patterns W_n.

    W_n is constant P_L for n < m_lo and constant P_R for n > m_hi.  Used
    for the closed invariant subspaces of restriction/quotient checks.
    """

    profile: Profile
    left: SubspaceBasis
    middle: tuple
    right: SubspaceBasis
    m_lo: int
    m_hi: int

    @classmethod
    def make(cls, profile, left, middle_by_level: dict, right) -> "BlockwisePattern":
        m_lo = min(min(middle_by_level, default=0), profile.n_lo)
        m_hi = max(max(middle_by_level, default=0), profile.n_hi)
        mids = []
        for n in range(m_lo, m_hi + 1):
            if n in middle_by_level:
                basis = middle_by_level[n]
            else:
                template = left if n < profile.n_lo else right if n > profile.n_hi else None
                if template is None:
                    raise ValueError(f"pattern must specify level {n}")
                basis = template
            if basis.ambient_dim != profile.dim(n):
                raise ValueError(f"pattern ambient at level {n} does not match the profile")
            mids.append(basis)
        if left.ambient_dim != profile.d_left or right.ambient_dim != profile.d_right:
            raise ValueError("stationary pattern ambients do not match the profile")
        return cls(profile, left, tuple(mids), right, m_lo, m_hi)

    @classmethod
    def full(cls, profile) -> "BlockwisePattern":
        f = profile.field
        mids = {n: SubspaceBasis.full(f, profile.dim(n)) for n in range(profile.n_lo, profile.n_hi + 1)}
        return cls.make(
            profile, SubspaceBasis.full(f, profile.d_left), mids, SubspaceBasis.full(f, profile.d_right)
        )

    @classmethod
    def zero(cls, profile) -> "BlockwisePattern":
        f = profile.field
        mids = {n: SubspaceBasis.zero(f, profile.dim(n)) for n in range(profile.n_lo, profile.n_hi + 1)}
        return cls.make(
            profile, SubspaceBasis.zero(f, profile.d_left), mids, SubspaceBasis.zero(f, profile.d_right)
        )

    @classmethod
    def first_slots(cls, profile, k: int) -> "BlockwisePattern":
        """The pattern spanned by the first min(k, d(n)) slots at every level."""
        f = profile.field

        def slots(d):
            m = f.zeros(min(k, d), d)
            for i in range(min(k, d)):
                m[i, i] = f.one
            return SubspaceBasis.span(f, m, ambient_dim=d)

        mids = {n: slots(profile.dim(n)) for n in range(profile.n_lo, profile.n_hi + 1)}
        return cls.make(profile, slots(profile.d_left), mids, slots(profile.d_right))

    @classmethod
    def slot_subset(cls, profile, slots) -> "BlockwisePattern":
        """Constant pattern spanned by a fixed subset of slots at every level.

        Requires a constant profile so the subset makes sense everywhere.
        """
        f = profile.field
        d = profile.d_left

        def basis():
            m = f.zeros(len(slots), d)
            for r, s in enumerate(sorted(slots)):
                m[r, s] = f.one
            return SubspaceBasis.span(f, m, ambient_dim=d)

        b = basis()
        mids = {n: b for n in range(profile.n_lo, profile.n_hi + 1)}
        return cls.make(profile, b, mids, b)

    def level_basis(self, n: int) -> SubspaceBasis:
        if n < self.m_lo:
            return self.left
        if n > self.m_hi:
            return self.right
        return self.middle[n - self.m_lo]

    def sub_profile(self) -> Profile:
        return Profile(
            self.profile.field,
            self.left.rank,
            tuple(b.rank for b in self.middle),
            self.right.rank,
            self.m_lo,
            self.m_hi,
        )

    def quotient_profile(self) -> Profile:
        return Profile(
            self.profile.field,
            self.profile.d_left - self.left.rank,
            tuple(
                self.profile.dim(self.m_lo + k) - b.rank for k, b in enumerate(self.middle)
            ),
            self.profile.d_right - self.right.rank,
            self.m_lo,
            self.m_hi,
        )

    def member(self, v: LlcVector) -> bool:
        if v.profile != self.profile:
            raise ProfileMismatch("vector over a different profile")
        for n in v.levels():
            if not self.level_basis(n).contains_vector(v.level_component(n)):
                return False
        return True

    def project_level(self, n: int, comp: np.ndarray) -> np.ndarray:
        """Quotient coordinates of a level component: reduce mod W_n, read non-pivots."""
        basis = self.level_basis(n)
        resid = basis.reduce_vector(comp)
        pivset = set(basis.pivots)
        nonpiv = [c for c in range(basis.ambient_dim) if c not in pivset]
        return resid[nonpiv] if nonpiv else self.profile.field.zeros(1, 0)[0]

    def coords_level(self, n: int, comp: np.ndarray) -> np.ndarray:
        """Intrinsic W_n coordinates of a member component (pivot reads)."""
        basis = self.level_basis(n)
        return basis.coefficients(comp)


def blockwise_restrict_quotient(pattern: BlockwisePattern, u: CompactOpenSubspace):
    """Present U inside W and inside V/W, in their intrinsic coordinates.

    Returns (u_in_w, u_in_quotient): U /\\ W over the sub-profile and
    (U + W)/W over the quotient profile, both canonical.
    """
    if pattern.profile != u.profile:
        raise ProfileMismatch("pattern and subspace over different profiles")
    profile = pattern.profile
    f = profile.field
    a, b = u.tail, u.top
    # window part of W over (a, b], one padded row per per-level basis row
    offs = profile.window_offsets(a, b)
    total = profile.window_dim(a, b)
    w_rows = []
    for n in range(a + 1, b + 1):
        basis = pattern.level_basis(n)
        for row in basis.mat:
            wide = f.zeros(1, total)[0]
            wide[offs[n] : offs[n] + profile.dim(n)] = row
            w_rows.append(wide)
    w_window = SubspaceBasis.span(f, np.array(w_rows) if w_rows else [], ambient_dim=total)
    inter = subspace_combine(u.window, w_window, "intersect") if total else w_window

    sub_p = pattern.sub_profile()
    sub_gens = []
    for row in inter.mat:
        support = {}
        for n in range(a + 1, b + 1):
            comp = row[offs[n] : offs[n] + profile.dim(n)]
            coords = pattern.coords_level(n, comp)
            for k, v in enumerate(coords):
                support[(n, k)] = v
        sub_gens.append(LlcVector(sub_p, support))
    u_in_w = CompactOpenSubspace.make(sub_p, a, sub_gens)

    quot_p = pattern.quotient_profile()
    q_gens = []
    for row in u.window.mat:
        support = {}
        for n in range(a + 1, b + 1):
            comp = row[offs[n] : offs[n] + profile.dim(n)]
            proj = pattern.project_level(n, comp)
            for k, v in enumerate(proj):
                support[(n, k)] = v
        q_gens.append(LlcVector(quot_p, support))
    u_in_quotient = CompactOpenSubspace.make(quot_p, a, q_gens)
    return u_in_w, u_in_quotient
