"""Banded, eventually shift-stationary endomorphisms of a profile space.

An operator is given by a band width w, two stationary block families and
an explicit boundary region.  The image of the basis vector e_{n,i} is:

* for n inside the boundary region [b_lo, b_hi]: the stored column;
* for n < b_lo: the stationary rule, whose component at level n+j is
  column i of left_blocks[j] (j in [-w, w]);
* for n > b_hi: the same with right_blocks.

Bandedness (every column supported in levels [n-w, n+w]) makes the map
well defined on the whole space, image-bounded on the product side, and
continuous: the preimage of U_a contains U_{a-w} up to finitely many
linear conditions.  The class is closed under composition, restriction
to blockwise invariant subspaces, and induced quotient maps; inverses
are verified against a caller-supplied candidate rather than computed.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    InvarianceFailure,
    NonConstantProfile,
    NotAnInverse,
    ProfileMismatch,
)
from .linalg import SubspaceBasis
from .spaces import BlockwisePattern, CompactOpenSubspace, LlcVector, Profile


class BandedOperator:
    """A continuous endomorphism in banded eventually-stationary form."""

    __slots__ = ("profile", "width", "left_blocks", "right_blocks", "columns", "b_lo", "b_hi", "_stationary_cache")

    def __init__(self, profile: Profile, width: int, left_blocks: dict, right_blocks: dict, columns: dict):
        f = profile.field
        self.profile = profile
        self.width = int(width)
        self.left_blocks = self._norm_blocks(f, left_blocks, profile.d_left)
        self.right_blocks = self._norm_blocks(f, right_blocks, profile.d_right)
        self.columns = {int(n): tuple(cols) for n, cols in columns.items()}
        self.b_lo = min(self.columns) if self.columns else 0
        self.b_hi = max(self.columns) if self.columns else 0
        self._stationary_cache = {}

    def _norm_blocks(self, f, blocks, d):
        out = {}
        for j in range(-self.width, self.width + 1):
            if j in blocks:
                out[j] = f.array(blocks[j])
            else:
                out[j] = f.zeros(d, d)
        return out

    # -- column access -----------------------------------------------------
    def column(self, n: int, i: int) -> LlcVector:
        """The image of the basis vector e_{n,i}."""
        if self.b_lo <= n <= self.b_hi:
            return self.columns[n][i]
        cached = self._stationary_cache.get((n, i))
        if cached is not None:
            return cached
        blocks = self.left_blocks if n < self.b_lo else self.right_blocks
        support = {}
        for j in range(-self.width, self.width + 1):
            col = blocks[j][:, i]
            for r in range(col.shape[0]):
                if col[r] != 0:
                    support[(n + j, r)] = col[r]
        vec = LlcVector(self.profile, support)
        self._stationary_cache[(n, i)] = vec
        return vec

    def apply(self, v: LlcVector) -> LlcVector:
        if v.profile != self.profile:
            raise ProfileMismatch("vector over a different profile")
        f = self.profile.field
        out = {}
        for (n, i), c in v.support.items():
            for key, val in self.column(n, i).support.items():
                out[key] = f.add(out.get(key, f.zero), f.mul(val, c))
        return LlcVector(self.profile, out)

    # -- equality: stationary blocks plus the union boundary region --------
    def __eq__(self, other):
        if not isinstance(other, BandedOperator) or self.profile != other.profile:
            return False
        wmax = max(self.width, other.width)
        for j in range(-wmax, wmax + 1):
            for mine, theirs, d in (
                (self.left_blocks, other.left_blocks, self.profile.d_left),
                (self.right_blocks, other.right_blocks, self.profile.d_right),
            ):
                a = mine.get(j, self.profile.field.zeros(d, d))
                b = theirs.get(j, self.profile.field.zeros(d, d))
                if a.shape != b.shape or not np.array_equal(a, b):
                    return False
        lo = min(self.b_lo, other.b_lo)
        hi = max(self.b_hi, other.b_hi)
        for n in range(lo, hi + 1):
            for i in range(self.profile.dim(n)):
                if self.column(n, i) != other.column(n, i):
                    return False
        return True

    def __repr__(self):
        return (
            f"BandedOperator(width={self.width}, boundary=[{self.b_lo},{self.b_hi}], "
            f"profile levels [{self.profile.n_lo},{self.profile.n_hi}])"
        )


def validate(op: BandedOperator) -> list:
    """Structural violations of the banded eventually-stationary contract."""
    p = op.profile
    out = []
    if op.width < 0:
        out.append("negative band width")
        return out
    for j in range(-op.width, op.width + 1):
        if op.left_blocks[j].shape != (p.d_left, p.d_left):
            out.append(f"left block at shift {j}: expected shape {(p.d_left, p.d_left)}, got {op.left_blocks[j].shape}")
        if op.right_blocks[j].shape != (p.d_right, p.d_right):
            out.append(f"right block at shift {j}: expected shape {(p.d_right, p.d_right)}, got {op.right_blocks[j].shape}")
    if op.b_lo > p.n_lo - op.width or op.b_hi < p.n_hi + op.width:
        out.append(
            f"boundary region [{op.b_lo},{op.b_hi}] does not cover [{p.n_lo - op.width},{p.n_hi + op.width}]"
        )
    for n in range(op.b_lo, op.b_hi + 1):
        if n not in op.columns:
            out.append(f"missing boundary columns at level {n}")
            continue
        cols = op.columns[n]
        if len(cols) != p.dim(n):
            out.append(f"boundary columns at level {n}: expected {p.dim(n)}, got {len(cols)}")
            continue
        for i, col in enumerate(cols):
            if col.profile != p:
                out.append(f"column ({n},{i}) over a different profile")
                continue
            for (m, _slot) in col.support:
                if not (n - op.width <= m <= n + op.width):
                    out.append(f"band exceeded: column ({n},{i}) reaches level {m}")
                    break
    return out


def _boundary_span(profile: Profile, width: int):
    return range(profile.n_lo - width, profile.n_hi + width + 1)


def identity_operator(profile: Profile) -> BandedOperator:
    f = profile.field
    columns = {
        n: [LlcVector.unit(profile, n, i) for i in range(profile.dim(n))]
        for n in _boundary_span(profile, 0)
    }
    return BandedOperator(
        profile, 0, {0: f.eye(profile.d_left)}, {0: f.eye(profile.d_right)}, columns
    )


def zero_operator(profile: Profile) -> BandedOperator:
    columns = {n: [LlcVector.zero(profile) for _ in range(profile.dim(n))] for n in _boundary_span(profile, 0)}
    return BandedOperator(profile, 0, {}, {}, columns)


def make_shift(profile: Profile, direction: str) -> BandedOperator:
    """The two-sided Bernoulli shifts on a constant profile.

    right: e_{n,i} -> e_{n+1,i}; left: e_{n,i} -> e_{n-1,i}.  They are
    mutually inverse topological automorphisms.
    """
    if not profile.is_constant():
        raise NonConstantProfile("shifts need a constant dimension profile")
    if direction not in ("left", "right"):
        raise ValueError(f"unknown direction {direction!r}")
    step = 1 if direction == "right" else -1
    f = profile.field
    d = profile.d_left
    columns = {
        n: [LlcVector.unit(profile, n + step, i) for i in range(d)]
        for n in _boundary_span(profile, 1)
    }
    return BandedOperator(profile, 1, {step: f.eye(d)}, {step: f.eye(d)}, columns)


def compose(f_op: BandedOperator, g_op: BandedOperator) -> BandedOperator:
    """The composite f_op . g_op (apply g first)."""
    if f_op.profile != g_op.profile:
        raise ProfileMismatch("composing operators over different profiles")
    p = f_op.profile
    f = p.field
    w = f_op.width + g_op.width

    def convolve(fb, gb, d):
        out = {}
        for j in range(-w, w + 1):
            acc = f.zeros(d, d)
            for j2 in range(-g_op.width, g_op.width + 1):
                j1 = j - j2
                if -f_op.width <= j1 <= f_op.width:
                    acc = f.normalize(acc + f.matmul(fb[j1], gb[j2]))
            out[j] = acc
        return out

    left = convolve(f_op.left_blocks, g_op.left_blocks, p.d_left)
    right = convolve(f_op.right_blocks, g_op.right_blocks, p.d_right)
    b_lo = min(g_op.b_lo, f_op.b_lo - g_op.width, p.n_lo - w)
    b_hi = max(g_op.b_hi, f_op.b_hi + g_op.width, p.n_hi + w)
    columns = {
        n: [f_op.apply(g_op.column(n, i)) for i in range(p.dim(n))]
        for n in range(b_lo, b_hi + 1)
    }
    out = BandedOperator(p, w, left, right, columns)
    # stationary rule must continue the explicit columns beyond the region
    for n in (b_lo - 1, b_hi + 1):
        for i in range(p.dim(n)):
            assert out.column(n, i) == f_op.apply(g_op.column(n, i)), "compose: stationary mismatch"
    return out


def operator_add(f_op: BandedOperator, g_op: BandedOperator) -> BandedOperator:
    if f_op.profile != g_op.profile:
        raise ProfileMismatch("adding operators over different profiles")
    p = f_op.profile
    f = p.field
    w = max(f_op.width, g_op.width)

    def padded(blocks, j, d):
        return blocks.get(j, f.zeros(d, d))

    left = {
        j: f.normalize(padded(f_op.left_blocks, j, p.d_left) + padded(g_op.left_blocks, j, p.d_left))
        for j in range(-w, w + 1)
    }
    right = {
        j: f.normalize(padded(f_op.right_blocks, j, p.d_right) + padded(g_op.right_blocks, j, p.d_right))
        for j in range(-w, w + 1)
    }
    b_lo = min(f_op.b_lo, g_op.b_lo, p.n_lo - w)
    b_hi = max(f_op.b_hi, g_op.b_hi, p.n_hi + w)
    columns = {
        n: [f_op.column(n, i).add(g_op.column(n, i)) for i in range(p.dim(n))]
        for n in range(b_lo, b_hi + 1)
    }
    return BandedOperator(p, w, left, right, columns)


def scale_operator(op: BandedOperator, c) -> BandedOperator:
    f = op.profile.field
    c = f.coerce(c)
    left = {j: f.normalize(b * c) for j, b in op.left_blocks.items()}
    right = {j: f.normalize(b * c) for j, b in op.right_blocks.items()}
    columns = {n: [col.scale(c) for col in cols] for n, cols in op.columns.items()}
    return BandedOperator(op.profile, op.width, left, right, columns)


def power(op: BandedOperator, k: int) -> BandedOperator:
    if k < 0:
        raise ValueError("power expects k >= 0")
    out = identity_operator(op.profile)
    for _ in range(k):
        out = compose(op, out)
    return out


def verify_inverse(f_op: BandedOperator, g_op: BandedOperator) -> bool:
    """True iff f_op and g_op compose to the identity both ways."""
    if f_op.profile != g_op.profile:
        raise ProfileMismatch("operators over different profiles")
    ident = identity_operator(f_op.profile)
    return compose(f_op, g_op) == ident and compose(g_op, f_op) == ident


def _action_rows(op: BandedOperator, src_lo: int, src_hi: int, dst_lo: int, dst_hi: int) -> np.ndarray:
    """Matrix of the operator from the source window (src_lo, src_hi] into
    the coordinates (dst_lo, dst_hi]; images below dst_lo are dropped
    (taken modulo the tail), images above dst_hi must not occur."""
    p = op.profile
    f = p.field
    src_offs = p.window_offsets(src_lo, src_hi)
    dst_offs = p.window_offsets(dst_lo, dst_hi)
    mat = f.zeros(p.window_dim(src_lo, src_hi), p.window_dim(dst_lo, dst_hi))
    for n in range(src_lo + 1, src_hi + 1):
        for i in range(p.dim(n)):
            row = src_offs[n] + i
            for (m, s), v in op.column(n, i).support.items():
                if m <= dst_lo:
                    continue
                if m > dst_hi:
                    raise ValueError("action window too small for the band")
                mat[row, dst_offs[m] + s] = v
    return mat


def _image_rows_raw(op: BandedOperator, tail: int, window_mat: np.ndarray, top: int, a: int):
    """Rows of op(U_tail + span(window rows over (tail, top])) mod U_a.

    Returns (rows over (a, dst_hi], dst_hi).  Window generators map
    through directly; of the tail only the levels in (a - width, tail]
    matter, since bandedness drops every deeper source into U_a.
    """
    p = op.profile
    f = p.field
    src_lo = a - op.width
    if top <= src_lo:
        # every source sits deep enough that its image stays inside U_a
        return f.zeros(0, 0), a
    src_hi = max(top, tail)
    dst_hi = max(src_hi + op.width, a)
    action = _action_rows(op, src_lo, src_hi, a, dst_hi)
    n_tail = p.window_dim(src_lo, tail)
    n_rows = window_mat.shape[0]
    ambient = window_mat.shape[1]
    srcs = f.zeros(n_tail + n_rows, p.window_dim(src_lo, src_hi))
    for i in range(n_tail):
        srcs[i, i] = f.one
    if n_rows:
        if tail >= src_lo:
            shift = p.window_dim(src_lo, tail)
            srcs[n_tail:, shift : shift + ambient] = window_mat
        else:
            # generator coordinates at levels <= src_lo map into U_a anyway
            drop = p.window_dim(tail, src_lo)
            srcs[n_tail:, : ambient - drop] = window_mat[:, drop:]
    return f.matmul(srcs, action), dst_hi


def image_rows_mod_tail(op: BandedOperator, w: CompactOpenSubspace, a: int):
    """Rows spanning op(W) mod U_a over the coordinates (a, top]; returns (rows, top)."""
    if w.profile != op.profile:
        raise ProfileMismatch("subspace over a different profile")
    if a > 0:
        raise ValueError("tail level must be <= 0")
    return _image_rows_raw(op, w.tail, w.window.mat, w.top, a)


def image_mod_tail(op: BandedOperator, w: CompactOpenSubspace, a: int) -> list:
    """Finitely many vectors spanning op(W) modulo the tail U_a."""
    rows, top = image_rows_mod_tail(op, w, a)
    return [LlcVector.from_window(op.profile, a, top, row) for row in rows]


def automorphism_image(op: BandedOperator, x: CompactOpenSubspace, inverse_width: int) -> CompactOpenSubspace:
    """The exact image op(X) of a compact open subspace under an automorphism.

    `inverse_width` must bound the band width of op's inverse: then
    op(U_t) contains U_{t - inverse_width}, so the image is again compact
    open and is presentable over that deeper tail.
    """
    a = x.tail - inverse_width
    rows, top = image_rows_mod_tail(op, x, a)
    return CompactOpenSubspace.from_rows(op.profile, a, rows, top)


# -- restriction and quotient along a blockwise invariant pattern ----------

def _restrict_block(field, block: np.ndarray, basis: SubspaceBasis) -> np.ndarray:
    """Matrix of the block on the pattern, in the pattern's basis coordinates."""
    if basis.rank == 0:
        return field.zeros(0, 0)
    imgs = field.matmul(block, basis.mat.T)  # columns = images of basis rows
    return field.normalize(imgs[list(basis.pivots), :])


def _project_block(field, block: np.ndarray, basis: SubspaceBasis) -> np.ndarray:
    """Matrix induced by the block on the quotient by the pattern."""
    pivset = set(basis.pivots)
    nonpiv = [c for c in range(basis.ambient_dim) if c not in pivset]
    q = len(nonpiv)
    out = field.zeros(q, q)
    for k, c in enumerate(nonpiv):
        img = block[:, c]
        resid = basis.reduce_vector(img)
        out[:, k] = resid[nonpiv]
    return out


def induce_on_subspace_and_quotient(op: BandedOperator, pattern: BlockwisePattern):
    """Check op-invariance of the pattern; return (restriction, induced quotient map).

    The invariance check is finite: per-level basis images over the union
    of the pattern window and the operator boundary region (widened by the
    band), plus stationary block compatibility on both tails.  On failure
    raises InvarianceFailure with a witness vector.
    """
    if op.profile != pattern.profile:
        raise ProfileMismatch("pattern over a different profile")
    p = op.profile
    f = p.field
    w = op.width

    for j in range(-w, w + 1):
        for side, basis, level in (
            ("left", pattern.left, pattern.m_lo - w - 1),
            ("right", pattern.right, pattern.m_hi + w + 1),
        ):
            blocks = op.left_blocks if side == "left" else op.right_blocks
            for row in basis.mat:
                comp = f.matmul(blocks[j], row.reshape(-1, 1))[:, 0]
                if not basis.contains_vector(comp):
                    witness = LlcVector(p, {(level, i): row[i] for i in range(len(row)) if row[i] != 0})
                    raise InvarianceFailure(witness, op.apply(witness))

    lo = min(pattern.m_lo - w - 1, op.b_lo)
    hi = max(pattern.m_hi + w + 1, op.b_hi)
    for n in range(lo, hi + 1):
        basis = pattern.level_basis(n)
        for row in basis.mat:
            vec = LlcVector(p, {(n, i): row[i] for i in range(len(row)) if row[i] != 0})
            img = op.apply(vec)
            if not pattern.member(img):
                raise InvarianceFailure(vec, img)

    sub_p = pattern.sub_profile()
    quot_p = pattern.quotient_profile()

    left_r = {j: _restrict_block(f, op.left_blocks[j], pattern.left) for j in range(-w, w + 1)}
    right_r = {j: _restrict_block(f, op.right_blocks[j], pattern.right) for j in range(-w, w + 1)}
    left_q = {j: _project_block(f, op.left_blocks[j], pattern.left) for j in range(-w, w + 1)}
    right_q = {j: _project_block(f, op.right_blocks[j], pattern.right) for j in range(-w, w + 1)}

    r_lo = min(op.b_lo, sub_p.n_lo - w)
    r_hi = max(op.b_hi, sub_p.n_hi + w)
    cols_r, cols_q = {}, {}
    for n in range(r_lo, r_hi + 1):
        basis = pattern.level_basis(n)
        row_cols = []
        for row in basis.mat:
            vec = LlcVector(p, {(n, i): row[i] for i in range(len(row)) if row[i] != 0})
            img = op.apply(vec)
            support = {}
            for m in img.levels():
                coords = pattern.coords_level(m, img.level_component(m))
                for k in range(len(coords)):
                    if coords[k] != 0:
                        support[(m, k)] = coords[k]
            row_cols.append(LlcVector(sub_p, support))
        cols_r[n] = row_cols

        pivset = set(basis.pivots)
        nonpiv = [c for c in range(basis.ambient_dim) if c not in pivset]
        q_cols = []
        for c in nonpiv:
            img = op.apply(LlcVector.unit(p, n, c))
            support = {}
            for m in img.levels():
                proj = pattern.project_level(m, img.level_component(m))
                for k in range(len(proj)):
                    if proj[k] != 0:
                        support[(m, k)] = proj[k]
            q_cols.append(LlcVector(quot_p, support))
        cols_q[n] = q_cols

    restricted = BandedOperator(sub_p, w, left_r, right_r, cols_r)
    induced = BandedOperator(quot_p, w, left_q, right_q, cols_q)
    return restricted, induced


# -- decomposition along the product/sum splitting at level 0 --------------

class ComponentDecomposition:
    """The four corner maps of an operator relative to V = V_c (+) V_d.

    V_c is the product side (levels <= 0), V_d the discrete side
    (levels > 0).  phi_cc and phi_dd are endomorphisms of the one-sided
    profiles; phi_cd and phi_dc are kept on the full profile with the
    complementary side zeroed out.  The corner from the product side into
    the discrete side always has finite-dimensional image and open
    kernel, which is asserted at construction.
    """

    __slots__ = ("source", "phi_cc", "phi_cd", "phi_dc", "phi_dd", "c_profile", "d_profile", "cd_image_dim")

    def __init__(self, source, phi_cc, phi_cd, phi_dc, phi_dd, c_profile, d_profile, cd_image_dim):
        self.source = source
        self.phi_cc = phi_cc
        self.phi_cd = phi_cd
        self.phi_dc = phi_dc
        self.phi_dd = phi_dd
        self.c_profile = c_profile
        self.d_profile = d_profile
        self.cd_image_dim = cd_image_dim


def decompose_vc_vd(op: BandedOperator) -> ComponentDecomposition:
    """Corner maps of op for the canonical splitting at level 0."""
    p = op.profile
    f = p.field
    w = op.width
    c_profile = Profile(
        f, p.d_left,
        tuple(p.dim(n) if n <= 0 else 0 for n in range(p.n_lo, p.n_hi + 1)),
        0, p.n_lo, p.n_hi,
    )
    d_profile = Profile(
        f, 0,
        tuple(0 if n <= 0 else p.dim(n) for n in range(p.n_lo, p.n_hi + 1)),
        p.d_right, p.n_lo, p.n_hi,
    )
    b_lo = min(op.b_lo, p.n_lo - w)
    b_hi = max(op.b_hi, p.n_hi + w)

    def corner_columns(target_profile, source_pred, keep_lo, keep_hi):
        cols = {}
        for n in range(b_lo, b_hi + 1):
            per = []
            for i in range(target_profile.dim(n)):
                if source_pred(n):
                    img = op.column(n, i).restrict(lo=keep_lo, hi=keep_hi)
                    per.append(LlcVector(target_profile, img.support))
                else:
                    per.append(LlcVector.zero(target_profile))
            cols[n] = per
        return cols

    cc = BandedOperator(
        c_profile, w, op.left_blocks, {},
        corner_columns(c_profile, lambda n: n <= 0, None, 0),
    )
    dd = BandedOperator(
        d_profile, w, {}, op.right_blocks,
        corner_columns(d_profile, lambda n: n >= 1, 1, None),
    )
    cd = BandedOperator(p, w, {}, {}, corner_columns(p, lambda n: n <= 0, 1, None))
    dc = BandedOperator(p, w, {}, {}, corner_columns(p, lambda n: n >= 1, None, 0))

    # the product-to-discrete corner: finite image, open kernel
    cd_gens = []
    for n in range(b_lo, 1):
        for i in range(p.dim(n)):
            col = cd.column(n, i)
            assert n > -w or col.is_zero(), "corner into the discrete side must kill deep tail levels"
            if not col.is_zero():
                cd_gens.append(col)
    if cd_gens:
        top = max(max(m for (m, _s) in g.support) for g in cd_gens)
        rows = [g.to_window(0, top) for g in cd_gens]
        cd_image_dim = SubspaceBasis.span(f, np.array(rows), ambient_dim=p.window_dim(0, top)).rank
    else:
        cd_image_dim = 0

    # reassembly: the four corners recombine to op on the boundary region
    for n in range(b_lo, b_hi + 1):
        for i in range(p.dim(n)):
            if n <= 0:
                low = LlcVector(p, cc.column(n, i).support)
                high = cd.column(n, i)
            else:
                low = dc.column(n, i)
                high = LlcVector(p, dd.column(n, i).support)
            assert low.add(high) == op.column(n, i), "corner reassembly mismatch"

    return ComponentDecomposition(op, cc, cd, dc, dd, c_profile, d_profile, cd_image_dim)


# -- products ---------------------------------------------------------------

def direct_sum_profile(p1: Profile, p2: Profile) -> Profile:
    if p1.field != p2.field:
        raise ProfileMismatch("direct sum needs a common field")
    lo = min(p1.n_lo, p2.n_lo)
    hi = max(p1.n_hi, p2.n_hi)
    return Profile(
        p1.field,
        p1.d_left + p2.d_left,
        tuple(p1.dim(n) + p2.dim(n) for n in range(lo, hi + 1)),
        p1.d_right + p2.d_right,
        lo,
        hi,
    )


def direct_sum_operator(op1: BandedOperator, op2: BandedOperator):
    """op1 x op2 on the levelwise concatenation of the two profiles."""
    p1, p2 = op1.profile, op2.profile
    p = direct_sum_profile(p1, p2)
    f = p.field
    w = max(op1.width, op2.width)

    def blockdiag(b1, b2, d1, d2):
        out = f.zeros(d1 + d2, d1 + d2)
        if d1:
            out[:d1, :d1] = b1
        if d2:
            out[d1:, d1:] = b2
        return out

    def padded(op, j, side):
        blocks = op.left_blocks if side == "left" else op.right_blocks
        d = op.profile.d_left if side == "left" else op.profile.d_right
        return blocks.get(j, f.zeros(d, d))

    left = {
        j: blockdiag(padded(op1, j, "left"), padded(op2, j, "left"), p1.d_left, p2.d_left)
        for j in range(-w, w + 1)
    }
    right = {
        j: blockdiag(padded(op1, j, "right"), padded(op2, j, "right"), p1.d_right, p2.d_right)
        for j in range(-w, w + 1)
    }

    def embed(vec, which):
        support = {}
        for (m, s), v in vec.support.items():
            slot = s if which == 1 else p1.dim(m) + s
            support[(m, slot)] = v
        return LlcVector(p, support)

    b_lo = min(op1.b_lo, op2.b_lo, p.n_lo - w)
    b_hi = max(op1.b_hi, op2.b_hi, p.n_hi + w)
    columns = {}
    for n in range(b_lo, b_hi + 1):
        per = []
        for i in range(p1.dim(n)):
            per.append(embed(op1.column(n, i), 1))
        for i in range(p2.dim(n)):
            per.append(embed(op2.column(n, i), 2))
        columns[n] = per
    return BandedOperator(p, w, left, right, columns)


def conjugate(alpha: BandedOperator, op: BandedOperator, alpha_inv: BandedOperator) -> BandedOperator:
    """alpha . op . alpha^{-1}; callers must pass a verified inverse pair."""
    if not verify_inverse(alpha, alpha_inv):
        raise NotAnInverse("conjugator pair does not verify")
    return compose(compose(alpha, op), alpha_inv)
