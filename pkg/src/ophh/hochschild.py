"""Cosimplicial structure and the Hochschild complex of a multiplicative operad.

The coface and codegeneracy maps are the usual ones induced by the
multiplication mu and the unit e:

    d^0(x) = mu o_2 x,   d^i(x) = x o_i mu  (1 <= i <= k),   d^(k+1)(x) = mu o_1 x,
    s^i(x) = x o_(i+1) e  (0 <= i <= k-1 on arity k).

The differential is the alternating coface sum; it preserves the internal
grading, so the complex splits into (arity, grading) blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import ExactMatrix, Scalar, kernel_basis, solve_in_image
from .operad import OperadElement, OperadSpec, SlotError, TruncationError, OperadError


def coface(spec: OperadSpec, i: int, x: OperadElement) -> OperadElement:
    k = x.arity
    if not 0 <= i <= k + 1:
        raise SlotError(f"coface index {i} out of range for arity {k}")
    if i == 0:
        return spec.compose(spec.multiplication, 2, x)
    if i == k + 1:
        return spec.compose(spec.multiplication, 1, x)
    return spec.compose(x, i, spec.multiplication)


def codegeneracy(spec: OperadSpec, i: int, x: OperadElement) -> OperadElement:
    k = x.arity
    if not 0 <= i <= k - 1:
        raise SlotError(f"codegeneracy index {i} out of range for arity {k}")
    return spec.compose(x, i + 1, spec.unit)


def hochschild_differential(spec: OperadSpec, x: OperadElement) -> OperadElement:
    """Alternating sum d^0 - d^1 + ... +- d^(k+1); raises arity by one."""
    k = x.arity
    if k + 1 > spec.arity_cap:
        raise TruncationError(f"differential needs arity {k + 1}, cap is {spec.arity_cap}")
    out = OperadElement.zero(k + 1)
    for i in range(k + 2):
        term = coface(spec, i, x)
        out = out + (term if i % 2 == 0 else -term)
    return out


def is_normalized(spec: OperadSpec, x: OperadElement) -> bool:
    """True iff every codegeneracy kills x (vacuously true in arity 0)."""
    return all(codegeneracy(spec, i, x).is_zero() for i in range(x.arity))


def _basis_by_grading(spec: OperadSpec, k: int) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for idx, g in enumerate(spec.generators(k)):
        out.setdefault(g.grading, []).append(idx)
    return dict(sorted(out.items()))


@dataclass
class BigradedComplex:
    """Exact matrices of the Hochschild differential per (arity, grading) block.

    For the normalized flavor, ``normalized_bases[(k, g)]`` holds the chosen
    basis of the normalized subspace as coordinate vectors in the grading-g
    slice of O(k), and the differential matrices are expressed in those bases.
    """

    spec: OperadSpec
    cap: int
    flavor: str  # "full" | "normalized"
    gradings: dict[int, dict[int, list[int]]] = field(default_factory=dict)
    differentials: dict[tuple[int, int], ExactMatrix] = field(default_factory=dict)
    normalized_bases: dict[tuple[int, int], list[list[Scalar]]] = field(default_factory=dict)

    def block_dim(self, k: int, g: int) -> int:
        if self.flavor == "normalized":
            return len(self.normalized_bases.get((k, g), []))
        return len(self.gradings.get(k, {}).get(g, []))

    def block_gradings(self, k: int) -> list[int]:
        if self.flavor == "normalized":
            return sorted(g for (kk, g) in self.normalized_bases if kk == k)
        return sorted(self.gradings.get(k, {}))

    def element_block_coords(self, x: OperadElement, g: int) -> list[Scalar]:
        """Coordinates of a grading-g homogeneous element in its block basis."""
        k = x.arity
        idxs = self.gradings[k][g]
        full = self.spec.to_vector(x)
        sliced = [full[i] for i in idxs]
        if self.flavor == "full":
            return sliced
        N = ExactMatrix.from_cols(self.normalized_bases[(k, g)], rows=len(idxs))
        coords = solve_in_image(N, sliced)
        if coords is None:
            raise OperadError("element is not in the normalized subspace")
        return coords

    def block_coords_to_element(self, k: int, g: int, coords) -> OperadElement:
        idxs = self.gradings[k][g]
        full: list[Scalar] = [0] * self.spec.dim(k)
        if self.flavor == "normalized":
            basis = self.normalized_bases[(k, g)]
            amb = [0] * len(idxs)
            for c, vec in zip(coords, basis):
                if c:
                    amb = [a + c * b for a, b in zip(amb, vec)]
            for pos, i in enumerate(idxs):
                full[i] = amb[pos]
        else:
            for pos, i in enumerate(idxs):
                full[i] = coords[pos]
        return self.spec.from_vector(k, full)


def _coface_matrix_block(spec, k, g, idxs_k, idxs_k1) -> ExactMatrix:
    """Matrix of the full differential on the grading-g slice, arity k -> k+1."""
    pos = {i: p for p, i in enumerate(idxs_k1)}
    ent = {}
    gens = spec.generators(k)
    for col, idx in enumerate(idxs_k):
        x = OperadElement.basis(k, gens[idx].name)
        dx = hochschild_differential(spec, x)
        vec = spec.to_vector(dx)
        for i, v in enumerate(vec):
            if v:
                ent[(pos[i], col)] = v
    return ExactMatrix(len(idxs_k1), len(idxs_k), ent)


def build_complex(spec: OperadSpec, cap: int, flavor: str = "full") -> BigradedComplex:
    """Assemble differential matrices for arities 0..cap-1 (targets up to cap).

    Normalized bases are computed, never assumed: the grading-g slice of the
    normalized subspace is the joint kernel of all codegeneracy matrices.
    """
    if flavor not in ("full", "normalized"):
        raise ValueError(f"unknown flavor {flavor!r}")
    if cap > spec.arity_cap:
        raise TruncationError(f"cap {cap} beyond spec arity cap {spec.arity_cap}")
    cx = BigradedComplex(spec=spec, cap=cap, flavor=flavor)
    for k in range(cap + 1):
        cx.gradings[k] = _basis_by_grading(spec, k)

    if flavor == "normalized":
        for k in range(cap + 1):
            for g, idxs in cx.gradings[k].items():
                cx.normalized_bases[(k, g)] = _normalized_block_basis(spec, k, g, idxs)

    for k in range(cap):
        all_g = set(cx.gradings[k]) | set(cx.gradings.get(k + 1, {}))
        for g in sorted(all_g):
            idxs_k = cx.gradings[k].get(g, [])
            idxs_k1 = cx.gradings.get(k + 1, {}).get(g, [])
            full = _coface_matrix_block(spec, k, g, idxs_k, idxs_k1)
            if flavor == "full":
                cx.differentials[(k, g)] = full
            else:
                src = cx.normalized_bases.get((k, g), [])
                dst = cx.normalized_bases.get((k + 1, g), [])
                N1 = ExactMatrix.from_cols(dst, rows=len(idxs_k1))
                cols = []
                for vec in src:
                    img = full.matvec(vec)
                    coords = solve_in_image(N1, img)
                    if coords is None:
                        raise OperadError(
                            f"differential left the normalized subspace at arity {k}, grading {g}"
                        )
                    cols.append(coords)
                cx.differentials[(k, g)] = ExactMatrix.from_cols(cols, rows=len(dst))
    return cx


def _normalized_block_basis(spec: OperadSpec, k: int, g: int, idxs: list[int]) -> list[list[Scalar]]:
    if not idxs:
        return []
    if k == 0:
        return [[1 if p == q else 0 for p in range(len(idxs))] for q in range(len(idxs))]
    # stack all codegeneracy matrices restricted to the grading-g slice
    gens = spec.generators(k)
    tgt_idxs = _basis_by_grading(spec, k - 1).get(g, [])
    tgt_pos = {i: p for p, i in enumerate(tgt_idxs)}
    blocks = []
    for i in range(k):
        ent = {}
        for col, idx in enumerate(idxs):
            sx = codegeneracy(spec, i, OperadElement.basis(k, gens[idx].name))
            for pos_full, v in enumerate(spec.to_vector(sx)):
                if v:
                    ent[(tgt_pos[pos_full], col)] = v
        blocks.append(ExactMatrix(len(tgt_idxs), len(idxs), ent))
    stacked = blocks[0]
    for b in blocks[1:]:
        stacked = stacked.vstack(b)
    return kernel_basis(stacked)
