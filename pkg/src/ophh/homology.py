"""Bigraded Hochschild homology with torsion, representatives, and the
homology-level BV verification.

The differential raises arity, so homology at arity k is ker(d_k) / im(d_(k-1))
and is computable whenever k+1 is within the arity cap.  Blocks are indexed by
(arity, internal grading); the differential preserves the internal grading.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .exact import ExactMatrix, kernel_basis, integer_kernel_basis, rank, snf, solve_in_image
from .hochschild import BigradedComplex, build_complex, hochschild_differential
from .operad import OperadElement, OperadError, OperadSpec, TruncationError
from .report import VerificationReport


class HomologyError(OperadError):
    pass


@dataclass(frozen=True)
class HomologyClass:
    arity: int
    grading: int
    coordinates: tuple  # rational coordinates in the representative basis
    torsion_coordinates: tuple = ()  # residues mod the invariant factors (Z only)

    @property
    def degree(self) -> int:
        return self.grading - self.arity

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coordinates) and all(
            c == 0 for c in self.torsion_coordinates
        )

    def scaled(self, c) -> "HomologyClass":
        if self.torsion_coordinates and c != 1:
            raise HomologyError("cannot scale torsion coordinates rationally")
        return HomologyClass(
            self.arity, self.grading, tuple(c * v for v in self.coordinates),
            self.torsion_coordinates,
        )

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        if (self.arity, self.grading) != (other.arity, other.grading):
            raise HomologyError("bidegree mismatch in class addition")
        tc = ()
        if self.torsion_coordinates or other.torsion_coordinates:
            raise HomologyError("torsion classes do not support coordinate addition here")
        return HomologyClass(
            self.arity, self.grading,
            tuple(a + b for a, b in zip(self.coordinates, other.coordinates)), tc,
        )

    def __sub__(self, other: "HomologyClass") -> "HomologyClass":
        return self + other.scaled(-1)


@dataclass
class _Block:
    """Homology data of one (arity, grading) block."""
    betti: int
    torsion: tuple  # invariant factors > 1
    free_reps: list  # cycle vectors in block coordinates
    torsion_reps: list
    kernel: list  # kernel basis vectors, block coordinates
    # coordinates of each kernel-basis vector, free part (and torsion residues)
    kernel_to_free: list
    kernel_to_torsion: list


@dataclass
class HomologyTable:
    spec: OperadSpec
    cx: BigradedComplex
    cap: int
    ring: str  # "Q" or "Z"
    flavor: str
    entries: dict = field(default_factory=dict)  # (k, g) -> _Block

    def betti(self, k: int, g: int) -> int:
        blk = self.entries.get((k, g))
        return blk.betti if blk else 0

    def torsion(self, k: int, g: int) -> tuple:
        blk = self.entries.get((k, g))
        return blk.torsion if blk else ()

    def bidegrees(self):
        return sorted(self.entries)

    def representative(self, k: int, g: int, index: int) -> OperadElement:
        blk = self.entries[(k, g)]
        reps = blk.free_reps + blk.torsion_reps
        return self.cx.block_coords_to_element(k, g, reps[index])

    def basis_classes(self, k: int, g: int) -> list:
        blk = self.entries.get((k, g))
        if not blk:
            return []
        out = []
        for i in range(blk.betti):
            coords = tuple(1 if j == i else 0 for j in range(blk.betti))
            out.append(HomologyClass(k, g, coords, tuple(0 for _ in blk.torsion)))
        return out

    def class_element(self, cls: HomologyClass) -> OperadElement:
        """A cycle representing the class (free part only)."""
        blk = self.entries[(cls.arity, cls.grading)]
        el = OperadElement.zero(cls.arity)
        for c, rep in zip(cls.coordinates, blk.free_reps):
            if c:
                vec = [c * v for v in rep]
                el = el + self.cx.block_coords_to_element(cls.arity, cls.grading, vec)
        return el

    def to_dict(self) -> dict:
        out = {}
        for (k, g), blk in sorted(self.entries.items()):
            out[f"{k},{g}"] = {
                "betti": blk.betti,
                "torsion": [str(t) for t in blk.torsion],
            }
        return out


def _block_matrix(cx: BigradedComplex, k: int, g: int) -> ExactMatrix:
    mat = cx.differentials.get((k, g))
    if mat is not None:
        return mat
    rows = cx.block_dim(k + 1, g)
    cols = cx.block_dim(k, g)
    return ExactMatrix.zero(rows, cols)


def _clear_denominators(vecs: list) -> list:
    """Scale each rational vector to a primitive integer vector."""
    out = []
    for v in vecs:
        mult = lcm(*(Fraction(x).denominator for x in v)) if v else 1
        w = [int(Fraction(x) * mult) for x in v]
        from math import gcd
        d = 0
        for x in w:
            d = gcd(d, x)
        if d > 1:
            w = [x // d for x in w]
        out.append(w)
    return out


def compute_hh(
    spec: OperadSpec, cap: int, flavor: str = "normalized", ring: str = "Q"
) -> HomologyTable:
    """Bigraded homology of the (normalized or full) Hochschild complex.

    Over Q the table has Betti numbers and rational representatives.  Over Z
    the kernel lattice is saturated and the Smith normal form of the image
    coordinates additionally yields torsion invariant factors.
    """
    if ring not in ("Q", "Z"):
        raise ValueError(f"unknown coefficient ring {ring!r}")
    cx = build_complex(spec, cap, flavor=flavor)
    table = HomologyTable(spec=spec, cx=cx, cap=cap, ring=ring, flavor=flavor)
    for k in range(cap):  # need d_k landing in arity k+1 <= cap
        for g in cx.block_gradings(k):
            n = cx.block_dim(k, g)
            if n == 0:
                continue
            d_out = _block_matrix(cx, k, g)
            if k >= 1 and cx.block_dim(k - 1, g) > 0:
                d_in = _block_matrix(cx, k - 1, g)
            else:
                d_in = ExactMatrix.zero(n, 0)
            table.entries[(k, g)] = _homology_block(d_out, d_in, ring)
    return table


def _homology_block(d_out: ExactMatrix, d_in: ExactMatrix, ring: str) -> _Block:
    n = d_out.cols
    if ring == "Z":
        kern = integer_kernel_basis(d_out)
    else:
        kern = _clear_denominators(kernel_basis(d_out))
    r = len(kern)
    if r == 0:
        return _Block(0, (), [], [], [], [], [])
    K = ExactMatrix.from_cols(kern, rows=n)
    # image columns, written in kernel coordinates (exact: im d_in <= ker d_out,
    # and the integer kernel basis is saturated so the coordinates stay integral)
    img_cols = []
    for j in range(d_in.cols):
        col = d_in.column(j)
        coords = solve_in_image(K, col)
        if coords is None:
            raise HomologyError("differential image escapes the kernel: d d != 0?")
        img_cols.append(coords)
    C = ExactMatrix.from_cols(img_cols, rows=r)
    dec = snf(C)
    facs = dec.invariant_factors()
    rk = len(dec.invariant_factors())
    # rows of U give coordinates w.r.t. a new kernel basis K' = K U^{-1} in which
    # the image lattice is diagonal; generators past rk are free, factors > 1 torsion
    Uinv = _integer_inverse(dec.U)
    newbasis = [ (K @ Uinv).column(j) for j in range(r) ]
    free_reps, torsion_reps, torsion = [], [], []
    for j in range(r):
        if j >= rk:
            free_reps.append(newbasis[j])
        elif facs[j] not in (1, -1):
            torsion.append(abs(facs[j]))
            torsion_reps.append(newbasis[j])
    betti = r - rk
    # map kernel-basis coordinates to homology coordinates: U applied, free rows kept
    kernel_to_free, kernel_to_torsion = [], []
    tor_rows = [j for j in range(rk) if facs[j] not in (1, -1)]
    for i in range(r):
        urow = [dec.U.get(j, i) for j in range(r)]
        kernel_to_free.append([urow[j] for j in range(rk, r)])
        kernel_to_torsion.append([urow[j] for j in tor_rows])
    if ring == "Q":
        torsion, torsion_reps = (), []
        kernel_to_torsion = [[] for _ in range(r)]
    return _Block(
        betti, tuple(torsion), free_reps, torsion_reps, kern,
        kernel_to_free, kernel_to_torsion,
    )


def _integer_inverse(U: ExactMatrix) -> ExactMatrix:
    """Inverse of a unimodular matrix (entries stay integral)."""
    n = U.rows
    inv_cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = solve_in_image(U, e)
        if x is None:
            raise HomologyError("matrix is not invertible")
        inv_cols.append([int(Fraction(v)) if Fraction(v).denominator == 1 else v for v in x])
    return ExactMatrix.from_cols(inv_cols, rows=n)


def class_of(table: HomologyTable, cycle: OperadElement):
    """Homology coordinates of a cycle; None if its bidegree is not tabulated.

    Rejects non-cycles, reporting the nonzero boundary as witness.
    """
    if cycle.is_zero():
        return HomologyClass(cycle.arity, 0, (), ())
    k = cycle.arity
    g = table.spec.grading(cycle)
    boundary = hochschild_differential(table.spec, cycle)
    if not boundary.is_zero():
        raise HomologyError(f"not a cycle: boundary is {boundary!r}")
    blk = table.entries.get((k, g))
    if blk is None:
        return None
    coords_block = table.cx.element_block_coords(cycle, g)
    if coords_block is None:
        raise HomologyError("cycle lies outside the complex's block basis")
    if not blk.kernel:
        raise HomologyError("cycle claimed in a block with trivial kernel")
    K = ExactMatrix.from_cols(blk.kernel, rows=len(coords_block))
    kc = solve_in_image(K, coords_block)
    if kc is None:
        raise HomologyError("cycle not in the kernel lattice span")
    free = [Fraction(0)] * blk.betti
    tors = [Fraction(0)] * len(blk.torsion)
    for i, c in enumerate(kc):
        if c == 0:
            continue
        for j, u in enumerate(blk.kernel_to_free[i]):
            free[j] += Fraction(c) * u
        for j, u in enumerate(blk.kernel_to_torsion[i]):
            tors[j] += Fraction(c) * u
    tors_out = []
    for t, d in zip(tors, blk.torsion):
        if t.denominator != 1:
            tors_out.append(t)
        else:
            tors_out.append(int(t) % d)
    def norm(x: Fraction):
        return int(x) if x.denominator == 1 else x
    return HomologyClass(k, g, tuple(norm(f) for f in free), tuple(tors_out))


_CHAIN_OPS = {"bullet", "bracket", "connes_b"}


def induced_op(table: HomologyTable, op: str, *classes: HomologyClass) -> HomologyClass:
    """Apply a chain operation to representatives and read off the class."""
    from . import bv

    if op not in _CHAIN_OPS:
        raise ValueError(f"unknown induced operation {op!r}; expected one of {sorted(_CHAIN_OPS)}")
    spec = table.spec
    elems = [table.class_element(c) for c in classes]
    if op == "connes_b":
        (x,) = elems
        out = bv.connes_b(spec, x)
    else:
        x, y = elems
        out_arity = x.arity + y.arity - (1 if op == "bracket" else 0)
        if out_arity > table.cap - 1:
            raise TruncationError(
                f"induced {op} lands in arity {out_arity}; recompute the table "
                f"with cap >= {out_arity + 1} to resolve it"
            )
        out = bv.bullet(spec, x, y) if op == "bullet" else bv.bracket(spec, x, y)
    if out.is_zero():
        return HomologyClass(out.arity, 0, (), ())
    cls = class_of(table, out)
    if cls is None:
        raise HomologyError(
            f"induced {op} lands in bidegree ({out.arity}, {spec.grading(out)}) "
            "missing from the table"
        )
    return cls


def _random_boundary(table: HomologyTable, k: int, g: int, rng) -> OperadElement:
    """d of a random chain of arity k-1, grading g (zero if no source block)."""
    spec = table.spec
    if k == 0:
        return OperadElement.zero(0)
    dim = table.cx.block_dim(k - 1, g)
    if dim == 0:
        return OperadElement.zero(k)
    coeffs = [rng.randint(-3, 3) for _ in range(dim)]
    w = table.cx.block_coords_to_element(k - 1, g, coeffs)
    return hochschild_differential(spec, w)


def verify_bv_on_homology(table: HomologyTable, probes: int = 20, seed: int = 0) -> VerificationReport:
    """Exact BV-algebra checks on the homology basis of a rational table.

    Checks graded commutativity of the product, the Leibniz rule of the
    bracket, graded Jacobi, B^2 = 0, the BV relation tying them together, and
    well-definedness (boundary perturbations of representatives never move
    any induced class).  All signs read against the total degree |x| = g - k.
    """
    from . import bv

    rep = VerificationReport(f"homology-level BV axioms [{table.spec.name}]")
    rep.notes["seed"] = seed
    rep.notes["probes"] = probes
    if table.ring != "Q":
        rep.add("table over Q", False, witness=f"table ring is {table.ring}")
        return rep
    spec = table.spec
    cap = table.cap
    basis = []  # (class, element, degree)
    for (k, g) in table.bidegrees():
        for cls in table.basis_classes(k, g):
            basis.append((cls, table.class_element(cls), g - k))
    rep.notes["homology_basis_size"] = len(basis)

    def cls_or_zero(el: OperadElement):
        if el.is_zero():
            return None
        return class_of(table, el)

    def null_homologous(e: OperadElement) -> bool:
        if e.is_zero():
            return True
        c = class_of(table, e)
        return c is not None and c.is_zero()

    def classes_equal(e1: OperadElement, e2: OperadElement) -> bool:
        if e1.arity != e2.arity:
            # only degenerate zero conventions (empty sums) disagree in arity
            return null_homologous(e1) and null_homologous(e2)
        dif = e1 - e2
        if dif.is_zero():
            return True
        c = class_of(table, dif)
        return c is not None and c.is_zero()

    def in_range(*elems) -> bool:
        return all(e.arity <= cap - 1 for e in elems)

    # graded commutativity of the induced product
    n, bad = 0, None
    for ci, xi, di in basis:
        for cj, xj, dj in basis:
            if xi.arity + xj.arity > cap - 1:
                continue
            n += 1
            lhs = bv.bullet(spec, xi, xj)
            rhs = bv.bullet(spec, xj, xi).scale(-1 if (di * dj) % 2 else 1)
            if not classes_equal(lhs, rhs):
                bad = f"x.y != (-1)^(|x||y|) y.x for x at {(ci.arity, ci.grading)}, y at {(cj.arity, cj.grading)}"
                break
        if bad:
            break
    rep.add("graded commutativity of .", bad is None, n, bad)

    # Leibniz: [x, y.z] = [x,y].z + (-1)^((|x|+1)|y|) y.[x,z]
    n, bad = 0, None
    for ci, xi, di in basis:
        for cj, xj, dj in basis:
            for ck, xk, dk in basis:
                if xi.arity + xj.arity + xk.arity - 1 > cap - 1:
                    continue
                n += 1
                lhs = bv.bracket(spec, xi, bv.bullet(spec, xj, xk))
                rhs = bv.bullet(spec, bv.bracket(spec, xi, xj), xk) + bv.bullet(
                    spec, xj, bv.bracket(spec, xi, xk)
                ).scale(-1 if ((di + 1) * dj) % 2 else 1)
                if not classes_equal(lhs, rhs):
                    bad = f"Leibniz fails at bidegrees {(ci.arity, ci.grading)}, {(cj.arity, cj.grading)}, {(ck.arity, ck.grading)}"
                    break
            if bad:
                break
        if bad:
            break
    rep.add("Leibniz rule for [.,.] over .", bad is None, n, bad)

    # graded Jacobi (for the degree-(+1) bracket):
    # (-1)^((|x|+1)(|z|+1)) [[x,y],z] + cyclic == 0
    n, bad = 0, None
    for ci, xi, di in basis:
        for cj, xj, dj in basis:
            for ck, xk, dk in basis:
                if xi.arity + xj.arity + xk.arity - 2 > cap - 1:
                    continue
                n += 1
                t1 = bv.bracket(spec, bv.bracket(spec, xi, xj), xk).scale(
                    -1 if ((di + 1) * (dk + 1)) % 2 else 1
                )
                t2 = bv.bracket(spec, bv.bracket(spec, xj, xk), xi).scale(
                    -1 if ((dj + 1) * (di + 1)) % 2 else 1
                )
                t3 = bv.bracket(spec, bv.bracket(spec, xk, xi), xj).scale(
                    -1 if ((dk + 1) * (dj + 1)) % 2 else 1
                )
                terms = [t for t in (t1, t2, t3) if not t.is_zero()]
                total = terms[0] if terms else OperadElement.zero(0)
                for t in terms[1:]:
                    total = total + t
                if not classes_equal(total, OperadElement.zero(total.arity)):
                    bad = f"Jacobi fails at {(ci.arity, ci.grading)}, {(cj.arity, cj.grading)}, {(ck.arity, ck.grading)}"
                    break
            if bad:
                break
        if bad:
            break
    rep.add("graded Jacobi for [.,.]", bad is None, n, bad)

    # B^2 = 0 on homology
    n, bad = 0, None
    for ci, xi, di in basis:
        n += 1
        if not classes_equal(
            bv.connes_b(spec, bv.connes_b(spec, xi)), OperadElement.zero(max(xi.arity - 2, 0))
        ):
            bad = f"B^2 != 0 at {(ci.arity, ci.grading)}"
            break
    rep.add("B o B == 0 on homology", bad is None, n, bad)

    # BV relation: [x,y] = (-1)^|x| ( B(x.y) - B(x).y - (-1)^|x| x.B(y) )
    n, bad = 0, None
    for ci, xi, di in basis:
        for cj, xj, dj in basis:
            if xi.arity + xj.arity > cap - 1:
                continue
            n += 1
            lhs = bv.bracket(spec, xi, xj)
            # B of an arity-0 operand is zero "in arity -1": drop those terms
            rhs = bv.connes_b(spec, bv.bullet(spec, xi, xj))
            if xi.arity >= 1:
                rhs = rhs - bv.bullet(spec, bv.connes_b(spec, xi), xj)
            if xj.arity >= 1:
                rhs = rhs - bv.bullet(spec, xi, bv.connes_b(spec, xj)).scale(
                    -1 if di % 2 else 1
                )
            rhs = rhs.scale(-1 if di % 2 else 1)
            if not classes_equal(lhs, rhs):
                bad = f"BV relation fails at {(ci.arity, ci.grading)}, {(cj.arity, cj.grading)}"
                break
        if bad:
            break
    rep.add("BV relation [x,y] == (-1)^|x|(B(x.y) - B(x).y - (-1)^|x| x.B(y))", bad is None, n, bad)

    # well-definedness probes: perturb representatives by random boundaries
    rng = random.Random(seed)
    n, bad = 0, None
    for _ in range(probes):
        if bad:
            break
        for ci, xi, di in basis:
            pert = xi + _random_boundary(table, xi.arity, ci.grading, rng)
            n += 1
            if xi.arity >= 1 and not classes_equal(
                bv.connes_b(spec, pert), bv.connes_b(spec, xi)
            ):
                bad = f"B moved under boundary perturbation at {(ci.arity, ci.grading)}"
                break
            for cj, xj, dj in basis:
                if xi.arity + xj.arity > cap - 1:
                    continue
                if not classes_equal(bv.bullet(spec, pert, xj), bv.bullet(spec, xi, xj)):
                    bad = f". moved under boundary perturbation at {(ci.arity, ci.grading)} x {(cj.arity, cj.grading)}"
                    break
                if not classes_equal(bv.bracket(spec, pert, xj), bv.bracket(spec, xi, xj)):
                    bad = f"[.,.] moved under boundary perturbation at {(ci.arity, ci.grading)} x {(cj.arity, cj.grading)}"
                    break
            if bad:
                break
    rep.add("well-definedness under boundary perturbations", bad is None, n, bad)
    return rep
