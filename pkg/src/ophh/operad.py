"""Graded non-symmetric operads as finite basis/table data.

An :class:`OperadSpec` holds, per arity, an ordered list of graded basis
generators, partial-composition tables, the distinguished elements
``identity`` (arity 1), ``unit`` (arity 0) and ``multiplication`` (arity 2),
and optionally grading-preserving cyclic rotations ``tau`` (one square exact
matrix per arity).  All coefficient arithmetic is over exact rationals.

Total homological degree is always the internal grading minus the arity and
is derived on demand, never stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .exact import ExactMatrix, Scalar, _norm
from .report import VerificationReport


class OperadError(Exception):
    """Base class for mathematical errors raised by operad operations."""


class SlotError(OperadError):
    """Composition slot index out of range."""


class TruncationError(OperadError):
    """The requested operation needs arities beyond the spec's arity_cap.

    Recoverable: callers can rebuild the spec with a larger cap.
    """


class TauAbsentError(OperadError):
    """Cyclic structure requested but the spec carries no tau maps."""


@dataclass(frozen=True, order=True)
class Generator:
    arity: int
    name: str
    grading: int


class OperadElement:
    """Arity-homogeneous linear combination of generators, exact coefficients."""

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms=None):
        self.arity = arity
        clean = {}
        for name, c in (terms or {}).items():
            c = _norm(c)
            if c != 0:
                clean[name] = c
        self.terms = clean

    @classmethod
    def zero(cls, arity: int) -> "OperadElement":
        return cls(arity, {})

    @classmethod
    def basis(cls, arity: int, name: str) -> "OperadElement":
        return cls(arity, {name: 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "OperadElement") -> "OperadElement":
        if self.arity != other.arity:
            raise OperadError("cannot add elements of different arities")
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return OperadElement(self.arity, t)

    def __sub__(self, other: "OperadElement") -> "OperadElement":
        return self + other.scale(-1)

    def __neg__(self) -> "OperadElement":
        return self.scale(-1)

    def scale(self, c: Scalar) -> "OperadElement":
        if c == 0:
            return OperadElement.zero(self.arity)
        return OperadElement(self.arity, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OperadElement)
            and self.arity == other.arity
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"0[{self.arity}]"
        parts = []
        for name in sorted(self.terms):
            c = self.terms[name]
            parts.append(f"{c}*{name}" if c != 1 else name)
        return " + ".join(parts)


class OperadSpec:
    """Finite presentation of a graded (optionally cyclic) multiplicative operad."""

    def __init__(
        self,
        name: str,
        components: dict[int, list[Generator]],
        identity: OperadElement,
        unit: OperadElement,
        multiplication: OperadElement,
        arity_cap: int,
        compose_table: dict | None = None,
        compose_fn: Callable[[Generator, int, Generator], OperadElement] | None = None,
        tau: dict[int, ExactMatrix] | None = None,
        tau_fn: Callable[[int], ExactMatrix] | None = None,
        ring: str = "Z",
        metadata: dict | None = None,
    ):
        self.name = name
        # generators ordered lexicographically by name within each arity:
        # every matrix in the package relies on this ordering
        self.components = {
            k: sorted(gens, key=lambda g: g.name) for k, gens in sorted(components.items())
        }
        for k, gens in self.components.items():
            names = [g.name for g in gens]
            if len(set(names)) != len(names):
                raise OperadError(f"duplicate generator names in arity {k}")
            for g in gens:
                if g.arity != k:
                    raise OperadError(f"generator {g.name} listed under wrong arity")
        self._index = {
            (k, g.name): i for k, gens in self.components.items() for i, g in enumerate(gens)
        }
        self._grading = {
            (k, g.name): g.grading for k, gens in self.components.items() for g in gens
        }
        self.identity = identity
        self.unit = unit
        self.multiplication = multiplication
        self.arity_cap = arity_cap
        self._table: dict[tuple[int, str, int, int, str], OperadElement] = dict(
            compose_table or {}
        )
        self._compose_fn = compose_fn
        self._tau: dict[int, ExactMatrix] = dict(tau or {})
        self._tau_fn = tau_fn
        self._tau_powers: dict[tuple[int, int], ExactMatrix] = {}
        self.ring = ring
        self.metadata = metadata or {}

    # -- basic bookkeeping ---------------------------------------------------

    def dim(self, arity: int) -> int:
        return len(self.components.get(arity, []))

    def generators(self, arity: int) -> list[Generator]:
        return self.components.get(arity, [])

    def basis_index(self, arity: int, name: str) -> int:
        try:
            return self._index[(arity, name)]
        except KeyError:
            raise OperadError(f"unknown generator {name!r} in arity {arity}") from None

    def generator_grading(self, arity: int, name: str) -> int:
        return self._grading[(arity, name)]

    def grading(self, x: OperadElement) -> Optional[int]:
        """Internal grading of a homogeneous element; None for 0, error if mixed."""
        gradings = {self._grading[(x.arity, n)] for n in x.terms}
        if not gradings:
            return None
        if len(gradings) > 1:
            raise OperadError(f"element is not homogeneous: gradings {sorted(gradings)}")
        return gradings.pop()

    def degree(self, x: OperadElement) -> Optional[int]:
        """Total homological degree: internal grading minus arity."""
        g = self.grading(x)
        return None if g is None else g - x.arity

    def graded_components(self, x: OperadElement) -> dict[int, OperadElement]:
        out: dict[int, dict] = {}
        for name, c in x.terms.items():
            g = self._grading[(x.arity, name)]
            out.setdefault(g, {})[name] = c
        return {g: OperadElement(x.arity, t) for g, t in sorted(out.items())}

    def to_vector(self, x: OperadElement) -> list[Scalar]:
        v: list[Scalar] = [0] * self.dim(x.arity)
        for name, c in x.terms.items():
            v[self.basis_index(x.arity, name)] = c
        return v

    def from_vector(self, arity: int, v) -> OperadElement:
        gens = self.generators(arity)
        return OperadElement(arity, {gens[i].name: c for i, c in enumerate(v) if c})

    # -- composition -----------------------------------------------------------

    def table_entry(self, xg: Generator, i: int, yg: Generator) -> OperadElement:
        key = (xg.arity, xg.name, i, yg.arity, yg.name)
        hit = self._table.get(key)
        if hit is not None:
            return hit
        if self._compose_fn is None:
            raise OperadError(f"no composition table entry for {key}")
        val = self._compose_fn(xg, i, yg)
        self._table[key] = val
        return val

    def compose(self, x: OperadElement, i: int, y: OperadElement) -> OperadElement:
        """Partial composition x o_i y, extended bilinearly from the table."""
        l, m = x.arity, y.arity
        if not 1 <= i <= l:
            raise SlotError(f"slot {i} out of range for arity {l}")
        out_arity = l + m - 1
        if out_arity > self.arity_cap:
            raise TruncationError(
                f"composition lands in arity {out_arity}, beyond cap {self.arity_cap}"
            )
        acc: dict[str, Scalar] = {}
        for xn, xc in x.terms.items():
            xg = self.generators(l)[self.basis_index(l, xn)]
            for yn, yc in y.terms.items():
                yg = self.generators(m)[self.basis_index(m, yn)]
                for rn, rc in self.table_entry(xg, i, yg).terms.items():
                    acc[rn] = acc.get(rn, 0) + xc * yc * rc
        return OperadElement(out_arity, acc)

    def mu_apply(self, x: OperadElement, y: OperadElement) -> OperadElement:
        """Unsigned mu(x, y): compose x into the left slot of mu first."""
        if x.arity + y.arity > self.arity_cap:
            raise TruncationError(
                f"mu lands in arity {x.arity + y.arity}, beyond cap {self.arity_cap}"
            )
        return self.compose(self.compose(self.multiplication, 1, x), x.arity + 1, y)

    # -- cyclic structure --------------------------------------------------------

    @property
    def has_tau(self) -> bool:
        return bool(self._tau) or self._tau_fn is not None

    def tau_matrix(self, arity: int) -> ExactMatrix:
        if arity in self._tau:
            return self._tau[arity]
        if self._tau_fn is None:
            raise TauAbsentError(f"spec {self.name!r} has no cyclic structure")
        m = self._tau_fn(arity)
        self._tau[arity] = m
        return m

    def tau_power_matrix(self, arity: int, p: int) -> ExactMatrix:
        p %= arity + 1
        key = (arity, p)
        hit = self._tau_powers.get(key)
        if hit is None:
            if p == 0:
                hit = ExactMatrix.identity(self.dim(arity))
            else:
                hit = self.tau_matrix(arity) @ self.tau_power_matrix(arity, p - 1)
            self._tau_powers[key] = hit
        return hit

    def tau_pow(self, x: OperadElement, p: int = 1) -> OperadElement:
        """tau_k^p applied to x; negative p resolved via tau^{k+1} = id."""
        k = x.arity
        if k > self.arity_cap:
            raise TruncationError(f"arity {k} beyond cap {self.arity_cap}")
        p %= k + 1
        if p == 0 or x.is_zero():
            return x
        return self.from_vector(k, self.tau_power_matrix(k, p).matvec(self.to_vector(x)))

    # -- materialization (used by the serializer and round-trip equality) ---------

    def compose_domain(self) -> Iterable[tuple[Generator, int, Generator]]:
        for l, xgens in self.components.items():
            if l < 1:
                continue
            for m, ygens in self.components.items():
                if l + m - 1 > self.arity_cap:
                    continue
                for xg in xgens:
                    for i in range(1, l + 1):
                        for yg in ygens:
                            yield xg, i, yg

    def materialize(self):
        """Force every lazily-computed table entry and tau matrix into dicts."""
        for xg, i, yg in self.compose_domain():
            self.table_entry(xg, i, yg)
        if self.has_tau:
            for k in self.components:
                if k <= self.arity_cap:
                    self.tau_matrix(k)

    def equivalent_to(self, other: "OperadSpec") -> bool:
        """Field-for-field equality of the finite data (tables materialized)."""
        if self.components != other.components:
            return False
        if (self.identity, self.unit, self.multiplication) != (
            other.identity,
            other.unit,
            other.multiplication,
        ):
            return False
        if self.arity_cap != other.arity_cap or self.ring != other.ring:
            return False
        self.materialize()
        other.materialize()
        for xg, i, yg in self.compose_domain():
            if self.table_entry(xg, i, yg) != other.table_entry(xg, i, yg):
                return False
        if self.has_tau != other.has_tau:
            return False
        if self.has_tau:
            for k in self.components:
                if k <= self.arity_cap and self.tau_matrix(k) != other.tau_matrix(k):
                    return False
        return True


# -- validators ------------------------------------------------------------------


def _fmt_pair(a: OperadElement, b: OperadElement) -> str:
    return f"lhs={a!r} rhs={b!r}"


def validate_operad(spec: OperadSpec, max_arity: int | None = None) -> VerificationReport:
    """Check the graded operad, unit and multiplicative axioms on all basis
    elements whose compositions stay within the arity cap.

    The parallel-composition axiom carries the Koszul sign (-1)^(y~ z~); the
    sequential axiom is sign-free.
    """
    cap = spec.arity_cap if max_arity is None else min(max_arity, spec.arity_cap)
    rep = VerificationReport(f"operad axioms [{spec.name}]")

    ident, unit, mu = spec.identity, spec.unit, spec.multiplication
    if ident.arity != 1 or unit.arity != 0 or mu.arity != 2:
        rep.add("distinguished-element arities", False, witness="id/e/mu arity mismatch")
        return rep
    rep.add("distinguished-element arities", True)

    for what, el in (("id", ident), ("e", unit), ("mu", mu)):
        g = spec.grading(el)
        ok = g in (0, None)
        rep.add(f"grading({what}) == 0", ok, witness=None if ok else f"grading {g}")

    # grading additivity of every table entry
    n_checked, bad = 0, None
    for xg, i, yg in spec.compose_domain():
        res = spec.table_entry(xg, i, yg)
        n_checked += 1
        for rn in res.terms:
            if spec.generator_grading(res.arity, rn) != xg.grading + yg.grading:
                bad = f"{xg.name} o_{i} {yg.name} -> {res!r}"
                break
        if bad:
            break
    rep.add("grading additivity of composition", bad is None, n_checked, bad)

    # unit axioms
    n_checked, bad = 0, None
    for l, gens in spec.components.items():
        if l < 1 or l > cap:
            continue
        for g in gens:
            x = OperadElement.basis(l, g.name)
            for i in range(1, l + 1):
                n_checked += 1
                if spec.compose(x, i, ident) != x:
                    bad = f"{g.name} o_{i} id != {g.name}"
                    break
            n_checked += 1
            if spec.compose(ident, 1, x) != x:
                bad = f"id o_1 {g.name} != {g.name}"
            if bad:
                break
        if bad:
            break
    rep.add("unit axioms x o_i id = x = id o_1 x", bad is None, n_checked, bad)

    # multiplicative axioms
    try:
        assoc_ok = spec.compose(mu, 1, mu) == spec.compose(mu, 2, mu)
        rep.add(
            "mu o_1 mu == mu o_2 mu",
            assoc_ok,
            witness=None if assoc_ok else _fmt_pair(spec.compose(mu, 1, mu), spec.compose(mu, 2, mu)),
        )
    except TruncationError:
        rep.add("mu o_1 mu == mu o_2 mu", False, witness="arity cap below 3")
    u1, u2 = spec.compose(mu, 1, unit), spec.compose(mu, 2, unit)
    ok = u1 == ident and u2 == ident
    rep.add("mu o_1 e == mu o_2 e == id", ok, witness=None if ok else _fmt_pair(u1, u2))

    # sequential axiom: (x o_i y) o_{i-1+j} z == x o_i (y o_j z)
    n_checked, bad = 0, None
    for l, m, p, xg, i, yg, j, zg in _axiom_triples(spec, cap, sequential=True):
        x = OperadElement.basis(l, xg.name)
        y = OperadElement.basis(m, yg.name)
        z = OperadElement.basis(p, zg.name)
        lhs = spec.compose(spec.compose(x, i, y), i - 1 + j, z)
        rhs = spec.compose(x, i, spec.compose(y, j, z))
        n_checked += 1
        if lhs != rhs:
            bad = f"({xg.name} o_{i} {yg.name}) o_{i-1+j} {zg.name}: " + _fmt_pair(lhs, rhs)
            break
    rep.add("sequential axiom", bad is None, n_checked, bad)

    # parallel axiom: (x o_i y) o_j z == (-1)^(y~ z~) (x o_j z) o_{i+p-1} y, j < i
    n_checked, bad = 0, None
    for l, m, p, xg, i, yg, j, zg in _axiom_triples(spec, cap, sequential=False):
        x = OperadElement.basis(l, xg.name)
        y = OperadElement.basis(m, yg.name)
        z = OperadElement.basis(p, zg.name)
        lhs = spec.compose(spec.compose(x, i, y), j, z)
        rhs = spec.compose(spec.compose(x, j, z), i + p - 1, y)
        if (yg.grading * zg.grading) % 2:
            rhs = -rhs
        n_checked += 1
        if lhs != rhs:
            bad = f"({xg.name} o_{i} {yg.name}) o_{j} {zg.name}: " + _fmt_pair(lhs, rhs)
            break
    rep.add("parallel axiom (Koszul sign)", bad is None, n_checked, bad)

    return rep


def _axiom_triples(spec: OperadSpec, cap: int, sequential: bool):
    for l, xgens in spec.components.items():
        if l < 1:
            continue
        for m, ygens in spec.components.items():
            for p, zgens in spec.components.items():
                # final and intermediate arities must all stay within the cap
                if l + m + p - 2 > cap or l + m - 1 > cap or l + p - 1 > cap:
                    continue
                for xg in xgens:
                    for yg in ygens:
                        for zg in zgens:
                            if sequential:
                                if m < 1:
                                    continue
                                for i in range(1, l + 1):
                                    for j in range(1, m + 1):
                                        yield l, m, p, xg, i, yg, j, zg
                            else:
                                for i in range(2, l + 1):
                                    for j in range(1, i):
                                        yield l, m, p, xg, i, yg, j, zg


def validate_cyclic(spec: OperadSpec, max_arity: int | None = None) -> VerificationReport:
    """Check the cyclic-operad axioms: tau order, fixed points e and mu,
    grading preservation, and compatibility with partial composition."""
    cap = spec.arity_cap if max_arity is None else min(max_arity, spec.arity_cap)
    rep = VerificationReport(f"cyclic axioms [{spec.name}]")
    if not spec.has_tau:
        rep.add("tau present", False, witness="spec has no tau maps")
        return rep
    rep.add("tau present", True)

    # grading preservation: tau must be block-diagonal across internal gradings
    n_checked, bad = 0, None
    for k in spec.components:
        if k > cap:
            continue
        gens = spec.generators(k)
        M = spec.tau_matrix(k)
        if M.rows != len(gens) or M.cols != len(gens):
            bad = f"tau_{k} has shape {M.rows}x{M.cols}, expected {len(gens)}"
            break
        n_checked += 1
        for (r, c) in M.entries:
            if gens[r].grading != gens[c].grading:
                bad = f"tau_{k} mixes gradings ({gens[c].name} -> {gens[r].name})"
                break
        if bad:
            break
    rep.add("tau grading-preserving", bad is None, n_checked, bad)
    if bad:
        return rep

    # tau_k^(k+1) == id
    n_checked, bad = 0, None
    for k in spec.components:
        if k > cap:
            continue
        n_checked += 1
        if spec.tau_power_matrix(k, k + 1) != ExactMatrix.identity(spec.dim(k)):
            bad = f"tau_{k}^{k+1} != id"
            break
    rep.add("tau_k^(k+1) == id", bad is None, n_checked, bad)

    t0e = spec.tau_pow(spec.unit, 1)
    rep.add("tau_0(e) == e", t0e == spec.unit, witness=None if t0e == spec.unit else repr(t0e))
    t2m = spec.tau_pow(spec.multiplication, 1)
    ok = t2m == spec.multiplication
    rep.add("tau_2(mu) == mu", ok, witness=None if ok else repr(t2m))

    # compatibility with composition
    n_checked, bad = 0, None
    for l, xgens in spec.components.items():
        if l < 1:
            continue
        for m, ygens in spec.components.items():
            if l + m - 1 > cap:
                continue
            for xg in xgens:
                x = OperadElement.basis(l, xg.name)
                tx = spec.tau_pow(x, 1)
                for yg in ygens:
                    y = OperadElement.basis(m, yg.name)
                    for i in range(1, l + 1):
                        lhs = spec.tau_pow(spec.compose(x, i, y), 1)
                        if i >= 2:
                            rhs = spec.compose(tx, i - 1, y)
                        else:
                            if m < 1:
                                continue  # i=1 rule needs y of positive arity
                            rhs = spec.compose(spec.tau_pow(y, 1), m, tx)
                            if (xg.grading * yg.grading) % 2:
                                rhs = -rhs
                        n_checked += 1
                        if lhs != rhs:
                            bad = f"tau({xg.name} o_{i} {yg.name}): " + _fmt_pair(lhs, rhs)
                            break
                    if bad:
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    rep.add("tau compatibility with o_i", bad is None, n_checked, bad)
    return rep
