"""Operad-definition file format and built-in operad constructors.

The file format is a single JSON document:

    {
      "name": str,
      "ring": "Z" | "Q",
      "arities": {"0": [[generator-name, grading], ...], ...},
      "id": [[coeff, name], ...],      # linear combinations; coefficients are
      "e": ..., "mu": ...,             # decimal-integer or "p/q" strings
      "compose": [[l, xname, i, m, yname, [[coeff, name], ...]], ...],
      "tau": {"k": [[row, col, coeff], ...], ...},   # optional, sparse triplets
      "sparse": bool,                  # omitted compose entries mean zero
      "metadata": {...}
    }

Parsing and validation are distinct stages: ``parse_operad_file`` only checks
well-formedness and internal consistency of the data; the structural axioms
are the business of ``validate_operad`` / ``validate_cyclic``.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import ExactMatrix, Scalar, _norm, solve_in_image
from .operad import Generator, OperadElement, OperadError, OperadSpec

TOP_LEVEL_KEYS = {"name", "ring", "arities", "id", "e", "mu", "compose", "tau", "sparse", "metadata"}

DEFAULT_MAX_RANK = 4096


class OperadFileError(Exception):
    """Raised on malformed operad documents.

    ``kind`` is "syntax" (bad JSON, with position) or "semantic" (well-formed
    JSON violating the schema), so the CLI can map them to exit codes.
    """

    def __init__(self, message: str, kind: str = "semantic"):
        super().__init__(message)
        self.kind = kind


# -- coefficients ------------------------------------------------------------------


def coeff_to_str(c: Scalar) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def coeff_from_str(s) -> Scalar:
    if not isinstance(s, str):
        raise OperadFileError(f"coefficient {s!r} must be a string")
    try:
        return _norm(Fraction(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise OperadFileError(f"bad coefficient {s!r}: {exc}") from None


def _combo_to_json(x: OperadElement) -> list:
    return [[coeff_to_str(x.terms[n]), n] for n in sorted(x.terms)]


def _combo_from_json(arity: int, data, declared: dict, what: str) -> OperadElement:
    if not isinstance(data, list):
        raise OperadFileError(f"{what}: linear combination must be a list")
    terms = {}
    for item in data:
        if not (isinstance(item, list) and len(item) == 2):
            raise OperadFileError(f"{what}: bad term {item!r}")
        c, name = coeff_from_str(item[0]), item[1]
        if (arity, name) not in declared:
            raise OperadFileError(f"{what}: undeclared generator {name!r} in arity {arity}")
        terms[name] = terms.get(name, 0) + c
    return OperadElement(arity, terms)


# -- serializer --------------------------------------------------------------------


def serialize_operad(spec: OperadSpec) -> str:
    """Canonical JSON: sorted keys, sorted entries, exact string coefficients."""
    spec.materialize()
    doc = {
        "name": spec.name,
        "ring": spec.ring,
        "arities": {
            str(k): [[g.name, g.grading] for g in gens] for k, gens in spec.components.items()
        },
        "id": _combo_to_json(spec.identity),
        "e": _combo_to_json(spec.unit),
        "mu": _combo_to_json(spec.multiplication),
        "compose": [],
        "sparse": True,
        "metadata": dict(sorted(spec.metadata.items())),
    }
    entries = []
    for xg, i, yg in spec.compose_domain():
        res = spec.table_entry(xg, i, yg)
        if not res.is_zero():
            entries.append([xg.arity, xg.name, i, yg.arity, yg.name, _combo_to_json(res)])
    entries.sort(key=lambda e: (e[0], e[1], e[2], e[3], e[4]))
    doc["compose"] = entries
    if spec.has_tau:
        tau = {}
        for k in spec.components:
            if k <= spec.arity_cap:
                M = spec.tau_matrix(k)
                tau[str(k)] = [
                    [r, c, coeff_to_str(v)] for (r, c), v in sorted(M.entries.items())
                ]
        doc["tau"] = tau
    return json.dumps(doc, sort_keys=True, indent=1)


# -- parser ------------------------------------------------------------------------


def parse_operad_file(document: str, lenient: bool = False) -> OperadSpec:
    """Parse a UTF-8 operad document into an (unvalidated) OperadSpec.

    Syntax errors report line/column; semantic errors name the offending
    entry.  The result must still pass validate_operad (and validate_cyclic
    when tau is present) before other modules accept it.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise OperadFileError(
            f"JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            kind="syntax",
        ) from None
    if not isinstance(doc, dict):
        raise OperadFileError("top level must be a JSON object")
    unknown = set(doc) - TOP_LEVEL_KEYS
    if unknown and not lenient:
        raise OperadFileError(f"unknown top-level keys: {sorted(unknown)}")
    for req in ("name", "arities"):
        if req not in doc:
            raise OperadFileError(f"missing top-level key {req!r}")
    if "mu" not in doc:
        raise OperadFileError("multiplication required: missing top-level key 'mu'")
    for req in ("id", "e"):
        if req not in doc:
            raise OperadFileError(f"missing distinguished element {req!r}")

    ring = doc.get("ring", "Q")
    if ring not in ("Z", "Q"):
        raise OperadFileError(f"unknown ring tag {ring!r}")

    components: dict[int, list[Generator]] = {}
    declared: dict[tuple[int, str], int] = {}
    if not isinstance(doc["arities"], dict):
        raise OperadFileError("'arities' must be an object")
    for kstr, gens in doc["arities"].items():
        try:
            k = int(kstr)
        except ValueError:
            raise OperadFileError(f"bad arity key {kstr!r}") from None
        if k < 0:
            raise OperadFileError(f"negative arity {k}")
        comp = []
        for item in gens:
            if not (isinstance(item, list) and len(item) == 2 and isinstance(item[1], int)):
                raise OperadFileError(f"arity {k}: bad generator entry {item!r}")
            name, grading = item
            if (k, name) in declared:
                raise OperadFileError(f"arity {k}: duplicate generator {name!r}")
            declared[(k, name)] = grading
            comp.append(Generator(k, name, grading))
        components[k] = comp
    arity_cap = max(components) if components else 0

    ident = _combo_from_json(1, doc["id"], declared, "id")
    unit = _combo_from_json(0, doc["e"], declared, "e")
    mu = _combo_from_json(2, doc["mu"], declared, "mu")

    sparse = bool(doc.get("sparse", False))
    table: dict = {}
    for entry in doc.get("compose", []):
        if not (isinstance(entry, list) and len(entry) == 6):
            raise OperadFileError(f"bad compose entry {entry!r}")
        l, xname, i, m, yname, combo = entry
        if (l, xname) not in declared:
            raise OperadFileError(f"compose entry {entry[:5]}: undeclared generator {xname!r}")
        if (m, yname) not in declared:
            raise OperadFileError(f"compose entry {entry[:5]}: undeclared generator {yname!r}")
        if not 1 <= i <= l:
            raise OperadFileError(f"compose entry {entry[:5]}: slot {i} out of range")
        out = _combo_from_json(l + m - 1, combo, declared, f"compose entry {entry[:5]}")
        want = declared[(l, xname)] + declared[(m, yname)]
        for n in out.terms:
            if declared[(l + m - 1, n)] != want:
                raise OperadFileError(
                    f"compose entry {entry[:5]}: output grading of {n!r} is "
                    f"{declared[(l + m - 1, n)]}, expected {want}"
                )
        key = (l, xname, i, m, yname)
        if key in table:
            raise OperadFileError(f"duplicate compose entry {entry[:5]}")
        table[key] = out

    spec = OperadSpec(
        name=doc["name"],
        components=components,
        identity=ident,
        unit=unit,
        multiplication=mu,
        arity_cap=arity_cap,
        compose_table=table,
        compose_fn=None,
        ring=ring,
        metadata=doc.get("metadata", {}),
    )
    if not sparse:
        missing = [
            (xg.name, i, yg.name)
            for xg, i, yg in spec.compose_domain()
            if (xg.arity, xg.name, i, yg.arity, yg.name) not in table
        ]
        if missing:
            raise OperadFileError(
                f"{len(missing)} compose entries missing and 'sparse' is not set; "
                f"first: {missing[0]}"
            )
    else:
        # the spec copied the table at construction, so fill its copy
        for xg, i, yg in spec.compose_domain():
            key = (xg.arity, xg.name, i, yg.arity, yg.name)
            if key not in spec._table:
                spec._table[key] = OperadElement.zero(xg.arity + yg.arity - 1)

    if "tau" in doc:
        tau = {}
        for kstr, triplets in doc["tau"].items():
            k = int(kstr)
            n = len(components.get(k, []))
            ent = {}
            for trip in triplets:
                if not (isinstance(trip, list) and len(trip) == 3):
                    raise OperadFileError(f"tau[{k}]: bad triplet {trip!r}")
                r, c, v = trip
                ent[(r, c)] = coeff_from_str(v)
            tau[k] = ExactMatrix(n, n, ent)
        missing = [k for k in components if k <= arity_cap and k not in tau]
        if missing:
            raise OperadFileError(f"tau present but missing arities {missing}")
        spec._tau = tau
    return spec


# -- built-in: associative operad ---------------------------------------------------


def builtin_assoc(cap: int) -> OperadSpec:
    """One generator a_k per arity, all gradings zero, a_l o_i a_m = a_(l+m-1)."""
    if cap < 2:
        raise ValueError("cap must be at least 2")
    components = {k: [Generator(k, f"a{k}", 0)] for k in range(cap + 1)}

    def compose_fn(xg: Generator, i: int, yg: Generator) -> OperadElement:
        k = xg.arity + yg.arity - 1
        return OperadElement.basis(k, f"a{k}")

    tau = {k: ExactMatrix.identity(1) for k in range(cap + 1)}
    return OperadSpec(
        name="assoc",
        components=components,
        identity=OperadElement.basis(1, "a1"),
        unit=OperadElement.basis(0, "a0"),
        multiplication=OperadElement.basis(2, "a2"),
        arity_cap=cap,
        compose_fn=compose_fn,
        tau=tau,
        ring="Z",
        metadata={"builtin": "assoc"},
    )


# -- built-in: endomorphism operad of a graded Frobenius algebra ---------------------


@dataclass
class FrobeniusSpec:
    """A graded Frobenius algebra given by structure constants.

    ``mult[(i, j)]`` is the coefficient vector of v_i * v_j; ``pairing`` is the
    Gram matrix of the invariant pairing.  All data exact.
    """

    basis: list[str]
    gradings: list[int]
    unit: list[Scalar]
    mult: dict[tuple[int, int], list[Scalar]]
    pairing: list[list[Scalar]]
    name: str = "frobenius"

    @property
    def rank(self) -> int:
        return len(self.basis)

    def product(self, u: list[Scalar], v: list[Scalar]) -> list[Scalar]:
        out: list[Scalar] = [0] * self.rank
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                for c, m in enumerate(self.mult[(i, j)]):
                    if m:
                        out[c] = out[c] + a * b * m
        return [_norm(x) for x in out]

    def pair(self, u: list[Scalar], v: list[Scalar]) -> Scalar:
        s = 0
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if b and self.pairing[i][j]:
                    s = s + a * b * self.pairing[i][j]
        return _norm(s)

    def validate(self):
        r = self.rank
        basis_vecs = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
        for i, j in itertools.product(range(r), repeat=2):
            if (i, j) not in self.mult:
                raise OperadError(f"missing product v_{i} * v_{j}")
            want = self.gradings[i] + self.gradings[j]
            for c, m in enumerate(self.mult[(i, j)]):
                if m and self.gradings[c] != want:
                    raise OperadError(f"product v_{i}v_{j} not grading-homogeneous")
        for i in range(r):
            if self.product(self.unit, basis_vecs[i]) != basis_vecs[i]:
                raise OperadError(f"unit fails on v_{i} (left)")
            if self.product(basis_vecs[i], self.unit) != basis_vecs[i]:
                raise OperadError(f"unit fails on v_{i} (right)")
        for i, j, k in itertools.product(range(r), repeat=3):
            lhs = self.product(self.product(basis_vecs[i], basis_vecs[j]), basis_vecs[k])
            rhs = self.product(basis_vecs[i], self.product(basis_vecs[j], basis_vecs[k]))
            if lhs != rhs:
                raise OperadError(f"associativity fails on ({i},{j},{k})")
        G = ExactMatrix.from_rows(self.pairing)
        if G.det() == 0:
            raise OperadError("pairing is degenerate")
        # graded symmetry and homogeneity of the pairing degree
        pairing_degree = None
        for i, j in itertools.product(range(r), repeat=2):
            gij = self.pairing[i][j]
            sign = -1 if (self.gradings[i] * self.gradings[j]) % 2 else 1
            if gij != sign * self.pairing[j][i]:
                raise OperadError(f"pairing not graded symmetric at ({i},{j})")
            if gij:
                d = self.gradings[i] + self.gradings[j]
                if pairing_degree is None:
                    pairing_degree = d
                elif pairing_degree != d:
                    raise OperadError("pairing is not grading-homogeneous")
        # invariance <ab, c> == <a, bc>
        for i, j, k in itertools.product(range(r), repeat=3):
            lhs = self.pair(self.product(basis_vecs[i], basis_vecs[j]), basis_vecs[k])
            rhs = self.pair(basis_vecs[i], self.product(basis_vecs[j], basis_vecs[k]))
            if lhs != rhs:
                raise OperadError(f"pairing invariance fails on ({i},{j},{k})")


def frobenius_dual_numbers() -> FrobeniusSpec:
    """Q[x]/(x^2) with deg x = 1 and <1, x> = 1: the rank-2 cyclic workhorse."""
    return FrobeniusSpec(
        basis=["o", "x"],
        gradings=[0, 1],
        unit=[1, 0],
        mult={(0, 0): [1, 0], (0, 1): [0, 1], (1, 0): [0, 1], (1, 1): [0, 0]},
        pairing=[[0, 1], [1, 0]],
        name="dual1",
    )


def frobenius_ground() -> FrobeniusSpec:
    return FrobeniusSpec(
        basis=["o"], gradings=[0], unit=[1], mult={(0, 0): [1]}, pairing=[[1]], name="ground"
    )


def _gen_name(out: str, inputs: tuple[str, ...]) -> str:
    return f"E_{''.join(inputs)}__{out}"


def builtin_frobenius_end(frob: FrobeniusSpec, cap: int, max_rank: int | None = None) -> OperadSpec:
    """Endomorphism operad of a graded Frobenius algebra, with the cyclic
    structure induced by the pairing.

    O(k) is spanned by the maps sending one basis tensor to one basis vector;
    partial composition is substitution with Koszul signs, and tau rotates the
    k+1 tensor slots of the associated functional <f(a_1..a_k), a_0> through
    the pairing.  The constructed spec must pass both validators; the
    constructor is wrong otherwise.
    """
    frob.validate()
    if max_rank is None:
        max_rank = int(os.environ.get("OPHH_MAX_RANK", DEFAULT_MAX_RANK))
    r = frob.rank
    if r ** (cap + 1) > max_rank:
        raise OperadError(
            f"component rank {r}^{cap + 1} exceeds limit {max_rank} "
            f"(raise OPHH_MAX_RANK to override)"
        )
    degs = frob.gradings
    names = frob.basis
    idx_of = {n: i for i, n in enumerate(names)}

    components: dict[int, list[Generator]] = {}
    info: dict[tuple[int, str], tuple[int, tuple[int, ...]]] = {}
    for k in range(cap + 1):
        gens = []
        for ins in itertools.product(range(r), repeat=k):
            for out in range(r):
                grading = degs[out] - sum(degs[i] for i in ins)
                nm = _gen_name(names[out], tuple(names[i] for i in ins))
                gens.append(Generator(k, nm, grading))
                info[(k, nm)] = (out, ins)
        components[k] = gens

    def compose_fn(xg: Generator, i: int, yg: Generator) -> OperadElement:
        (xout, xins) = info[(xg.arity, xg.name)]
        (yout, yins) = info[(yg.arity, yg.name)]
        k = xg.arity + yg.arity - 1
        if xins[i - 1] != yout:
            return OperadElement.zero(k)
        new_ins = xins[: i - 1] + yins + xins[i:]
        sign = -1 if (yg.grading * sum(degs[a] for a in xins[: i - 1])) % 2 else 1
        nm = _gen_name(names[xout], tuple(names[a] for a in new_ins))
        return OperadElement.basis(k, nm).scale(sign)

    GT = ExactMatrix.from_rows(frob.pairing).transpose()

    def tau_fn(k: int) -> ExactMatrix:
        # functional Phi_f(a_0,..,a_k) = (-1)^(f~ deg a_0) <f(a_1..a_k), a_0>;
        # tau rotates the last slot to the front with its Koszul sign:
        # Phi_(tau f)(c_0,..,c_k) = (-1)^(deg c_k * sum deg c_(<k)) Phi_f(c_k, c_0..c_(k-1))
        gens = components[k]
        pos = {g.name: p for p, g in enumerate(gens)}
        ent: dict[tuple[int, int], Scalar] = {}
        for col, g in enumerate(gens):
            out, ins = info[(k, g.name)]
            ftilde = g.grading
            if k == 0:
                # one slot: rotation is the identity and the signs cancel
                w = solve_in_image(GT, [frob.pairing[out][c0] for c0 in range(r)])
                for gamma, c in enumerate(w):
                    if c:
                        nm = _gen_name(names[gamma], ())
                        ent[(pos[nm], col)] = c
                continue
            rot_base = sum(degs[a] for a in ins)
            for t in range(r):
                if frob.pairing[out][t] == 0:
                    continue
                exp = degs[t] * rot_base + ftilde * (degs[t] + degs[ins[0]])
                sign = -1 if exp % 2 else 1
                rhs: list[Scalar] = [0] * r
                rhs[ins[0]] = sign * frob.pairing[out][t]
                w = solve_in_image(GT, rhs)
                new_ins = ins[1:] + (t,)
                for gamma, c in enumerate(w):
                    if c:
                        nm = _gen_name(names[gamma], tuple(names[a] for a in new_ins))
                        ent[(pos[nm], col)] = ent.get((pos[nm], col), 0) + c
        return ExactMatrix(len(gens), len(gens), ent)

    identity = OperadElement(1, {_gen_name(names[a], (names[a],)): 1 for a in range(r)})
    unit = OperadElement(0, {_gen_name(names[a], ()): c for a, c in enumerate(frob.unit) if c})
    mu_terms = {}
    for a, b in itertools.product(range(r), repeat=2):
        for c, m in enumerate(frob.mult[(a, b)]):
            if m:
                mu_terms[_gen_name(names[c], (names[a], names[b]))] = m
    mu = OperadElement(2, mu_terms)

    all_int = all(
        isinstance(v, int)
        for vec in list(frob.mult.values()) + [frob.unit] + frob.pairing
        for v in vec
    )
    return OperadSpec(
        name=f"frobenius:{frob.name}",
        components=components,
        identity=identity,
        unit=unit,
        multiplication=mu,
        arity_cap=cap,
        compose_fn=compose_fn,
        tau_fn=tau_fn,
        ring="Z" if all_int else "Q",
        metadata={
            "builtin": f"frobenius:{frob.name}",
            "tau_convention": "Phi_f(a_0..a_k) = <f(a_1..a_k), a_0>; "
            "tau rotates the last slot to the front with its Koszul sign",
        },
    )


# -- independent evaluator oracle ----------------------------------------------------


def value_table(frob: FrobeniusSpec, spec: OperadSpec, x: OperadElement) -> dict:
    """Value table of x as a multilinear map: input index tuple -> vector in A."""
    r = frob.rank
    idx_of = {n: i for i, n in enumerate(frob.basis)}
    table: dict[tuple[int, ...], list[Scalar]] = {}
    for name, c in x.terms.items():
        core = name[len("E_") : name.rindex("__")]
        out = name[name.rindex("__") + 2 :]
        # basis element names are single characters by construction
        ins = tuple(idx_of[ch] for ch in core)
        vec = table.setdefault(ins, [0] * r)
        vec[idx_of[out]] = vec[idx_of[out]] + c
    return {k: [_norm(v) for v in vec] for k, vec in table.items()}


def direct_compose_table(frob: FrobeniusSpec, xt: dict, l: int, i: int, yt: dict, m: int) -> dict:
    """Compose two value tables by honest substitution over all input tuples.

    Independent of the index-shuffle shortcut used by the built-in's
    composition table; this is the oracle side of the dual-route check.
    """
    r = frob.rank
    degs = frob.gradings
    out: dict[tuple[int, ...], list[Scalar]] = {}
    ydeg = None
    for ins, vec in yt.items():
        for c, v in enumerate(vec):
            if v:
                d = degs[c] - sum(degs[a] for a in ins)
                if ydeg is None:
                    ydeg = d
                elif ydeg != d:
                    raise OperadError("oracle needs a homogeneous y")
    if ydeg is None:
        return {}
    for ins in itertools.product(range(r), repeat=l + m - 1):
        prefix, mid, suffix = ins[: i - 1], ins[i - 1 : i - 1 + m], ins[i - 1 + m :]
        inner = yt.get(tuple(mid))
        if inner is None:
            continue
        koszul = -1 if (ydeg * sum(degs[a] for a in prefix)) % 2 else 1
        acc: list[Scalar] = [0] * r
        for mid_val, coeff in enumerate(inner):
            if not coeff:
                continue
            outer = xt.get(prefix + (mid_val,) + suffix)
            if outer is None:
                continue
            for c, v in enumerate(outer):
                if v:
                    acc[c] = acc[c] + koszul * coeff * v
        if any(acc):
            out[ins] = [_norm(v) for v in acc]
    return out


# -- registry -------------------------------------------------------------------------


BUILTIN_NAMES = ("assoc", "frobenius:dual1", "frobenius:ground", "bvlow")


def builtin_spec(name: str, cap: int) -> OperadSpec:
    """Resolve a --builtin name: assoc, frobenius:dual1, frobenius:ground, bvlow."""
    if name == "assoc":
        return builtin_assoc(cap)
    if name.startswith("frobenius:"):
        tag = name.split(":", 1)[1]
        if tag == "dual1":
            return builtin_frobenius_end(frobenius_dual_numbers(), cap)
        if tag == "ground":
            return builtin_frobenius_end(frobenius_ground(), cap)
        raise KeyError(f"unknown Frobenius algebra {tag!r}")
    if name == "bvlow":
        from .bvoperad import builtin_bv_lowarity

        return builtin_bv_lowarity()
    raise KeyError(f"unknown builtin {name!r}")
