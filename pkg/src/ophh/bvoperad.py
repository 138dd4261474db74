"""Low-arity tables for the homology operad of framed little 2-disks.

Components up to arity 3 are built symbolically: a basis monomial is a set
partition of the inputs into blocks, each block a left-normed Lie word whose
letters may carry a delta decoration (the degree-1 operation applied to that
strand).  Ranks are 1, 2, 8, 48 at arities 0..3 (2^k k!).

Basis elements are realized as honest multilinear operations on a free
graded algebra carrying the product, the degree-1 bracket and the degree-1
square-zero operator, with rewriting rules

    ab = (-1)^(|a||b|) ba,         [a,b] = -(-1)^((|a|+1)(|b|+1)) [b,a],
    [a,bc] = [a,b]c + (-1)^((|a|+1)|b|) b[a,c],
    [a,[b,c]] = [[a,b],c] + (-1)^((|a|+1)(|b|+1)) [b,[a,c]],
    D(ab) = D(a)b + (-1)^|a| a D(b) + (-1)^|a| [a,b],
    D[a,b] = [Da,b] - (-1)^|a| [a,Db],      D^2 = 0.

Plain formula grafting is not operadic when the graft has odd degree, so
compositions are evaluated recursively on generators of every parity
profile, with endomorphism-operad Koszul prefactors; the structure
constants are read off and cross-checked over all profiles.

The cyclic structure is not shipped as a table either: it is solved exactly
from the cyclic-operad compatibility constraints level by level, and the
whole built-in is served only if both validators pass afterwards.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product as iproduct

from .exact import ExactMatrix, kernel_basis, rank as matrix_rank, solve_in_image
from .operad import Generator, OperadElement, OperadError, OperadSpec

MAX_ARITY = 3

# -- monomials ---------------------------------------------------------------------------
# block: tuple of (strand, delta) pairs; a length-r block encodes the
# left-normed Lie word [[...[v1,v2],...],vr], whose first letter is the block
# minimum.  monomial: tuple of blocks sorted by block minimum.  () is 1.
# par maps strand labels to intrinsic parities (absent labels are even).


def _block_degree(block, par=None) -> int:
    d = sum(d for _, d in block) + len(block) - 1
    if par:
        d += sum(par.get(v, 0) for v, _ in block)
    return d


def _mono_degree(mono, par=None) -> int:
    return sum(_block_degree(b, par) for b in mono)


def _mono_name(mono) -> str:
    if not mono:
        return "1"
    parts = []
    for block in mono:
        letters = [("D" if d else "") + f"x{v}" for v, d in block]
        word = letters[0]
        for letter in letters[1:]:
            word = f"[{word},{letter}]"
        parts.append(word)
    return ".".join(parts)


def _enumerate_blocks(vars_sorted):
    first, rest = vars_sorted[0], vars_sorted[1:]
    for order in permutations(rest):
        seq = (first,) + order
        for deltas in iproduct((0, 1), repeat=len(seq)):
            yield tuple(zip(seq, deltas))


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1:]
        yield part + [[first]]


@lru_cache(maxsize=None)
def basis_monomials(k: int):
    if k == 0:
        return [()]
    out = set()
    for part in _set_partitions(list(range(1, k + 1))):
        choices = [list(_enumerate_blocks(tuple(sorted(b)))) for b in part]
        for combo in iproduct(*choices):
            out.add(tuple(sorted(combo, key=lambda blk: blk[0][0])))
    return sorted(out)


# -- normal-form arithmetic on dicts {monomial: int} --------------------------------------


def _addmul(acc: dict, terms: dict, c) -> None:
    for m, v in terms.items():
        nv = acc.get(m, 0) + c * v
        if nv:
            acc[m] = nv
        else:
            acc.pop(m, None)


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


def prod_monos(m1, m2, par=None) -> dict:
    blocks = list(m1) + list(m2)
    sign = 1
    for i in range(1, len(blocks)):
        j = i
        while j > 0 and blocks[j - 1][0][0] > blocks[j][0][0]:
            sign *= _sgn(_block_degree(blocks[j - 1], par) * _block_degree(blocks[j], par))
            blocks[j - 1], blocks[j] = blocks[j], blocks[j - 1]
            j -= 1
    return {tuple(blocks): sign}


def bracket_words(w1, w2, par=None) -> dict:
    """[w1, w2] of left-normed words, rewritten into the left-normed basis."""
    d1, d2 = _block_degree(w1, par), _block_degree(w2, par)
    if w1[0][0] > w2[0][0]:
        out = {}
        _addmul(out, bracket_words(w2, w1, par), -_sgn((d1 + 1) * (d2 + 1)))
        return out
    if len(w2) == 1:
        return {w1 + w2: 1}
    if len(w1) == 1:
        # [x, [a,b]] = [[x,a],b] + (-1)^((|x|+1)(|a|+1)) [a,[x,b]]
        a, b = w2[:-1], w2[-1:]
        da = _block_degree(a, par)
        out = {}
        for w, c in bracket_words(w1, a, par).items():
            _addmul(out, bracket_words(w, b, par), c)
        for w, c in bracket_words(w1, b, par).items():
            _addmul(out, bracket_words(a, w, par), c * _sgn((d1 + 1) * (da + 1)))
        return out
    raise OperadError("Lie words beyond arity 3 are not supported")


def bracket_monos(m1, m2, par=None) -> dict:
    if not m1 or not m2:
        return {}
    d1, d2 = _mono_degree(m1, par), _mono_degree(m2, par)
    if len(m1) > 1:
        out = {}
        _addmul(out, bracket_monos(m2, m1, par), -_sgn((d1 + 1) * (d2 + 1)))
        return out
    if len(m2) > 1:
        # [a, b.c] = [a,b].c + (-1)^((|a|+1)|b|) b.[a,c]
        b, c = m2[:1], m2[1:]
        db = _mono_degree(b, par)
        out = {}
        for m, v in bracket_monos(m1, b, par).items():
            for mm, vv in prod_monos(m, c, par).items():
                _addmul(out, {mm: v * vv}, 1)
        for m, v in bracket_monos(m1, c, par).items():
            for mm, vv in prod_monos(b, m, par).items():
                _addmul(out, {mm: v * vv * _sgn((d1 + 1) * db)}, 1)
        return out
    out = {}
    for w, v in bracket_words(m1[0], m2[0], par).items():
        _addmul(out, {(w,): v}, 1)
    return out


def delta_block(w, par=None) -> dict:
    """D on one Lie word: D[u,x] = [Du,x] - (-1)^|u| [u,Dx]."""
    if len(w) == 1:
        v, d = w[0]
        return {} if d else {((v, 1),): 1}
    u, (v, d) = w[:-1], w[-1]
    du = _block_degree(u, par)
    out = {}
    for wu, c in delta_block(u, par).items():
        out[wu + ((v, d),)] = out.get(wu + ((v, d),), 0) + c
    if not d:
        key = u + ((v, 1),)
        out[key] = out.get(key, 0) - _sgn(du)
    return {k: v for k, v in out.items() if v}


def delta_mono(m, par=None) -> dict:
    if not m:
        return {}
    if len(m) == 1:
        return {(w,): c for w, c in delta_block(m[0], par).items()}
    a, rest = m[:1], m[1:]
    da = _mono_degree(a, par)
    out = {}
    for ma, c in delta_mono(a, par).items():
        for mm, v in prod_monos(ma, rest, par).items():
            _addmul(out, {mm: c * v}, 1)
    for mr, c in delta_mono(rest, par).items():
        for mm, v in prod_monos(a, mr, par).items():
            _addmul(out, {mm: c * v * _sgn(da)}, 1)
    for mb, c in bracket_monos(a, rest, par).items():
        _addmul(out, {mb: c * _sgn(da)}, 1)
    return out


def _elem_apply(f, elem: dict, par) -> dict:
    out = {}
    for mo, c in elem.items():
        _addmul(out, f(mo, par), c)
    return out


def _elem_degree(elem: dict, par) -> int:
    degs = {_mono_degree(mo, par) % 2 for mo in elem}
    if len(degs) != 1:
        raise OperadError("inhomogeneous intermediate value")
    return degs.pop()


# -- operations as composition trees -----------------------------------------------------
# tree node: ("gen", kind, arity, grading) with kind in {prod, brack, delta, id, unit}
# or ("comp", F, i, G, arity, grading) or ("perm", sigma, F, arity, grading);
# sigma maps argument position (0-based) to the index into the supplied args.

_GEN = {
    "prod": (2, 0),
    "brack": (2, 1),
    "delta": (1, 1),
    "id": (1, 0),
    "unit": (0, 0),
}


def _gen_node(kind):
    a, g = _GEN[kind]
    return ("gen", kind, a, g)


def _comp_node(f, i, g):
    return ("comp", f, i, g, f[-2] + g[-2] - 1, f[-1] + g[-1])


def _perm_node(sigma, f):
    return ("perm", tuple(sigma), f, f[-2], f[-1])


def _eval_tree(tree, args: list, par: dict) -> dict:
    kind = tree[0]
    if kind == "gen":
        what = tree[1]
        if what == "unit":
            return {(): 1}
        if what == "id":
            return dict(args[0])
        if what == "delta":
            return _elem_apply(delta_mono, args[0], par)
        out = {}
        op = prod_monos if what == "prod" else bracket_monos
        # the operadic bracket is the second-order deviation of D, which is
        # (-1)^|a| [a,b] in the classical convention the rewriting uses
        sign = 1
        if what == "brack" and _elem_degree(args[0], par) % 2:
            sign = -1
        for m1, c1 in args[0].items():
            for m2, c2 in args[1].items():
                _addmul(out, op(m1, m2, par), sign * c1 * c2)
        return out
    if kind == "perm":
        sigma = tree[1]
        degs = [_elem_degree(a, par) for a in args]
        sign = 1
        for t in range(len(sigma)):
            for s in range(t + 1, len(sigma)):
                if sigma[t] > sigma[s]:
                    sign *= _sgn(degs[sigma[t]] * degs[sigma[s]])
        return {
            mo: sign * c
            for mo, c in _eval_tree(tree[2], [args[j] for j in sigma], par).items()
        }
    _, f, i, g, _, _ = tree
    ga = g[-2]
    inner = _eval_tree(g, args[i - 1 : i - 1 + ga], par)
    if not inner:
        return {}
    sign = 1
    if g[-1] % 2:
        for a in args[: i - 1]:
            if _elem_degree(a, par) % 2:
                sign = -sign
    val = _eval_tree(f, args[: i - 1] + [inner] + args[i - 1 + ga :], par)
    return {mo: sign * c for mo, c in val.items()} if sign == -1 else val


def _basis_tree(mono):
    """Composition tree realizing a basis monomial as an operation.

    The monomial is relabeled into appearance order, its undecorated
    skeleton assembled from the product and bracket generators, deltas
    composed in slot-descending order, and the appearance permutation
    wrapped around the whole thing.
    """
    if not mono:
        return _gen_node("unit")
    appearance = [v for block in mono for v, _ in block]
    pos = {v: t for t, v in enumerate(appearance)}
    eps = [d for block in mono for _, d in block]
    tree = None
    offset = 0
    for block in mono:
        r = len(block)
        btree = _gen_node("id")
        for _ in range(r - 1):
            btree = _comp_node(_gen_node("brack"), 1, btree)
        if tree is None:
            tree = btree
        else:
            tree = _comp_node(_comp_node(_gen_node("prod"), 1, tree), offset + 1, btree)
        offset += r
    for slot in range(len(appearance), 0, -1):
        if eps[slot - 1]:
            tree = _comp_node(tree, slot, _gen_node("delta"))
    # position t of the skeleton receives original strand appearance[t]
    sigma = [pos[v] for v in sorted(appearance)]
    inv = [0] * len(sigma)
    for v_idx, p in enumerate(sigma):
        inv[p] = v_idx
    return _perm_node(inv, tree)


def _strand_elem(label: int) -> dict:
    return {(((label, 0),),): 1}


@lru_cache(maxsize=None)
def _basis_selfcheck(k: int):
    """Evaluation signs of each basis tree on pure strands, per parity profile.

    Returns {parity profile: {monomial: +-1}}.
    """
    out = {}
    for prof in iproduct((0, 1), repeat=k):
        par = {v + 1: prof[v] for v in range(k)}
        signs = {}
        for mono in basis_monomials(k):
            val = _eval_tree(_basis_tree(mono), [_strand_elem(v + 1) for v in range(k)], par)
            if len(val) != 1 or mono not in val or val[mono] not in (1, -1):
                raise OperadError(f"basis operation for {_mono_name(mono)} is degenerate")
            signs[mono] = val[mono]
        out[prof] = signs
    return out


def compose_monos(x_mono, l: int, i: int, y_mono, m: int) -> dict:
    """Structure constants of x o_i y, cross-checked over parity profiles."""
    k = l + m - 1
    xt, yt = _basis_tree(x_mono), _basis_tree(y_mono)
    ydeg = _mono_degree(y_mono)
    checks = _basis_selfcheck(k)
    result = None
    for prof, signs in checks.items():
        par = {v + 1: prof[v] for v in range(k)}
        strands = [_strand_elem(v + 1) for v in range(k)]
        inner = _eval_tree(yt, strands[i - 1 : i - 1 + m], par)
        sign = 1
        if ydeg % 2:
            for a in strands[: i - 1]:
                if _elem_degree(a, par) % 2:
                    sign = -sign
        if not inner:
            val = {}
        else:
            val = _eval_tree(xt, strands[: i - 1] + [inner] + strands[i - 1 + m :], par)
        expansion = {mo: sign * c * signs[mo] for mo, c in val.items() if c}
        if result is None:
            result = expansion
        elif result != expansion:
            raise OperadError(
                f"inconsistent composition {_mono_name(x_mono)} o_{i} {_mono_name(y_mono)}"
            )
    return result


# -- operad assembly ----------------------------------------------------------------------


def _build_spec_without_tau() -> OperadSpec:
    components = {}
    name_to_mono = {}
    for k in range(MAX_ARITY + 1):
        gens = []
        for mono in basis_monomials(k):
            name = _mono_name(mono)
            gens.append(Generator(k, name, _mono_degree(mono)))
            name_to_mono[(k, name)] = mono
        components[k] = sorted(gens, key=lambda g: g.name)

    def compose_fn(xg: Generator, i: int, yg: Generator) -> OperadElement:
        l, m = xg.arity, yg.arity
        res = compose_monos(name_to_mono[(l, xg.name)], l, i, name_to_mono[(m, yg.name)], m)
        terms = {_mono_name(mo): c for mo, c in res.items() if c}
        return OperadElement(l + m - 1, terms)

    return OperadSpec(
        name="bvlow",
        components=components,
        identity=OperadElement.basis(1, "x1"),
        unit=OperadElement.basis(0, "1"),
        multiplication=OperadElement.basis(2, "x1.x2"),
        arity_cap=MAX_ARITY,
        compose_fn=compose_fn,
        ring="Z",
        metadata={"provenance": "derived data, validated"},
    )


# -- cyclic structure: exact constraint solving --------------------------------------------


class _TauSolver:
    """Solve tau_k given all lower taus.

    T is parametrized as T(v) = T0 v + sum_j alpha_j(v) t_j, where T0 is
    pinned on the span of compositions with fully known right-hand sides and
    the t_j are unknown columns over a complement basis.  The remaining
    compatibility relations are linear in the t_j and solved exactly; the
    order condition tau^(k+1) = id selects among leftover branches.
    """

    def __init__(self, spec: OperadSpec, k: int, taus: dict, eps: int):
        self.spec = spec
        self.k = k
        self.taus = taus
        self.eps = eps  # branch sign for tau_1 on the delta generator
        self.n = spec.dim(k)
        self.gens = spec.generators(k)

    def tau_lower(self, arity: int, el: OperadElement) -> OperadElement:
        vec = self.spec.to_vector(el)
        return self.spec.from_vector(arity, self.taus[arity].matvec(vec))

    # -- constraint enumeration ---------------------------------------------------

    def known_pairs(self):
        """(u, w) with the axiom forcing T u = w outright."""
        spec, k = self.spec, self.k
        pairs = []
        if k == 0:
            e = spec.to_vector(spec.unit)
            pairs.append((e, e))
        if k == 1:
            idv = spec.to_vector(spec.identity)
            pairs.append((idv, idv))
            # branch choice: tau_1(delta generator) = eps * delta generator
            for gen in self.gens:
                if gen.grading == 1:
                    v = spec.to_vector(OperadElement.basis(1, gen.name))
                    pairs.append((v, [self.eps * x for x in v]))
        if k == 2:
            mu = spec.to_vector(spec.multiplication)
            pairs.append((mu, mu))
        for l in range(1, k + 1):
            m = k + 1 - l
            if m < 1 or m > MAX_ARITY or l > MAX_ARITY:
                continue
            if l not in self.taus or m not in self.taus:
                continue  # handled as relations
            for xgen in spec.generators(l):
                x = OperadElement.basis(l, xgen.name)
                tx = self.tau_lower(l, x)
                for ygen in spec.generators(m):
                    y = OperadElement.basis(m, ygen.name)
                    for i in range(2, l + 1):
                        u = spec.to_vector(spec.compose(x, i, y))
                        w = spec.to_vector(spec.compose(tx, i - 1, y))
                        pairs.append((u, w))
                    ty = self.tau_lower(m, y)
                    s = _sgn(xgen.grading * ygen.grading)
                    u = spec.to_vector(spec.compose(x, 1, y))
                    w = spec.to_vector(spec.compose(ty, m, tx))
                    pairs.append((u, [s * v for v in w]))
        return pairs

    def relation_constraints(self):
        """(u, weight, M, x_idx): T u == weight * M @ (T e_x), arity-k x."""
        spec, k = self.spec, self.k
        out = []
        for l in range(1, k + 2):
            m = k + 1 - l
            if m < 0 or m > MAX_ARITY or l > MAX_ARITY:
                continue
            if l in self.taus and m in self.taus:
                continue  # already covered by known_pairs
            if l == k and m >= 1:
                for ygen in spec.generators(m):
                    y = OperadElement.basis(m, ygen.name)
                    for i in range(2, l + 1):
                        M = self._matrix_insert_right(i - 1, y)
                        for xi, xgen in enumerate(spec.generators(l)):
                            u = spec.to_vector(
                                spec.compose(OperadElement.basis(l, xgen.name), i, y)
                            )
                            out.append((u, 1, M, xi))
                    if m in self.taus:
                        ty = self.tau_lower(m, y)
                        M = self._matrix_left_compose(ty)
                        for xi, xgen in enumerate(spec.generators(l)):
                            u = spec.to_vector(
                                spec.compose(OperadElement.basis(l, xgen.name), 1, y)
                            )
                            out.append((u, _sgn(xgen.grading * ygen.grading), M, xi))
            if m == k and l in self.taus and l != k:
                for xgen in spec.generators(l):
                    x = OperadElement.basis(l, xgen.name)
                    tx = self.tau_lower(l, x)
                    M = self._matrix_insert_right(m, tx, source_arity=m)
                    for yi, ygen in enumerate(spec.generators(m)):
                        u = spec.to_vector(
                            spec.compose(x, 1, OperadElement.basis(m, ygen.name))
                        )
                        out.append((u, _sgn(xgen.grading * ygen.grading), M, yi))
        return out

    def degeneracy_constraints(self):
        """(M, x_idx, w): M @ (T e_x) == w, from tau_(k-1)(x o_i e) = tau_k(x) o_(i-1) e."""
        spec, k = self.spec, self.k
        out = []
        if k < 2 or (k - 1) not in self.taus:
            return out
        e = spec.unit
        for i in range(2, k + 1):
            M = self._matrix_insert_right(i - 1, e, out_arity=k - 1)
            for xi, xgen in enumerate(spec.generators(k)):
                x = OperadElement.basis(k, xgen.name)
                w = spec.to_vector(self.tau_lower(k - 1, spec.compose(x, i, e)))
                out.append((M, xi, w))
        return out

    def _matrix_insert_right(self, i: int, y: OperadElement, out_arity=None, source_arity=None):
        """Matrix of v -> v o_i y over the arity-(source) basis."""
        spec = self.spec
        src = self.k if source_arity is None else source_arity
        tgt = spec.dim(out_arity if out_arity is not None else src + y.arity - 1)
        cols = []
        for gen in spec.generators(src):
            el = spec.compose(OperadElement.basis(src, gen.name), i, y)
            cols.append(spec.to_vector(el))
        return ExactMatrix.from_cols(cols, rows=tgt)

    def _matrix_left_compose(self, w: OperadElement):
        """Matrix of v -> w o_1 v over the arity-k basis, arity(w) = 1."""
        spec = self.spec
        cols = []
        for gen in spec.generators(self.k):
            el = spec.compose(w, 1, OperadElement.basis(self.k, gen.name))
            cols.append(spec.to_vector(el))
        return ExactMatrix.from_cols(cols, rows=spec.dim(self.k))

    # -- solve ----------------------------------------------------------------------

    def solve(self):
        n = self.n
        pairs = self.known_pairs()
        # greedy independent spanning set among the u's
        sel_u, sel_w = [], []
        for u, w in pairs:
            cand = sel_u + [u]
            if matrix_rank(ExactMatrix.from_cols(cand, rows=n)) == len(cand):
                sel_u.append(u)
                sel_w.append(w)
        r = len(sel_u)
        # complement: standard basis vectors completing the span
        comp = []
        for j in range(n):
            if r + len(comp) == n:
                break
            e = [1 if i == j else 0 for i in range(n)]
            Mtest = ExactMatrix.from_cols(sel_u + comp + [e], rows=n)
            if matrix_rank(Mtest) == r + len(comp) + 1:
                comp.append(e)
        p = len(comp)
        B = ExactMatrix.from_cols(sel_u + comp, rows=n)

        def coords(v):
            c = solve_in_image(B, v)
            if c is None:
                raise OperadError("basis completion failed")
            return c

        comp_grading = [self.gens[e.index(1)].grading for e in comp]
        # unknown slots: (j, row) with matching grading; all others are zero
        slots = [
            (j, row)
            for j in range(p)
            for row in range(n)
            if self.gens[row].grading == comp_grading[j]
        ]
        slot_pos = {s: i for i, s in enumerate(slots)}

        def t_of_vec(v):
            """T v as (known vector, per-row sparse unknown combination)."""
            c = coords(v)
            known = [Fraction(0)] * n
            lin = [dict() for _ in range(n)]
            for idx in range(r):
                if c[idx]:
                    for row in range(n):
                        known[row] += Fraction(c[idx]) * sel_w[idx][row]
            for j in range(p):
                cj = c[r + j]
                if cj:
                    for row in range(n):
                        s = slot_pos.get((j, row))
                        if s is not None:
                            lin[row][s] = lin[row].get(s, 0) + Fraction(cj)
            return known, lin

        rows, rhs = [], []

        def add_rows(known_l, lin_l, known_r, lin_r):
            for row in range(len(known_l)):
                eq = dict(lin_l[row])
                for s, v in lin_r[row].items():
                    nv = eq.get(s, 0) - v
                    if nv:
                        eq[s] = nv
                    else:
                        eq.pop(s, None)
                b = known_r[row] - known_l[row]
                if eq or b:
                    rows.append(eq)
                    rhs.append(b)

        def apply_M(M, known, lin):
            kn = [Fraction(0)] * M.rows
            ln = [dict() for _ in range(M.rows)]
            for (i2, j2), v in M.entries.items():
                if known[j2]:
                    kn[i2] += v * known[j2]
                for s, c in lin[j2].items():
                    ln[i2][s] = ln[i2].get(s, 0) + v * c
            for i2 in range(M.rows):
                ln[i2] = {s: c for s, c in ln[i2].items() if c}
            return kn, ln

        for u, weight, M, x_idx in self.relation_constraints():
            kl, ll = t_of_vec(u)
            e_x = [1 if i == x_idx else 0 for i in range(n)]
            kx, lx = t_of_vec(e_x)
            km, lm = apply_M(M, kx, lx)
            if weight != 1:
                km = [weight * v for v in km]
                lm = [{s: weight * c for s, c in d.items()} for d in lm]
            add_rows(kl, ll, km, lm)
        for M, x_idx, w in self.degeneracy_constraints():
            e_x = [1 if i == x_idx else 0 for i in range(n)]
            kx, lx = t_of_vec(e_x)
            km, lm = apply_M(M, kx, lx)
            add_rows(km, lm, [Fraction(v) for v in w], [dict() for _ in range(M.rows)])

        seen = set()
        urows, urhs = [], []
        for eq, b in zip(rows, rhs):
            key = (tuple(sorted(eq.items())), b)
            if key in seen:
                continue
            seen.add(key)
            urows.append(eq)
            urhs.append(b)
        A = ExactMatrix(
            len(urows), len(slots),
            {(i, s): v for i, eq in enumerate(urows) for s, v in eq.items()},
        )
        sol = solve_in_image(A, urhs)
        if sol is None:
            return None
        null = kernel_basis(A)
        if len(null) > 6:
            return None
        candidates = [list(sol)]
        for combo in iproduct((-1, 0, 1), repeat=len(null)):
            if not any(combo):
                continue
            cand = list(sol)
            for c, vec in zip(combo, null):
                for j, v in enumerate(vec):
                    cand[j] += c * v
            candidates.append(cand)

        ident = ExactMatrix.identity(n)
        for cand in candidates:
            T = self._assemble(cand, sel_w, slot_pos, B, r, p)
            if T is None:
                continue
            power = ident
            for _ in range(self.k + 1):
                power = T @ power
            if power == ident:
                return T
        return None

    def _assemble(self, cand, sel_w, slot_pos, B, r, p):
        n = self.n
        cols = []
        for j in range(n):
            e = [1 if i == j else 0 for i in range(n)]
            c = solve_in_image(B, e)
            col = [Fraction(0)] * n
            for idx in range(r):
                if c[idx]:
                    for row in range(n):
                        col[row] += Fraction(c[idx]) * sel_w[idx][row]
            for jj in range(p):
                if c[r + jj]:
                    for row in range(n):
                        s = slot_pos.get((jj, row))
                        if s is not None:
                            col[row] += Fraction(c[r + jj]) * cand[s]
            cols.append(col)
        entries = {}
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                if v:
                    if v.denominator != 1:
                        return None  # integral tables only
                    entries[(i, j)] = int(v)
        return ExactMatrix(n, n, entries)


@lru_cache(maxsize=1)
def builtin_bv_lowarity() -> OperadSpec:
    """The arity-<=3 framed-disks homology operad, validator-gated.

    Raises OperadError (built-in unavailable) if the cyclic structure cannot
    be solved or any validator fails.
    """
    from .operad import validate_cyclic, validate_operad

    spec = _build_spec_without_tau()
    ranks = [spec.dim(k) for k in range(MAX_ARITY + 1)]
    if ranks != [1, 2, 8, 48]:
        raise OperadError(f"bvlow unavailable: unexpected component ranks {ranks}")
    rep = validate_operad(spec, max_arity=MAX_ARITY)
    if not rep.ok:
        fails = "; ".join(c.name for c in rep.failures())
        raise OperadError(f"bvlow unavailable: operad axioms fail ({fails})")

    spec_tau = None
    for eps in (1, -1):
        taus = {}
        ok = True
        for k in range(MAX_ARITY + 1):
            T = _TauSolver(spec, k, taus, eps).solve()
            if T is None:
                ok = False
                break
            taus[k] = T
        if not ok:
            continue
        cand = OperadSpec(
            name=spec.name,
            components=spec.components,
            identity=spec.identity,
            unit=spec.unit,
            multiplication=spec.multiplication,
            arity_cap=spec.arity_cap,
            compose_table=spec._table,
            compose_fn=spec._compose_fn,
            tau=taus,
            ring=spec.ring,
            metadata=spec.metadata,
        )
        crep = validate_cyclic(cand, max_arity=MAX_ARITY)
        if crep.ok:
            spec_tau = cand
            break
    if spec_tau is None:
        raise OperadError("bvlow unavailable: no consistent cyclic structure found")
    return spec_tau
