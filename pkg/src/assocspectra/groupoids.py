"""Finite p-ary groupoids: operation tables, term functions, and spectra.

Term functions are tabulated densely with numpy; subterm tables are shared
across the bracketings of a level, and a node's table is assembled from its
children's tables by outer indexing into the operation table rather than by
re-walking trees.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, SchemaError
from .insertion import _level_rank, _level_tuples, catalan, from_tuple, to_tuple
from .spectra import Partition, SpectrumPrefix, verify_closed
from .terms import (
    Bracketing,
    enumerate_bracketings,
    left_right_depth,
    node,
    render_bracketing,
)

DEFAULT_MAX_CELLS = 2 * 10**8


class Groupoid:
    """A finite carrier with one p-ary operation stored as a flat table.

    The flat index of ``(a_1, ..., a_p)`` is ``a_1*size**(p-1) + ... + a_p``.
    Names are cosmetic and do not take part in equality.
    """

    __slots__ = ("arity", "size", "table", "names", "_array")

    def __init__(self, arity: int, size: int, table, names=None):
        if not isinstance(arity, int) or isinstance(arity, bool) or arity < 2:
            raise ValueError(f"arity must be an integer >= 2, got {arity!r}")
        if not isinstance(size, int) or isinstance(size, bool) or size < 1:
            raise ValueError(f"carrier size must be a positive integer, got {size!r}")
        table = tuple(int(e) for e in table)
        if len(table) != size ** arity:
            raise ValueError(
                f"table has {len(table)} entries, expected {size}^{arity} = {size ** arity}")
        for e in table:
            if not 0 <= e < size:
                raise ValueError(f"table entry {e} outside the carrier 0..{size - 1}")
        if names is not None:
            names = tuple(str(nm) for nm in names)
            if len(names) != size:
                raise ValueError(f"{len(names)} names for {size} elements")
        self.arity = arity
        self.size = size
        self.table = table
        self.names = names
        array = np.array(table, dtype=np.int64).reshape((size,) * arity)
        array.setflags(write=False)
        self._array = array

    def apply(self, *args: int) -> int:
        """Operation value at ``args``."""
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        idx = 0
        for a in args:
            if not 0 <= a < self.size:
                raise ValueError(f"element {a!r} outside the carrier 0..{self.size - 1}")
            idx = idx * self.size + a
        return self.table[idx]

    def name_of(self, element: int) -> str:
        return self.names[element] if self.names else str(element)

    def __eq__(self, other):
        if not isinstance(other, Groupoid):
            return NotImplemented
        return (self.arity, self.size, self.table) == (other.arity, other.size, other.table)

    def __repr__(self):
        return f"Groupoid(p={self.arity}, size={self.size})"


_DOC_KEYS = {"p", "size", "table", "names"}


def load_groupoid(doc) -> Groupoid:
    """Validate a parsed groupoid document ``{"p", "size", "table", "names"?}``."""
    if not isinstance(doc, Mapping):
        raise SchemaError("groupoid document must be a JSON object")
    unknown = set(doc) - _DOC_KEYS
    if unknown:
        raise SchemaError(f"unknown keys in groupoid document: {sorted(unknown)}")
    for key in ("p", "size", "table"):
        if key not in doc:
            raise SchemaError(f"groupoid document misses required key {key!r}")
    p, size, table = doc["p"], doc["size"], doc["table"]
    if not isinstance(p, int) or isinstance(p, bool) or p < 2:
        raise SchemaError(f"'p' must be an integer >= 2, got {p!r}")
    if not isinstance(size, int) or isinstance(size, bool) or size < 1:
        raise SchemaError(f"'size' must be a positive integer, got {size!r}")
    if not isinstance(table, (list, tuple)):
        raise SchemaError("'table' must be an array of integers")
    if len(table) != size ** p:
        raise SchemaError(f"'table' has {len(table)} entries, expected size^p = {size ** p}")
    for e in table:
        if not isinstance(e, int) or isinstance(e, bool) or not 0 <= e < size:
            raise SchemaError(f"table entry {e!r} outside the carrier 0..{size - 1}")
    names = doc.get("names")
    if names is not None:
        if (not isinstance(names, (list, tuple)) or len(names) != size
                or not all(isinstance(nm, str) for nm in names)):
            raise SchemaError("'names' must list one string per element")
    return Groupoid(p, size, table, names)


def dump_groupoid(g: Groupoid) -> dict:
    """Document form of ``g``; inverse of :func:`load_groupoid`."""
    doc = {"p": g.arity, "size": g.size, "table": list(g.table)}
    if g.names:
        doc["names"] = list(g.names)
    return doc


def eval_term(g: Groupoid, t: Bracketing, args) -> int:
    """Evaluate ``t`` with its variables bound to ``args``, left to right."""
    if t.arity != g.arity:
        raise ValueError(f"bracketing arity {t.arity} does not match groupoid arity {g.arity}")
    args = tuple(args)
    if len(args) != t.length:
        raise ValueError(f"expected {t.length} arguments, got {len(args)}")

    def rec(s: Bracketing, offset: int) -> int:
        if s.is_leaf:
            a = args[offset]
            if not 0 <= a < g.size:
                raise ValueError(f"element {a!r} outside the carrier 0..{g.size - 1}")
            return a
        vals = []
        for c in s.children:
            vals.append(rec(c, offset))
            offset += c.length
        return g.apply(*vals)

    return rec(t, 0)


class TermFunction:
    """Dense value table of a bracketing interpreted in a groupoid.

    Flat indexing follows the groupoid convention: the first variable is the
    most significant base-``size`` digit.  Two term functions are equal
    exactly when their tables are identical.
    """

    __slots__ = ("level", "arity", "size", "values")

    def __init__(self, level: int, arity: int, size: int, values):
        values = np.asarray(values)
        values.setflags(write=False)
        self.level = level
        self.arity = arity
        self.size = size
        self.values = values

    def __call__(self, *args: int) -> int:
        if len(args) != (self.arity - 1) * self.level + 1:
            raise ValueError(f"expected {(self.arity - 1) * self.level + 1} arguments")
        idx = 0
        for a in args:
            if not 0 <= a < self.size:
                raise ValueError(f"element {a!r} outside the carrier 0..{self.size - 1}")
            idx = idx * self.size + a
        return int(self.values[idx])

    def __eq__(self, other):
        if not isinstance(other, TermFunction):
            return NotImplemented
        return ((self.level, self.arity, self.size) == (other.level, other.arity, other.size)
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"TermFunction(level={self.level}, p={self.arity}, size={self.size})"


class _Tabulator:
    """Bottom-up term tables over one groupoid; shared subterms evaluated once."""

    def __init__(self, g: Groupoid):
        dtype = np.min_scalar_type(g.size - 1)
        self.op = g._array.astype(dtype)
        self.leaf_values = np.arange(g.size, dtype=dtype)
        self.memo: dict[Bracketing, np.ndarray] = {}

    def values(self, t: Bracketing) -> np.ndarray:
        got = self.memo.get(t)
        if got is None:
            if t.is_leaf:
                got = self.leaf_values
            else:
                got = self.op[np.ix_(*(self.values(c) for c in t.children))].ravel()
            self.memo[t] = got
        return got


def term_function(g: Groupoid, t: Bracketing, *, max_cells: int | None = None) -> TermFunction:
    """Tabulate the function induced by ``t`` over all argument tuples."""
    if t.arity != g.arity:
        raise ValueError(f"bracketing arity {t.arity} does not match groupoid arity {g.arity}")
    cap = DEFAULT_MAX_CELLS if max_cells is None else max_cells
    cells = g.size ** t.length
    if cells > cap:
        raise CapExceededError(
            f"term table needs {cells} cells, more than the cap of {cap}",
            required=cells, limit=cap)
    return TermFunction(t.occ, g.arity, g.size, _Tabulator(g).values(t))


def fine_level(g: Groupoid, n: int, *, max_cells: int | None = None,
               max_count: int | None = None) -> Partition:
    """Partition level ``n`` by equality of induced term functions."""
    cap = DEFAULT_MAX_CELLS if max_cells is None else max_cells
    length = (g.arity - 1) * n + 1
    cells = g.size ** length * catalan(n, g.arity)
    if cells > cap:
        raise CapExceededError(
            f"level {n} needs {cells} table cells, more than the cap of {cap}",
            required=cells, limit=cap, level=n)
    trees = enumerate_bracketings(n, g.arity, max_count=max_count)
    tab = _Tabulator(g)
    groups: dict[bytes, int] = {}
    labels = [groups.setdefault(tab.values(t).tobytes(), len(groups)) for t in trees]
    return Partition(n, g.arity, labels)


def assoc_spectrum(g: Groupoid, max_n: int, *, max_cells: int | None = None,
                   max_count: int | None = None, partial: bool = False) -> list[int]:
    """Class counts of :func:`fine_level` for the levels 0..max_n.

    A cap hit raises with the completed counts attached, or returns them
    directly when ``partial`` is set.
    """
    counts: list[int] = []
    for i in range(max_n + 1):
        try:
            counts.append(fine_level(g, i, max_cells=max_cells, max_count=max_count).num_classes)
        except CapExceededError as exc:
            if partial:
                return counts
            exc.partial = counts
            raise
    return counts


def is_associative(g: Groupoid) -> bool:
    """Whether all level-2 bracketings induce one and the same term function."""
    trees = enumerate_bracketings(2, g.arity)
    tab = _Tabulator(g)
    want = tab.values(trees[0]).tobytes()
    return all(tab.values(t).tobytes() == want for t in trees[1:])


def direct_product(g: Groupoid, h: Groupoid, *, max_cells: int | None = None) -> Groupoid:
    """Componentwise product; the pair ``(a, b)`` is encoded as ``a*|h| + b``."""
    if g.arity != h.arity:
        raise ValueError(f"arity mismatch: {g.arity} vs {h.arity}")
    p = g.arity
    size = g.size * h.size
    cap = DEFAULT_MAX_CELLS if max_cells is None else max_cells
    if size ** p > cap:
        raise CapExceededError(
            f"product table needs {size ** p} cells, more than the cap of {cap}",
            required=size ** p, limit=cap)
    table = []
    for combo in itertools.product(range(size), repeat=p):
        a = g.apply(*(c // h.size for c in combo))
        b = h.apply(*(c % h.size for c in combo))
        table.append(a * h.size + b)
    names = None
    if g.names or h.names:
        names = [f"({g.name_of(a)},{h.name_of(b)})"
                 for a in range(g.size) for b in range(h.size)]
    return Groupoid(p, size, table, names)


def quotient_from_spectrum(sigma: SpectrumPrefix, cut: int) -> Groupoid:
    """Finite groupoid on the classes below ``cut`` plus one absorbing element.

    Requires a closed prefix that is fully merged at every level from
    ``cut`` to its horizon.  Carrier elements are the classes ordered by
    (level, class id), followed by the absorbing element ``*``; products
    whose occurrence number reaches the cut collapse to ``*``.
    """
    if cut < 2:
        raise ValueError(f"cut level must be at least 2, got {cut}")
    if sigma.horizon < cut:
        raise ValueError(f"prefix horizon {sigma.horizon} is below the cut {cut}")
    p = sigma.arity
    for m in range(cut, sigma.horizon + 1):
        if sigma.partitions[m].num_classes != 1:
            raise ValueError(f"level {m} must be fully merged from the cut on")
    report = verify_closed(sigma)
    if not report.closed:
        raise ValueError(f"prefix is not closed (violation at level {report.level})")
    representatives: list[Bracketing] = []
    names: list[str] = []
    element: dict[tuple[int, int], int] = {}
    for m in range(cut):
        pi = sigma.partitions[m]
        uni = _level_tuples(m, p)
        firsts: dict[int, int] = {}
        for r, c in enumerate(pi.class_of):
            firsts.setdefault(c, r)
        for c in range(pi.num_classes):
            element[(m, c)] = len(representatives)
            rep = from_tuple(uni[firsts[c]], p)
            representatives.append(rep)
            names.append(f"[{render_bracketing(rep)}]")
    star = len(representatives)
    names.append("*")
    size = star + 1
    table = []
    for combo in itertools.product(range(size), repeat=p):
        if star in combo:
            table.append(star)
            continue
        t = node(*(representatives[e] for e in combo))
        if t.occ >= cut:
            table.append(star)
        else:
            r = _level_rank(t.occ, p)[to_tuple(t)]
            table.append(element[(t.occ, sigma.partitions[t.occ].class_of[r])])
    return Groupoid(p, size, table, names)


# ---------------------------------------------------------------------------
# the gallery

def _egg4() -> Groupoid:
    rows = (
        (0, 0, 0, 0),
        (0, 0, 0, 1),
        (0, 0, 1, 2),
        (0, 1, 2, 2),
    )
    return Groupoid(2, 4, [e for row in rows for e in row])


def _egg7() -> Groupoid:
    base = _egg4()
    # nonzero base elements are doubled: 2k-1 wears a hat, 2k a tilde;
    # numeric parts multiply in the base, a hat-hat pair yields a tilde,
    # every other pair a hat, and 0 stays absorbing
    def num(e: int) -> int:
        return (e + 1) // 2

    def wears_tilde(e: int) -> bool:
        return e > 0 and e % 2 == 0

    table = []
    for a in range(7):
        for b in range(7):
            m = base.apply(num(a), num(b))
            if m == 0:
                table.append(0)
            elif not wears_tilde(a) and not wears_tilde(b):
                table.append(2 * m)
            else:
                table.append(2 * m - 1)
    return Groupoid(2, 7, table, names=("0", "1^", "1~", "2^", "2~", "3^", "3~"))


def _polyk(k: int) -> Groupoid:
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValueError(f"polyk needs an integer degree k >= 1, got {k!r}")
    size = k + 2
    table = []
    for x in range(size):
        for y in range(size):
            if x == 0:
                table.append(0)
            elif y == 0:
                table.append(1)
            else:
                table.append(min(x + 1, k + 1))
    return Groupoid(2, size, table)


def _sheffer() -> Groupoid:
    # hat = 0, tilde = 1; hat*hat = tilde, every other pair gives hat
    return Groupoid(2, 2, (1, 0, 0, 0), names=("hat", "tilde"))


def _const_assoc(m: int) -> Groupoid:
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ValueError(f"const_assoc needs a positive carrier size, got {m!r}")
    return Groupoid(2, m, [min(x + y, m - 1) for x in range(m) for y in range(m)])


class TruncatedRing:
    """The binary operation ``3Y*X1 + 2Y*X2`` on Z6 polynomials truncated below ``Y**truncation``.

    Evaluation-only: the carrier has ``6**truncation`` elements and is never
    tabulated.  Elements are coefficient tuples, lowest degree first.
    """

    arity = 2

    def __init__(self, truncation: int = 16):
        if not isinstance(truncation, int) or isinstance(truncation, bool) or truncation < 1:
            raise ValueError(f"truncation degree must be a positive integer, got {truncation!r}")
        self.truncation = truncation

    def element(self, coeffs) -> tuple[int, ...]:
        """Normalize ``coeffs``: reduce mod 6, truncate, pad with zeros."""
        coeffs = tuple(int(c) % 6 for c in coeffs)[:self.truncation]
        return coeffs + (0,) * (self.truncation - len(coeffs))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.truncation

    def monomial(self, degree: int, coeff: int = 1) -> tuple[int, ...]:
        if not 0 <= degree < self.truncation:
            raise ValueError(f"degree {degree} outside 0..{self.truncation - 1}")
        out = [0] * self.truncation
        out[degree] = coeff % 6
        return tuple(out)

    def apply(self, x1, x2) -> tuple[int, ...]:
        x1, x2 = self.element(x1), self.element(x2)
        out = [0] * self.truncation
        for d in range(1, self.truncation):
            out[d] = (3 * x1[d - 1] + 2 * x2[d - 1]) % 6
        return tuple(out)

    def eval_term(self, t: Bracketing, args) -> tuple[int, ...]:
        """Evaluate a binary bracketing over ring elements, left to right."""
        if t.arity != 2:
            raise ValueError("the truncated ring is binary")
        args = [self.element(a) for a in args]
        if len(args) != t.length:
            raise ValueError(f"expected {t.length} arguments, got {len(args)}")

        def rec(s: Bracketing, offset: int):
            if s.is_leaf:
                return args[offset]
            left = rec(s.children[0], offset)
            right = rec(s.children[1], offset + s.children[0].length)
            return self.apply(left, right)

        return rec(t, 0)

    def __repr__(self):
        return f"TruncatedRing(truncation={self.truncation})"


_GALLERY_BUILDERS = {
    "egg4": _egg4,
    "egg7": _egg7,
    "polyk": _polyk,
    "truncated_ring": TruncatedRing,
    "sheffer": _sheffer,
    "const_assoc": _const_assoc,
}

GALLERY_ENTRIES = (
    ("egg4", "4", "term-function maxima drop with each egg pair, floor 0"),
    ("egg7", "7", "tagged blow-up whose fine spectrum merges exactly the 3-egg bracketings"),
    ("polyk", "k+2", "degree-k polynomial spectrum keyed by iterated left-factor lengths"),
    ("truncated_ring", "evaluation-only", "Z6 polynomials under 3Y*X1 + 2Y*X2 below Y^N"),
    ("sheffer", "2", "separates every bracketing"),
    ("const_assoc", "m", "associative control: x*y = min(x+y, m-1)"),
)


def gallery(name: str, **params):
    """Build a gallery groupoid by name.

    ``truncated_ring`` returns the evaluation-only :class:`TruncatedRing`;
    every other entry returns a tabulated :class:`Groupoid`.
    """
    try:
        builder = _GALLERY_BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown gallery entry {name!r}; known: {', '.join(sorted(_GALLERY_BUILDERS))}"
        ) from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name!r}: {exc}") from None


# ---------------------------------------------------------------------------
# ring spot check

@dataclass(frozen=True)
class RingCheckReport:
    """Outcome of comparing recursive ring evaluation against the depth closed form."""

    truncation: int
    level: int
    trials: int
    bracketings: int
    mismatches: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.mismatches


def ring_closed_form_check(truncation: int, level: int, trials: int = 50, *,
                           seed: int = 0, max_count: int | None = None) -> RingCheckReport:
    """Check every level bracketing against its depth closed form on random arguments.

    Recursive evaluation uses the ring operation only; the closed form
    ``(3Y)^dl * X_first + (2Y)^dr * X_last`` uses the tree depths, so the two
    routes are independent.  Needs ``level < truncation`` so distinct depths
    stay distinguishable below the truncation.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if level < 0:
        raise ValueError(f"level must be nonnegative, got {level}")
    if level >= truncation:
        raise ValueError(f"level {level} needs a truncation degree above it, got {truncation}")
    trees = enumerate_bracketings(level, 2, max_count=max_count)
    rng = np.random.default_rng(seed)
    n_vars = level + 1
    args = rng.integers(0, 6, size=(trials, n_vars, truncation), dtype=np.int64)

    def combine(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x1)
        out[:, 1:] = (3 * x1[:, :-1] + 2 * x2[:, :-1]) % 6
        return out

    def shifted(block: np.ndarray, degree: int, coeff: int) -> np.ndarray:
        out = np.zeros_like(block)
        if degree < truncation:
            out[:, degree:] = (coeff * block[:, :truncation - degree]) % 6
        return out

    def evaluate(s: Bracketing, offset: int) -> np.ndarray:
        if s.is_leaf:
            return args[:, offset, :]
        left = evaluate(s.children[0], offset)
        right = evaluate(s.children[1], offset + s.children[0].length)
        return combine(left, right)

    mismatches = []
    for t in trees:
        got = evaluate(t, 0)
        if t.occ == 0:
            want = args[:, 0, :]
        else:
            dl, dr = left_right_depth(t)
            want = (shifted(args[:, 0, :], dl, pow(3, dl, 6))
                    + shifted(args[:, n_vars - 1, :], dr, pow(2, dr, 6))) % 6
        if not np.array_equal(got, want):
            mismatches.append(render_bracketing(t))
    return RingCheckReport(truncation, level, trials, len(trees), tuple(mismatches))
