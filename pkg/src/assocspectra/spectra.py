"""Partitions of bracketing levels, the implication operator, and named spectra.

A :class:`Partition` groups the bracketings of one level; a
:class:`SpectrumPrefix` is a finite run of such partitions, one per level
starting at 0.  The implication operator :func:`delta` pushes a partition one
level up along the occurrence-raising operators; a prefix in which each
pushed partition stays inside the next one is exactly a finite window of the
fine spectrum of some groupoid, which :func:`verify_closed` decides.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import CapExceededError, ParseError
from .insertion import (
    _level_rank,
    _level_tuples,
    beta_update,
    catalan,
    format_tuple,
    parse_tuple,
)
from .terms import (
    DEFAULT_MAX_BRACKETINGS,
    Bracketing,
    egg_pairs,
    enumerate_bracketings,
    leaf,
    left_lengths,
    node,
)


def _guarded_size(level: int, arity: int, max_count: int | None) -> int:
    cap = DEFAULT_MAX_BRACKETINGS if max_count is None else max_count
    size = catalan(level, arity)
    if size > cap:
        raise CapExceededError(
            f"level {level} holds {size} bracketings, more than the cap of {cap}",
            required=size, limit=cap, level=level)
    return size


class Partition:
    """An equivalence relation on the bracketings of one level.

    ``class_of[r]`` is the class id of the bracketing with canonical rank
    ``r``; ids run 0..num_classes-1 in order of first appearance, so two
    partitions describe the same relation exactly when they compare equal.
    """

    __slots__ = ("level", "arity", "class_of", "num_classes")

    def __init__(self, level: int, arity: int, labels: Iterable):
        labels = list(labels)
        expected = catalan(level, arity)
        if len(labels) != expected:
            raise ValueError(
                f"level {level} has {expected} bracketings, got {len(labels)} labels")
        ids: dict = {}
        class_of = []
        for lab in labels:
            cid = ids.get(lab)
            if cid is None:
                cid = ids[lab] = len(ids)
            class_of.append(cid)
        self.level = level
        self.arity = arity
        self.class_of = tuple(class_of)
        self.num_classes = len(ids)

    @classmethod
    def equality(cls, level: int, arity: int, *, max_count: int | None = None) -> "Partition":
        """Every bracketing in its own class."""
        return cls(level, arity, range(_guarded_size(level, arity, max_count)))

    @classmethod
    def full(cls, level: int, arity: int, *, max_count: int | None = None) -> "Partition":
        """One class holding the whole level."""
        return cls(level, arity, [0] * _guarded_size(level, arity, max_count))

    @classmethod
    def from_key(cls, level: int, arity: int, key: Callable, *,
                 max_count: int | None = None) -> "Partition":
        """Group the level by a key function on insertion tuples."""
        _guarded_size(level, arity, max_count)
        return cls(level, arity, [key(u) for u in _level_tuples(level, arity)])

    @property
    def size(self) -> int:
        return len(self.class_of)

    def classes(self) -> tuple[tuple[int, ...], ...]:
        """Member ranks per class id."""
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for r, c in enumerate(self.class_of):
            out[c].append(r)
        return tuple(tuple(ranks) for ranks in out)

    def _check_compatible(self, other: "Partition") -> None:
        if self.level != other.level or self.arity != other.arity:
            raise ValueError(
                f"partition on level {self.level} (p={self.arity}) is incompatible "
                f"with level {other.level} (p={other.arity})")

    def refines(self, other: "Partition") -> bool:
        """True when every class of this partition lies inside one class of ``other``."""
        self._check_compatible(other)
        return _refinement_witness(self, other) is None

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return (self.level, self.arity, self.class_of) == \
               (other.level, other.arity, other.class_of)

    def __repr__(self):
        return f"Partition(level={self.level}, p={self.arity}, classes={self.num_classes})"


def _refinement_witness(finer: Partition, coarser: Partition) -> tuple[int, int] | None:
    """First pair of ranks merged by ``finer`` but separated by ``coarser``."""
    seen: dict[int, tuple[int, int]] = {}
    for r, (cf, cc) in enumerate(zip(finer.class_of, coarser.class_of)):
        first = seen.get(cf)
        if first is None:
            seen[cf] = (r, cc)
        elif first[1] != cc:
            return first[0], r
    return None


class SpectrumPrefix:
    """Partitions of the levels 0..N, a candidate finite window of a fine spectrum."""

    __slots__ = ("arity", "partitions")

    def __init__(self, partitions: Sequence[Partition]):
        partitions = tuple(partitions)
        if not partitions:
            raise ValueError("a spectrum prefix needs at least level 0")
        arity = partitions[0].arity
        for i, pi in enumerate(partitions):
            if not isinstance(pi, Partition):
                raise TypeError(f"expected a Partition at level {i}, got {type(pi).__name__}")
            if pi.arity != arity:
                raise ValueError(f"mixed arities in prefix: {arity} and {pi.arity}")
            if pi.level != i:
                raise ValueError(f"expected level {i}, got a partition of level {pi.level}")
        self.arity = arity
        self.partitions = partitions

    @property
    def horizon(self) -> int:
        return len(self.partitions) - 1

    def __len__(self):
        return len(self.partitions)

    def __getitem__(self, level: int) -> Partition:
        return self.partitions[level]

    def __eq__(self, other):
        if not isinstance(other, SpectrumPrefix):
            return NotImplemented
        return self.partitions == other.partitions

    def __repr__(self):
        counts = ",".join(str(pi.num_classes) for pi in self.partitions)
        return f"SpectrumPrefix(p={self.arity}, classes=[{counts}])"


def build_prefix(level_fn: Callable[[int], Partition], max_n: int) -> SpectrumPrefix:
    """Assemble the levels 0..max_n from a per-level partition builder."""
    if max_n < 0:
        raise ValueError(f"horizon must be nonnegative, got {max_n}")
    return SpectrumPrefix([level_fn(n) for n in range(max_n + 1)])


# ---------------------------------------------------------------------------
# occurrence-raising operators

def gamma(t: Bracketing, i: int, p: int | None = None) -> Bracketing:
    """Wrap ``t`` as the i-th child of a fresh operation symbol, leaves elsewhere."""
    if p is None:
        p = t.arity
    elif p != t.arity:
        raise ValueError(f"arity mismatch: bracketing has arity {t.arity}, requested {p}")
    if not 1 <= i <= p:
        raise ValueError(f"child position {i} out of range 1..{p}")
    kids = [leaf(p)] * p
    kids[i - 1] = t
    return node(*kids)


def beta(t: Bracketing, i: int) -> Bracketing:
    """Replace the i-th variable of ``t`` (left to right) by a fresh operation on leaves."""
    if not 1 <= i <= t.length:
        raise ValueError(f"variable position {i} out of range 1..{t.length}")
    p = t.arity
    unit = node(*(leaf(p),) * p)

    def rec(s: Bracketing, j: int) -> Bracketing:
        if s.is_leaf:
            return unit
        kids = list(s.children)
        for idx, c in enumerate(kids):
            if j <= c.length:
                kids[idx] = rec(c, j)
                return node(*kids)
            j -= c.length
        raise AssertionError("variable position fell off the children")

    return rec(t, i)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def delta(pi: Partition) -> Partition:
    """Push a level-n partition to level n+1 along all occurrence-raising operators.

    Two level-(n+1) bracketings end up together exactly when they are
    connected through operator images of related pairs.  Images are computed
    on insertion tuples; no trees are built.  Every level-(n+1) bracketing is
    an image, which is asserted rather than assumed.
    """
    n, p = pi.level, pi.arity
    src = _level_tuples(n, p)
    dst_rank = _level_rank(n + 1, p)
    dst_size = len(dst_rank)
    uf = _UnionFind(dst_size)
    touched = bytearray(dst_size)
    n_ops = p + (p - 1) * n + 1
    for op in range(n_ops):
        first: dict[int, int] = {}
        for r, u in enumerate(src):
            if op < p:
                # wrapping as child op+1 shifts every entry by the op leading leaves
                image = (1, *(e + op for e in u))
            else:
                image = beta_update(u, op - p + 1, p)
            ir = dst_rank[image]
            touched[ir] = 1
            c = pi.class_of[r]
            anchor = first.get(c)
            if anchor is None:
                first[c] = ir
            else:
                uf.union(anchor, ir)
    if not all(touched):
        raise AssertionError(f"some level-{n + 1} bracketing is not an operator image")
    return Partition(n + 1, p, [uf.find(r) for r in range(dst_size)])


@dataclass(frozen=True)
class ClosureReport:
    """Outcome of :func:`verify_closed`.

    On failure, ``level`` is the least n whose pushed partition escapes the
    next one, and ``witness`` holds the insertion tuples of one offending
    pair at level ``level + 1``.
    """

    closed: bool
    level: int | None = None
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None


def verify_closed(sigma: SpectrumPrefix) -> ClosureReport:
    """Check that pushing each level up stays within the next partition."""
    for n in range(sigma.horizon):
        pushed = delta(sigma.partitions[n])
        witness = _refinement_witness(pushed, sigma.partitions[n + 1])
        if witness is not None:
            uni = _level_tuples(n + 1, sigma.arity)
            return ClosureReport(False, n, (uni[witness[0]], uni[witness[1]]))
    return ClosureReport(True)


def partition_meet(a: Partition, b: Partition) -> Partition:
    """Coarsest partition refining both: classwise intersection."""
    a._check_compatible(b)
    return Partition(a.level, a.arity, list(zip(a.class_of, b.class_of)))


def covers(lower: SpectrumPrefix, upper: SpectrumPrefix) -> bool:
    """Whether ``upper`` covers ``lower`` among closed prefixes ordered by inclusion.

    Both prefixes must be closed, share arity and horizon, and ``lower``
    must refine ``upper`` at every level; violations raise ``ValueError``.
    Covering holds exactly when the two differ at a single level and there
    ``upper`` merges exactly two classes of ``lower``.
    """
    if lower.arity != upper.arity:
        raise ValueError(f"arity mismatch: {lower.arity} vs {upper.arity}")
    if lower.horizon != upper.horizon:
        raise ValueError(f"horizon mismatch: {lower.horizon} vs {upper.horizon}")
    for name, prefix in (("lower", lower), ("upper", upper)):
        report = verify_closed(prefix)
        if not report.closed:
            raise ValueError(f"{name} prefix is not closed (violation at level {report.level})")
    diffs = []
    for i in range(lower.horizon + 1):
        a, b = lower.partitions[i], upper.partitions[i]
        if not a.refines(b):
            raise ValueError(f"lower prefix does not refine the upper one at level {i}")
        if a != b:
            diffs.append(i)
    if len(diffs) != 1:
        return False
    i = diffs[0]
    return lower.partitions[i].num_classes == upper.partitions[i].num_classes + 1


# ---------------------------------------------------------------------------
# named spectra

def tau(n: int, *, min_eggs: int = 3, max_count: int | None = None) -> Partition:
    """One class for the binary bracketings with at least ``min_eggs`` egg pairs,
    singletons elsewhere; the equality partition when fewer than two qualify."""
    trees = enumerate_bracketings(n, 2, max_count=max_count)
    return Partition(
        n, 2, [-1 if egg_pairs(t) >= min_eggs else r for r, t in enumerate(trees)])


def sigma_a(bits, *, max_count: int | None = None) -> SpectrumPrefix:
    """Binary prefix driven by a 0/1 string: push the previous level up on 0,
    restart at :func:`tau` on 1.  The first five bits must be 0."""
    seq = [int(b) for b in bits]
    if len(seq) < 5:
        raise ValueError(f"need at least five bits, got {len(seq)}")
    if any(b not in (0, 1) for b in seq):
        raise ValueError("bits must be 0 or 1")
    if any(seq[:5]):
        raise ValueError("the first five bits must be 0")
    parts = [Partition.full(0, 2)]
    for i in range(1, len(seq)):
        parts.append(tau(i, max_count=max_count) if seq[i] else delta(parts[-1]))
    return SpectrumPrefix(parts)


def left_factor_sigma(n: int, k: int, *, max_count: int | None = None) -> Partition:
    """Group a binary level by the lengths of the first ``k`` iterated left factors."""
    if k < 1:
        raise ValueError(f"need at least one left factor, got k={k}")
    trees = enumerate_bracketings(n, 2, max_count=max_count)
    return Partition(n, 2, [left_lengths(t, k) for t in trees])


def tail_tuple_sigma(n: int, k: int, p: int, *, max_count: int | None = None) -> Partition:
    """Group a level by the last ``k`` insertion-tuple entries; equality below level ``k``."""
    if k < 1:
        raise ValueError(f"need at least one tail entry, got k={k}")
    size = _guarded_size(n, p, max_count)
    if n < k:
        return Partition(n, p, range(size))
    return Partition(n, p, [u[n - k:] for u in _level_tuples(n, p)])


def dldr_sigma(n: int, *, max_count: int | None = None) -> Partition:
    """Group a binary level by the depths of the leftmost and rightmost variables.

    Both depths are read off the insertion tuple: entries equal to 1 feed the
    left depth, entries at their upper bound feed the right depth.
    """
    _guarded_size(n, 2, max_count)
    labels = []
    for u in _level_tuples(n, 2):
        dl = sum(1 for e in u if e == 1)
        dr = sum(1 for q, e in enumerate(u, start=1) if e == q)
        labels.append((dl, dr))
    return Partition(n, 2, labels)


def coatom_census(p: int, *, max_count: int | None = None) -> int:
    """Count the closed prefixes that are full everywhere except a 2-class level 2.

    Probes every 2-class partition of level 2 (one bracketing per child
    position, so a p-element set) at horizon 4; closure beyond the horizon is
    forced because the full partition pushes to the full partition.
    """
    if not isinstance(p, int) or isinstance(p, bool) or not 2 <= p <= 6:
        raise ValueError(f"census supported for arities 2..6, got {p!r}")
    m = catalan(2, p)
    full = {i: Partition.full(i, p, max_count=max_count) for i in (0, 1, 3, 4)}
    count = 0
    for mask in range(1, 2 ** (m - 1)):
        labels = [0] + [(mask >> (e - 1)) & 1 for e in range(1, m)]
        candidate = SpectrumPrefix(
            [full[0], full[1], Partition(2, p, labels), full[3], full[4]])
        if verify_closed(candidate).closed:
            count += 1
    return count


# ---------------------------------------------------------------------------
# text serialization

_HEADER_RE = re.compile(r"level=(\d+) p=(\d+) classes=(\d+)$")
_CLASS_RE = re.compile(r"class (\d+):\s*(.*)$")


def format_partition(pi: Partition) -> str:
    """Render a partition block: a header line, then one line per class."""
    uni = _level_tuples(pi.level, pi.arity)
    lines = [f"level={pi.level} p={pi.arity} classes={pi.num_classes}"]
    for cid, ranks in enumerate(pi.classes()):
        lines.append(f"class {cid}: " + " ".join(format_tuple(uni[r]) for r in ranks))
    return "\n".join(lines)


def parse_partition(text: str) -> Partition:
    """Inverse of :func:`format_partition`; every bracketing must appear exactly once."""
    lines = text.strip().splitlines()
    if not lines:
        raise ParseError("empty partition block")
    m = _HEADER_RE.match(lines[0].strip())
    if not m:
        raise ParseError(f"bad partition header: {lines[0]!r}")
    level, p, n_classes = (int(g) for g in m.groups())
    if p < 2:
        raise ParseError(f"arity in header must be at least 2, got {p}")
    rank = _level_rank(level, p)
    if len(lines) - 1 != n_classes:
        raise ParseError(f"header announces {n_classes} classes, found {len(lines) - 1} lines")
    labels: dict[int, int] = {}
    for expected_id, line in enumerate(lines[1:]):
        m = _CLASS_RE.match(line.strip())
        if not m:
            raise ParseError(f"bad class line: {line!r}")
        cid = int(m.group(1))
        if cid != expected_id:
            raise ParseError(f"class ids must count up from 0, got {cid}")
        members = m.group(2).split()
        if not members:
            raise ParseError(f"class {cid} has no members")
        for piece in members:
            u = parse_tuple(piece)
            r = rank.get(u)
            if r is None:
                raise ParseError(f"{piece} is not a level-{level} insertion tuple")
            if r in labels:
                raise ParseError(f"{piece} is classified twice")
            labels[r] = cid
    if len(labels) != len(rank):
        raise ParseError(
            f"{len(rank) - len(labels)} bracketings left unclassified at level {level}")
    return Partition(level, p, [labels[r] for r in range(len(rank))])


def format_spectrum_prefix(sigma: SpectrumPrefix) -> str:
    """Render a prefix as blank-line separated partition blocks."""
    return "\n\n".join(format_partition(pi) for pi in sigma.partitions)


def parse_spectrum_prefix(text: str) -> SpectrumPrefix:
    """Inverse of :func:`format_spectrum_prefix`."""
    blocks = [b for b in re.split(r"\n\s*\n", text.strip()) if b.strip()]
    if not blocks:
        raise ParseError("no partition blocks found")
    return SpectrumPrefix([parse_partition(b) for b in blocks])
