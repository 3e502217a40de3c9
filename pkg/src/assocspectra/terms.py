"""Bracketings: full p-ary trees over a single variable.

A bracketing is a term built from one p-ary operation symbol (written ``w``
in prefix notation) and one variable symbol (written ``x``).  Its occurrence
number counts operation symbols, its length counts variable symbols, and
``length == (p - 1) * occ + 1`` always holds.

Each level (all bracketings of one occurrence number) is enumerated in a
canonical order: lexicographic on prefix words with ``w`` sorting before
``x``.  This coincides with lexicographic order on insertion tuples, since
the first differing prefix symbol puts the next operation symbol after
strictly fewer variables on the ``w`` side.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb

from .errors import CapExceededError, ParseError

DEFAULT_MAX_BRACKETINGS = 10**6


class Bracketing:
    """An immutable full p-ary tree; leaves are variables, inner nodes the operation.

    Instances are interned through :func:`leaf` and :func:`node`, so
    structurally equal trees are normally the same object and enumerated
    levels share their substructure.
    """

    __slots__ = ("arity", "children", "occ", "length", "_hash", "_word")

    def __init__(self, arity: int, children: tuple["Bracketing", ...]):
        self.arity = arity
        self.children = children
        self.occ = 1 + sum(c.occ for c in children) if children else 0
        self.length = (arity - 1) * self.occ + 1
        self._hash = hash((arity, children))
        self._word = "x" if not children else None  # prefix word, filled lazily

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Bracketing):
            return NotImplemented
        return (self._hash == other._hash
                and self.arity == other.arity
                and self.children == other.children)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Bracketing(p={self.arity}, {render_bracketing(self)!r})"


def _check_arity(p) -> None:
    if not isinstance(p, int) or isinstance(p, bool) or p < 2:
        raise ValueError(f"arity must be an integer >= 2, got {p!r}")


@lru_cache(maxsize=None)
def leaf(p: int) -> Bracketing:
    """The single-variable bracketing of arity ``p``."""
    _check_arity(p)
    return Bracketing(p, ())


_node_cache: dict[tuple[Bracketing, ...], Bracketing] = {}


def node(*children: Bracketing) -> Bracketing:
    """Join ``p`` bracketings of arity ``p`` under one operation symbol."""
    p = len(children)
    if p < 2:
        raise ValueError(f"a node needs at least two children, got {p}")
    for c in children:
        if not isinstance(c, Bracketing):
            raise TypeError(f"children must be bracketings, got {type(c).__name__}")
        if c.arity != p:
            raise ValueError(f"child of arity {c.arity} cannot sit under a {p}-ary node")
    t = _node_cache.get(children)
    if t is None:
        t = _node_cache[children] = Bracketing(p, children)
    return t


def _catalan(n: int, p: int) -> int:
    # closed-form level size; the public counting API lives in the insertion module
    c, r = divmod(comb(p * n, n), (p - 1) * n + 1)
    assert r == 0
    return c


def _word_of(t: Bracketing) -> str:
    """Prefix word of ``t``, cached on the shared nodes."""
    if t._word is not None:
        return t._word
    stack = [t]
    while stack:
        s = stack[-1]
        if s._word is not None:
            stack.pop()
            continue
        missing = [c for c in s.children if c._word is None]
        if missing:
            stack.extend(missing)
        else:
            s._word = "w" + "".join(c._word for c in s.children)
            stack.pop()
    return t._word


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


@lru_cache(maxsize=None)
def _level(n: int, p: int) -> tuple[Bracketing, ...]:
    # compose from lower levels, then sort by prefix word ('w' < 'x'), which
    # is the canonical order: at the first differing symbol the 'w' side puts
    # its next operation symbol after strictly fewer variables
    if n == 0:
        return (leaf(p),)
    out = []
    for split in _compositions(n - 1, p):
        levels = [_level(m, p) for m in split]
        for kids in product(*levels):
            out.append(node(*kids))
    out.sort(key=_word_of)
    return tuple(out)


def enumerate_bracketings(n: int, p: int, *, max_count: int | None = None) -> list[Bracketing]:
    """All bracketings with occurrence number ``n``, once each, in canonical order."""
    _check_arity(p)
    if n < 0:
        raise ValueError(f"occurrence number must be nonnegative, got {n}")
    cap = DEFAULT_MAX_BRACKETINGS if max_count is None else max_count
    total = _catalan(n, p)
    if total > cap:
        raise CapExceededError(
            f"level {n} holds {total} bracketings, more than the cap of {cap}",
            required=total, limit=cap, level=n)
    return list(_level(n, p))


def parse_bracketing(text: str, p: int, format: str = "prefix") -> Bracketing:
    """Parse ``text`` as a bracketing of arity ``p``.

    Prefix notation uses ``w`` for the operation symbol and ``x`` for the
    variable; infix notation (binary only) uses parentheses and ``x``.
    """
    _check_arity(p)
    if format == "prefix":
        return _parse_prefix(text, p)
    if format == "infix":
        if p != 2:
            raise ValueError("infix notation is only defined for binary bracketings")
        return _parse_infix(text)
    raise ValueError(f"unknown format {format!r}; expected 'prefix' or 'infix'")


def _parse_prefix(text: str, p: int) -> Bracketing:
    frames: list[list[Bracketing]] = [[]]
    for i, ch in enumerate(text):
        if len(frames) == 1 and frames[0]:
            raise ParseError(f"trailing characters at position {i}: {text!r}")
        if ch == "w":
            frames.append([])
            continue
        if ch != "x":
            raise ParseError(f"unexpected character {ch!r} at position {i}")
        t = leaf(p)
        frames[-1].append(t)
        while len(frames) > 1 and len(frames[-1]) == p:
            t = node(*frames.pop())
            frames[-1].append(t)
    if len(frames) > 1 or not frames[0]:
        raise ParseError(f"truncated bracketing: {text!r}")
    return frames[0][0]


def _parse_infix(text: str) -> Bracketing:
    frames: list[list[Bracketing]] = [[]]
    for i, ch in enumerate(text):
        if len(frames) == 1 and frames[0]:
            raise ParseError(f"trailing characters at position {i}: {text!r}")
        if ch == "(":
            frames.append([])
        elif ch == "x":
            frames[-1].append(leaf(2))
        elif ch == ")":
            if len(frames) == 1:
                raise ParseError(f"unbalanced ')' at position {i}")
            kids = frames.pop()
            if len(kids) != 2:
                raise ParseError(f"exactly two subterms expected before ')' at position {i}")
            frames[-1].append(node(*kids))
        else:
            raise ParseError(f"unexpected character {ch!r} at position {i}")
        if len(frames) > 1 and len(frames[-1]) > 2:
            raise ParseError(f"more than two subterms in the group ending near position {i}")
    if len(frames) > 1 or not frames[0]:
        raise ParseError(f"truncated bracketing: {text!r}")
    return frames[0][0]


def render_bracketing(t: Bracketing, format: str = "prefix") -> str:
    """Serialize ``t``; round-trips with :func:`parse_bracketing`."""
    if format == "prefix":
        return _word_of(t)
    if format == "infix":
        if t.arity != 2:
            raise ValueError("infix notation is only defined for binary bracketings")
        parts: list[str] = []
        stack: list[object] = [t]
        while stack:
            s = stack.pop()
            if isinstance(s, str):
                parts.append(s)
            elif s.is_leaf:
                parts.append("x")
            else:
                stack.append(")")
                stack.append(s.children[1])
                stack.append(s.children[0])
                stack.append("(")
        return "".join(parts)
    raise ValueError(f"unknown format {format!r}; expected 'prefix' or 'infix'")


class LabeledBracketing:
    """A bracketing whose leaves carry consecutive variable indices."""

    __slots__ = ("arity", "children", "index", "_hash")

    def __init__(self, arity: int, children: tuple["LabeledBracketing", ...],
                 index: int | None = None):
        self.arity = arity
        self.children = children
        self.index = index
        self._hash = hash((arity, children, index))

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def labels(self) -> tuple[int, ...]:
        """Leaf indices in left-to-right order."""
        out: list[int] = []
        stack = [self]
        while stack:
            s = stack.pop()
            if s.is_leaf:
                out.append(s.index)
            else:
                stack.extend(reversed(s.children))
        return tuple(out)

    def shape(self) -> Bracketing:
        """The underlying unlabeled bracketing."""
        if self.is_leaf:
            return leaf(self.arity)
        return node(*(c.shape() for c in self.children))

    def render(self) -> str:
        out: list[str] = []
        stack = [self]
        while stack:
            s = stack.pop()
            if s.is_leaf:
                out.append(f"x{s.index}")
            else:
                out.append("w")
                stack.extend(reversed(s.children))
        return "".join(out)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, LabeledBracketing):
            return NotImplemented
        return (self.arity, self.index, self.children) == (other.arity, other.index, other.children)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"LabeledBracketing(p={self.arity}, {self.render()!r})"


def enumerate_leaves(t: Bracketing, j: int = 1) -> LabeledBracketing:
    """Label the leaves of ``t`` with ``j, j+1, ...`` in left-to-right order."""
    if j < 1:
        raise ValueError(f"leaf labels start at a positive index, got {j}")

    def rec(s: Bracketing, start: int) -> tuple[LabeledBracketing, int]:
        if s.is_leaf:
            return LabeledBracketing(s.arity, (), start), start + 1
        kids = []
        pos = start
        for c in s.children:
            lb, pos = rec(c, pos)
            kids.append(lb)
        return LabeledBracketing(s.arity, tuple(kids)), pos

    labeled, _ = rec(t, j)
    return labeled


def left_lengths(t: Bracketing, k: int) -> tuple[int, ...]:
    """Lengths of the first ``k`` iterated left factors of a binary bracketing.

    The left factor of a node is its first child; the left factor of the
    single variable is the variable itself, so entries stay 1 once they
    reach 1.
    """
    if t.arity != 2:
        raise ValueError("left factors are only defined for binary bracketings")
    if k < 1:
        raise ValueError(f"need at least one left factor, got k={k}")
    out = []
    s = t
    for _ in range(k):
        if not s.is_leaf:
            s = s.children[0]
        out.append(s.length)
    return tuple(out)


def egg_pairs(t: Bracketing) -> int:
    """Number of subterm occurrences of the two-variable bracketing ``(xx)``."""
    if t.arity != 2:
        raise ValueError("egg pairs are only defined for binary bracketings")
    count = 0
    stack = [t]
    while stack:
        s = stack.pop()
        if s.is_leaf:
            continue
        if s.children[0].is_leaf and s.children[1].is_leaf:
            count += 1
        else:
            stack.extend(s.children)
    return count


def left_right_depth(t: Bracketing) -> tuple[int, int]:
    """Edge distances from the root to the leftmost and to the rightmost leaf."""
    if t.arity != 2:
        raise ValueError("left/right depths are only defined for binary bracketings")
    dl = 0
    s = t
    while not s.is_leaf:
        dl += 1
        s = s.children[0]
    dr = 0
    s = t
    while not s.is_leaf:
        dr += 1
        s = s.children[-1]
    return dl, dr


def left_associated(n: int, p: int) -> Bracketing:
    """The bracketing whose prefix word is ``n`` operation symbols, then all variables."""
    _check_arity(p)
    if n < 0:
        raise ValueError(f"occurrence number must be nonnegative, got {n}")
    t = leaf(p)
    for _ in range(n):
        t = node(t, *(leaf(p),) * (p - 1))
    return t
