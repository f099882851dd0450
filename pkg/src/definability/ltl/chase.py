"""Canonical (least) models of Horn ontologies over integer time.

The least model of a Horn ontology and a finite data word is computed on a
bounded window around the data, padded far enough that both ends settle into
repeating position types; the infinite tails are then the periodic
continuations of the window's frontier zones. Saturation interleaves window
fixpoints with tail-periodicity detection, because box premises and next-time
offsets reach beyond the window edge: until a tail's period is known its
contribution is under-approximated, which is sound for a least fixpoint and
is repaired on the next round.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InconsistencyWithBot, NotHorn, WindowUnstable
from .syntax import AboxWord, Concept, OmqSpec, Ontology
from .transforms import _chain_of, normalize_horn

MIN_PADDING = 4


def _next_op_count(ontology: Ontology) -> int:
    count = 0
    for ax in ontology.axioms:
        for c in ax.lhs + ax.rhs:
            count += sum(1 for s in c.subconcepts() if s.kind in ("next_f", "next_p"))
    return count


def default_padding(ontology: Ontology) -> int:
    """Window padding wide enough for the tails to reveal their periods."""
    m = _next_op_count(normalize_horn(ontology))
    return max(MIN_PADDING, m + 2 * m * m)


@dataclass(frozen=True)
class CanonicalWindow:
    """A windowed view of the least model, with periodic tails.

    ``rows[i]`` is the atom bitmask at absolute position ``lo + i``; positions
    outside the window fold into the frontier cycles of length
    ``left_period`` / ``right_period``, so every integer position has a type.
    """

    signature: tuple[str, ...]
    lo: int
    rows: tuple[int, ...]
    left_period: int
    right_period: int
    saturated: bool = True
    _index: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self._index:
            self._index.update({a: i for i, a in enumerate(self.signature)})

    @property
    def hi(self) -> int:
        return self.lo + len(self.rows) - 1

    @property
    def window(self) -> tuple[int, int]:
        return self.lo, self.hi

    def fold(self, pos: int) -> int:
        """Window index standing in for an arbitrary integer position."""
        if pos < self.lo:
            return (pos - self.lo) % self.left_period
        if pos > self.hi:
            width = len(self.rows)
            return width - self.right_period + (pos - self.hi - 1) % self.right_period
        return pos - self.lo

    def atoms_at(self, pos: int) -> frozenset[str]:
        mask = self.rows[self.fold(pos)]
        return frozenset(a for i, a in enumerate(self.signature) if mask >> i & 1)

    def has_atom(self, name: str, pos: int) -> bool:
        i = self._index.get(name)
        if i is None:
            return False
        return bool(self.rows[self.fold(pos)] >> i & 1)

    def holds(self, concept: Concept, pos: int) -> bool:
        """Truth of a temporal concept at any integer position of the model.

        Unbounded operators scan one full tail period past the window (plus a
        margin for nested shifts); beyond that, truth values repeat.
        """
        kind = concept.kind
        if kind == "atom":
            return self.has_atom(concept.name, pos)  # type: ignore[arg-type]
        if kind == "top":
            return True
        if kind == "bot":
            return False
        if kind == "and":
            return all(self.holds(c, pos) for c in concept.args)
        if kind == "or":
            return any(self.holds(c, pos) for c in concept.args)
        if kind == "next_f":
            return self.holds(concept.args[0], pos + 1)
        if kind == "next_p":
            return self.holds(concept.args[0], pos - 1)
        inner = concept.args[0]
        depth = sum(1 for _ in concept.subconcepts())
        if kind in ("dia_f", "box_f"):
            bound = max(self.hi, pos) + self.right_period + depth + 1
            positions = range(pos + 1, bound + 1)
            if kind == "dia_f":
                return any(self.holds(inner, p) for p in positions)
            return all(self.holds(inner, p) for p in positions)
        if kind in ("dia_p", "box_p"):
            bound = min(self.lo, pos) - self.left_period - depth - 1
            positions = range(pos - 1, bound - 1, -1)
            if kind == "dia_p":
                return any(self.holds(inner, p) for p in positions)
            return all(self.holds(inner, p) for p in positions)
        raise ValueError(f"cannot evaluate concept kind {kind!r}")  # pragma: no cover


def _detect_period(rows: list[int], zone: range) -> int | None:
    """Smallest period fully repeating at least twice across the zone."""
    indices = list(zone)
    for p in range(1, len(indices) // 2 + 1):
        if all(rows[indices[i]] == rows[indices[i + p]] for i in range(len(indices) - p)):
            return p
    return None


def chase_canonical(
    ontology: Ontology, abox: AboxWord, padding: int | None = None
) -> CanonicalWindow:
    """Saturate the least model of a Horn ontology around a data word.

    Raises InconsistencyWithBot when a falsum body fires, and WindowUnstable
    when a frontier zone never settles into a repeating pattern at this
    padding (callers may retry with a larger one).
    """
    if any(len(ax.rhs) > 1 for ax in ontology.axioms):
        raise NotHorn("the chase needs a Horn ontology")
    normalized = normalize_horn(ontology)
    pad = default_padding(ontology) if padding is None else max(MIN_PADDING, padding)

    signature = tuple(
        sorted(
            set(abox.signature)
            | {a for ax in normalized.axioms for c in ax.lhs + ax.rhs for a in c.atoms()}
        )
    )
    index = {a: i for i, a in enumerate(signature)}
    data_len = max(len(abox), 1)
    lo = abox.origin - pad
    width = data_len + 2 * pad
    rows = [0] * width
    for name, pos in abox.assertions():
        rows[pos - lo] |= 1 << index[name]

    compiled = []
    for ax in normalized.axioms:
        body = tuple(_chain_of(c) for c in ax.lhs)
        head = 1 << index[ax.rhs[0].name] if ax.rhs else None
        compiled.append((body, head))

    zone = max(2, -(-pad // 2))
    left_zone = range(zone)
    right_zone = range(width - zone, width)
    periods: list[int | None] = [None, None]  # left, right

    def atom_true(bit: int, pos: int) -> bool:
        if 0 <= pos < width:
            return bool(rows[pos] >> bit & 1)
        if pos < 0 and periods[0]:
            return bool(rows[pos % periods[0]] >> bit & 1)
        if pos >= width and periods[1]:
            q = periods[1]
            return bool(rows[width - q + (pos - width) % q] >> bit & 1)
        return False

    def chain_true(ops: tuple[str, ...], base: Concept, pos: int) -> bool:
        if not ops:
            if base.kind == "top":
                return True
            return atom_true(index[base.name], pos)
        op, rest = ops[0], ops[1:]
        if op == "next_f":
            return chain_true(rest, base, pos + 1)
        if op == "next_p":
            return chain_true(rest, base, pos - 1)
        if op == "box_f":
            if periods[1] is None:
                return False  # tail unknown: under-approximate the premise
            ub = width - 1 + periods[1] + len(rest) + 1
            return all(chain_true(rest, base, p) for p in range(pos + 1, ub + 1))
        if op == "box_p":
            if periods[0] is None:
                return False
            lb = -(periods[0] + len(rest) + 1)
            return all(chain_true(rest, base, p) for p in range(lb, pos))
        raise ValueError(f"unexpected body operator {op!r}")  # pragma: no cover

    outer_cap = width * max(1, len(signature)) + 4
    prev_state = None
    for _ in range(outer_cap):
        changed = True
        while changed:
            changed = False
            for body, head in compiled:
                for pos in range(width):
                    if head is not None and rows[pos] & head:
                        continue
                    if all(chain_true(ops, base, pos) for ops, base in body):
                        if head is None:
                            raise InconsistencyWithBot(
                                f"falsum body fires at position {lo + pos}"
                            )
                        rows[pos] |= head
                        changed = True
        periods[0] = _detect_period(rows, left_zone)
        periods[1] = _detect_period(rows, right_zone)
        state = (tuple(rows), periods[0], periods[1])
        if state == prev_state:
            break
        prev_state = state
    else:  # pragma: no cover - monotone saturation always settles in range
        raise WindowUnstable("saturation did not settle within the round cap")

    if periods[0] is None or periods[1] is None:
        raise WindowUnstable(
            f"no repeating frontier within the {zone}-position guard zones at padding {pad}"
        )
    return CanonicalWindow(signature, lo, tuple(rows), periods[0], periods[1])


def certain_answer(
    spec: OmqSpec, abox: AboxWord, padding: int | None = None
) -> bool | frozenset[int]:
    """Certain answers of a Horn query over a data word, via the chase.

    Boolean mode returns whether the query certainly holds somewhere on the
    timeline; specific mode returns the certain answer timestamps within the
    data range. An inconsistent instance makes everything certain.
    """
    try:
        window = chase_canonical(spec.ontology, abox, padding)
    except InconsistencyWithBot:
        if spec.mode == "boolean":
            return True
        return frozenset(abox.origin + i for i in range(len(abox)))
    depth = sum(1 for _ in spec.query.subconcepts())
    if spec.mode == "boolean":
        lo = window.lo - window.left_period - depth - 1
        hi = window.hi + window.right_period + depth + 1
        return any(window.holds(spec.query, j) for j in range(lo, hi + 1))
    positions = range(abox.origin, abox.origin + len(abox))
    return frozenset(j for j in positions if window.holds(spec.query, j))
