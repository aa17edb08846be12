"""
Exact Cover instances and the classical brute-force oracle.

An n-bit instance is an ordered list of 3-bit clauses; a clause over bits
(i, j, k) is satisfied when exactly one of z_i, z_j, z_k is 1.

Provides:
- Clause / ExactCoverInstance: immutable, validated instance model
- clause_cost / violation_count: the classical energy h(z)
- cost_table / enumerate_satisfying / minimal_violation_set: exhaustive oracle
- generate_gusa: unique-satisfying-assignment instances built clause by clause
- generate_fixed_clauses: instances with the clause count fixed in advance
- load_instance / save_instance: the JSON instance file format

Assignments are integers in [0, 2^n) with z_i stored in bit i (little-endian).
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import CapacityError, GenerationError, InvalidInstanceError, InvalidParameterError

logger = logging.getLogger("adiabatic-cover")

# Largest n for which 2^n tables are built
MAX_BITS = 24
# Restarts allowed per generate_gusa call
GUSA_MAX_RESTARTS = 10_000

Assignment = int


def to_bits(a: Assignment, n: int) -> tuple[int, ...]:
    """Bit view (z_0, ..., z_{n-1}) of an integer assignment."""
    if not 0 <= a < (1 << n):
        raise InvalidInstanceError(f"assignment {a} does not fit in {n} bits")
    return tuple((a >> i) & 1 for i in range(n))


def from_bits(bits: Sequence[int]) -> Assignment:
    """Integer encoding of a bit sequence (z_0 first)."""
    a = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise InvalidInstanceError(f"bit {i} must be 0 or 1, got {b!r}")
        a |= b << i
    return a


def _is_index(value: Any) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


@dataclass(frozen=True, order=True)
class Clause:
    """A 3-bit Exact Cover clause, indices stored ascending."""

    i: int
    j: int
    k: int

    def __post_init__(self):
        if not all(_is_index(v) for v in (self.i, self.j, self.k)):
            raise InvalidInstanceError(f"clause {self.as_tuple()} must hold integer indices")
        if not 0 <= self.i < self.j < self.k:
            raise InvalidInstanceError(
                f"clause {self.as_tuple()} must hold distinct non-negative indices in ascending order"
            )

    @classmethod
    def of(cls, a: int, b: int, c: int) -> Clause:
        """Build a clause from three distinct indices in any order."""
        if len({a, b, c}) != 3:
            raise InvalidInstanceError(f"clause ({a}, {b}, {c}) repeats an index")
        i, j, k = sorted((int(a), int(b), int(c)))
        return cls(i, j, k)

    @property
    def mask(self) -> int:
        return (1 << self.i) | (1 << self.j) | (1 << self.k)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)


@dataclass(frozen=True)
class ExactCoverInstance:
    """
    An n-bit Exact Cover instance.

    Clauses keep their generation order; no two clauses cover the same
    index set and every index is below n.
    """

    n: int
    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        if not _is_index(self.n) or self.n < 1:
            raise InvalidInstanceError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "clauses", tuple(self.clauses))
        seen: set[Clause] = set()
        for pos, clause in enumerate(self.clauses):
            if not isinstance(clause, Clause):
                raise InvalidInstanceError(f"clause #{pos} is not a Clause: {clause!r}")
            if clause.k >= self.n:
                raise InvalidInstanceError(
                    f"clause #{pos} {list(clause.as_tuple())} has an index outside [0, {self.n})"
                )
            if clause in seen:
                raise InvalidInstanceError(f"clause #{pos} {list(clause.as_tuple())} is a duplicate")
            seen.add(clause)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def field_strengths(self) -> np.ndarray:
        """Number of clauses containing each bit."""
        d = np.zeros(self.n, dtype=np.int64)
        for c in self.clauses:
            d[[c.i, c.j, c.k]] += 1
        return d

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "clauses": [list(c.as_tuple()) for c in self.clauses]}

    @classmethod
    def from_dict(cls, data: Any) -> ExactCoverInstance:
        """
        Validate and build an instance from its JSON form.

        Raises:
            InvalidInstanceError: naming the offending field or clause
        """
        if not isinstance(data, dict):
            raise InvalidInstanceError("instance must be a JSON object with 'n' and 'clauses'")
        n = data.get("n")
        if not _is_index(n) or n < 1:
            raise InvalidInstanceError(f"'n' must be a positive integer, got {n!r}")
        raw = data.get("clauses")
        if not isinstance(raw, list):
            raise InvalidInstanceError("'clauses' must be a list of [i, j, k] triples")

        clauses = []
        for pos, triple in enumerate(raw):
            if not isinstance(triple, list) or len(triple) != 3 or not all(_is_index(v) for v in triple):
                raise InvalidInstanceError(f"clause #{pos} {triple!r} is not a triple of integers")
            if not triple[0] < triple[1] < triple[2]:
                raise InvalidInstanceError(f"clause #{pos} {triple!r} is not strictly ascending")
            clauses.append(Clause(*triple))
        return cls(n, tuple(clauses))


# ==================== Clause semantics ====================


def clause_cost(clause: Clause, a: Assignment, n: int | None = None) -> int:
    """
    Energy of one clause under an assignment.

    Args:
        clause: Clause to evaluate
        a: Integer assignment
        n: Bit count of the owning instance, used to validate indices

    Returns:
        0 if exactly one of the three bits is 1, else 1
    """
    if n is not None and clause.k >= n:
        raise InvalidInstanceError(f"clause {list(clause.as_tuple())} has an index outside [0, {n})")
    if a < 0:
        raise InvalidInstanceError(f"assignment must be non-negative, got {a}")
    return 0 if int(a & clause.mask).bit_count() == 1 else 1


def violation_count(inst: ExactCoverInstance, a: Assignment) -> int:
    """Number of clauses the assignment violates, h(z)."""
    if not 0 <= a < (1 << inst.n):
        raise InvalidInstanceError(f"assignment {a} does not fit in {inst.n} bits")
    return sum(clause_cost(c, a) for c in inst.clauses)


def _check_capacity(n: int, what: str) -> None:
    if n > MAX_BITS:
        raise CapacityError(n, MAX_BITS, what)


def _exactly_one(z: np.ndarray, clause: Clause) -> np.ndarray:
    """Boolean mask of assignments in z satisfying the clause."""
    hits = ((z >> clause.i) & 1) + ((z >> clause.j) & 1) + ((z >> clause.k) & 1)
    return hits == 1


def cost_table(inst: ExactCoverInstance) -> np.ndarray:
    """
    Violation count for every assignment.

    Returns:
        int32 array of length 2^n, entry z = violation_count(inst, z)
    """
    _check_capacity(inst.n, "cost table")
    z = np.arange(1 << inst.n, dtype=np.uint32)
    cost = np.zeros(1 << inst.n, dtype=np.int32)
    for clause in inst.clauses:
        cost += ~_exactly_one(z, clause)
    return cost


def enumerate_satisfying(inst: ExactCoverInstance) -> np.ndarray:
    """All satisfying assignments in ascending order."""
    _check_capacity(inst.n, "enumerate_satisfying")
    return np.flatnonzero(cost_table(inst) == 0)


def minimal_violation_set(inst: ExactCoverInstance) -> tuple[int, np.ndarray]:
    """
    Minimum violation count and every assignment attaining it.

    For satisfiable instances this is (0, enumerate_satisfying(inst)).
    """
    _check_capacity(inst.n, "minimal_violation_set")
    cost = cost_table(inst)
    best = int(cost.min())
    return best, np.flatnonzero(cost == best)


def prefix_satisfying_counts(inst: ExactCoverInstance) -> list[int]:
    """
    Satisfying-assignment count after each clause prefix.

    Entry m-1 counts assignments satisfying the first m clauses.
    """
    _check_capacity(inst.n, "prefix_satisfying_counts")
    survivors = np.arange(1 << inst.n, dtype=np.uint32)
    counts = []
    for clause in inst.clauses:
        survivors = survivors[_exactly_one(survivors, clause)]
        counts.append(int(survivors.size))
    return counts


def free_bits(inst: ExactCoverInstance) -> tuple[int, ...]:
    """Bits that appear in no clause."""
    return tuple(int(i) for i in np.flatnonzero(inst.field_strengths() == 0))


def instance_summary(inst: ExactCoverInstance) -> dict[str, Any]:
    """Classical facts about an instance, as recorded next to results."""
    min_violations, argmin = minimal_violation_set(inst)
    return {
        "n": inst.n,
        "clauses": inst.num_clauses,
        "clause_ratio": inst.num_clauses / inst.n,
        "satisfiable": min_violations == 0,
        "num_satisfying": int(argmin.size) if min_violations == 0 else 0,
        "min_violations": min_violations,
        "num_minimal": int(argmin.size),
        "free_bits": list(free_bits(inst)),
    }


# ==================== Random generators ====================


def _draw_clause(n: int, rng: np.random.Generator) -> Clause:
    i, j, k = sorted(int(v) for v in rng.choice(n, size=3, replace=False))
    return Clause(i, j, k)


def generate_gusa(
    n: int,
    rng: np.random.Generator,
    max_restarts: int = GUSA_MAX_RESTARTS,
) -> ExactCoverInstance:
    """
    Generate an instance with a unique satisfying assignment.

    Clauses are added one at a time as uniform draws of three distinct bits;
    a draw repeating an existing clause is redrawn without counting. After
    each addition the surviving satisfying set is filtered. The attempt is
    accepted when one assignment survives and discarded when the count drops
    straight past one to zero.

    Args:
        n: Bit count (>= 3)
        rng: Seeded random source
        max_restarts: Discarded attempts allowed before giving up

    Raises:
        GenerationError: after max_restarts discarded attempts
    """
    if n < 3:
        raise InvalidParameterError("n", "n >= 3", n)
    _check_capacity(n, "generate_gusa")
    all_triples = math.comb(n, 3)
    everything = np.arange(1 << n, dtype=np.uint32)

    for attempt in range(max_restarts + 1):
        survivors = everything
        clauses: list[Clause] = []
        seen: set[Clause] = set()

        while len(seen) < all_triples:
            clause = _draw_clause(n, rng)
            while clause in seen:
                clause = _draw_clause(n, rng)
            seen.add(clause)
            clauses.append(clause)
            survivors = survivors[_exactly_one(survivors, clause)]
            if survivors.size <= 1:
                break

        if survivors.size == 1:
            if attempt:
                logger.debug("GUSA n=%s accepted after %s restarts", n, attempt)
            return ExactCoverInstance(n, tuple(clauses))
        logger.debug(
            "GUSA n=%s attempt %s rejected (%s satisfying after %s clauses)",
            n, attempt, survivors.size, len(clauses),
        )

    raise GenerationError(f"no unique-satisfying instance at n={n} after {max_restarts} restarts")


def generate_fixed_clauses(n: int, m: int, rng: np.random.Generator) -> ExactCoverInstance:
    """
    Generate an instance with exactly m distinct random clauses.

    Args:
        n: Bit count (>= 3)
        m: Clause count, 0 <= m <= C(n, 3)
        rng: Seeded random source
    """
    if n < 3:
        raise InvalidParameterError("n", "n >= 3", n)
    limit = math.comb(n, 3)
    if not 0 <= m <= limit:
        raise InvalidParameterError("m", f"0 <= m <= C({n},3) = {limit}", m)

    clauses: list[Clause] = []
    seen: set[Clause] = set()
    while len(clauses) < m:
        clause = _draw_clause(n, rng)
        if clause in seen:
            continue
        seen.add(clause)
        clauses.append(clause)
    return ExactCoverInstance(n, tuple(clauses))


# ==================== Instance files ====================


def dumps_instance(inst: ExactCoverInstance) -> str:
    """Canonical single-line JSON text of an instance."""
    return json.dumps(inst.to_dict()) + "\n"


def save_instance(inst: ExactCoverInstance, path: str | Path) -> Path:
    """Write an instance file; identical instances give identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_instance(inst))
    return path


def load_instance(path: str | Path) -> ExactCoverInstance:
    """
    Read and validate an instance file.

    Raises:
        InvalidInstanceError: malformed JSON or instance content
        OSError: file cannot be read
    """
    with open(path, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise InvalidInstanceError(f"{path}: not valid UTF-8 JSON ({exc})") from None
    return ExactCoverInstance.from_dict(data)


def instance_from_triples(n: int, triples: Iterable[Sequence[int]]) -> ExactCoverInstance:
    """Convenience constructor from plain index triples in any order."""
    return ExactCoverInstance(n, tuple(Clause.of(*t) for t in triples))
