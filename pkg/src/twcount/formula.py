"""CNF formula core: parsing, sizing, partial assignment, literal deletion.

Formulas are immutable; every operation returns a new object. Clause ids are
assigned in input order and survive reduction and deletion, so downstream
consumers (witness extraction, obstruction templates) can track clauses
across derived formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

ASSIGNMENT_CAP = 30


class FormulaError(ValueError):
    """Invalid formula construction or misuse of a formula operation."""


class DimacsError(FormulaError):
    """Malformed DIMACS CNF input."""


@dataclass(frozen=True, order=True)
class Literal:
    """A signed occurrence of a variable."""

    var: int
    positive: bool = True

    def __post_init__(self) -> None:
        if self.var < 1:
            raise FormulaError(f"variable ids start at 1, got {self.var}")

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise FormulaError("0 is not a literal")
        return cls(abs(lit), lit > 0)

    def to_int(self) -> int:
        return self.var if self.positive else -self.var

    def negate(self) -> "Literal":
        return Literal(self.var, not self.positive)

    def __str__(self) -> str:
        return str(self.to_int())


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals over pairwise distinct variables.

    A clause may be empty (zero literals); such clauses are unsatisfiable but
    legal objects, so reduction stays total.
    """

    id: int
    literals: tuple[Literal, ...]
    variables: frozenset[int] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        seen: dict[int, bool] = {}
        for lit in self.literals:
            if lit.var in seen:
                if seen[lit.var] != lit.positive:
                    raise FormulaError(
                        f"clause {self.id} contains a complementary pair on {lit.var}"
                    )
                raise FormulaError(f"clause {self.id} repeats literal {lit}")
            seen[lit.var] = lit.positive
        object.__setattr__(self, "variables", frozenset(seen))

    def sign_of(self, var: int) -> bool | None:
        """True/False for a positive/negative occurrence, None if absent."""
        for lit in self.literals:
            if lit.var == var:
                return lit.positive
        return None

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)


def clause_of(cid: int, *lits: int) -> Clause:
    """Build a clause from signed ints, collapsing duplicate literals."""
    out: list[Literal] = []
    seen: set[int] = set()
    for raw in lits:
        if raw in seen:
            continue
        seen.add(raw)
        out.append(Literal.from_int(raw))
    return Clause(cid, tuple(out))


class Assignment:
    """Partial truth assignment: maps each domain variable to 0 or 1."""

    __slots__ = ("_items",)

    def __init__(self, values: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        pairs = sorted(values.items() if isinstance(values, Mapping) else values)
        for var, val in pairs:
            if var < 1:
                raise FormulaError(f"variable ids start at 1, got {var}")
            if val not in (0, 1):
                raise FormulaError(f"assignment value must be 0 or 1, got {val}")
        if len({v for v, _ in pairs}) != len(pairs):
            raise FormulaError("assignment repeats a variable")
        self._items: tuple[tuple[int, int], ...] = tuple(pairs)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(v for v, _ in self._items)

    def items(self) -> tuple[tuple[int, int], ...]:
        return self._items

    def get(self, var: int, default=None):
        for v, val in self._items:
            if v == var:
                return val
        return default

    def __getitem__(self, var: int) -> int:
        val = self.get(var)
        if val is None:
            raise KeyError(var)
        return val

    def __contains__(self, var: int) -> bool:
        return self.get(var) is not None

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Assignment) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        body = ", ".join(f"{v}={val}" for v, val in self._items)
        return f"Assignment({{{body}}})"

    def satisfies(self, lit: Literal) -> bool | None:
        """Whether this assignment makes the literal true; None if unassigned."""
        val = self.get(lit.var)
        if val is None:
            return None
        return val == (1 if lit.positive else 0)

    def merged(self, other: "Assignment") -> "Assignment":
        """Union of two assignments with disjoint domains."""
        if self.domain & other.domain:
            raise FormulaError("assignment domains overlap")
        return Assignment(self._items + other._items)


@dataclass(frozen=True)
class CnfFormula:
    """A CNF formula plus the declared-but-unused (free) variables."""

    clauses: tuple[Clause, ...]
    free_vars: frozenset[int] = frozenset()
    variables: frozenset[int] = field(init=False, compare=False, repr=False)
    clauses_by_id: Mapping[int, Clause] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        by_id: dict[int, Clause] = {}
        used: set[int] = set()
        for c in self.clauses:
            if c.id in by_id:
                raise FormulaError(f"duplicate clause id {c.id}")
            by_id[c.id] = c
            used |= c.variables
        if used & self.free_vars:
            raise FormulaError("free_vars overlap occurring variables")
        object.__setattr__(self, "variables", frozenset(used))
        object.__setattr__(self, "clauses_by_id", by_id)

    @property
    def num_vars(self) -> int:
        return max(self.variables | self.free_vars, default=0)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


def formula_size(f: CnfFormula) -> int:
    """|var(F)| plus, per clause, one plus its literal count. Free vars excluded."""
    return len(f.variables) + sum(1 + len(c) for c in f.clauses)


def assignments(variables: Iterable[int], cap: int = ASSIGNMENT_CAP) -> Iterator[Assignment]:
    """All assignments on the given variables, in binary counting order.

    Variables are sorted by id; the smallest id is the least significant bit.
    """
    vs = sorted(set(variables))
    if len(vs) > cap:
        raise FormulaError(f"{len(vs)} variables exceed the enumeration cap {cap}")
    for m in range(1 << len(vs)):
        yield Assignment({v: (m >> i) & 1 for i, v in enumerate(vs)})


def reduce(f: CnfFormula, tau: Assignment) -> CnfFormula:
    """Apply a partial assignment: drop satisfied clauses, strip false literals.

    Surviving clauses keep their ids; a clause whose literals are all set to 0
    stays as a zero-literal clause. Variables that vanish without being
    assigned are not recorded anywhere on the result (callers interested in
    them compare variable sets of the two formulas).
    """
    dom = tau.domain
    if not dom <= (f.variables | f.free_vars):
        extra = sorted(dom - (f.variables | f.free_vars))
        raise FormulaError(f"assignment mentions undeclared variables {extra}")
    new_clauses: list[Clause] = []
    for c in f.clauses:
        satisfied = False
        kept: list[Literal] = []
        for lit in c.literals:
            hit = tau.satisfies(lit)
            if hit is None:
                kept.append(lit)
            elif hit:
                satisfied = True
                break
        if not satisfied:
            new_clauses.append(Clause(c.id, tuple(kept)))
    return CnfFormula(tuple(new_clauses), f.free_vars - dom)


def delete_vars(f: CnfFormula, b: Iterable[int]) -> CnfFormula:
    """Remove both literals of every variable in b; clauses are never deleted."""
    bset = frozenset(b)
    if not bset <= f.variables:
        extra = sorted(bset - f.variables)
        raise FormulaError(f"deletion set mentions non-occurring variables {extra}")
    new_clauses = tuple(
        Clause(c.id, tuple(l for l in c.literals if l.var not in bset)) for c in f.clauses
    )
    return CnfFormula(new_clauses, f.free_vars)


def parse_dimacs(source) -> CnfFormula:
    """Parse DIMACS CNF text (or a file-like object yielding it).

    Comment lines starting with 'c' are ignored anywhere; duplicate literals
    inside a clause collapse silently; a complementary pair is an error.
    Variables declared in the header but occurring in no clause are recorded
    as free variables.
    """
    text = source.read() if hasattr(source, "read") else source
    num_vars = None
    clauses: list[Clause] = []
    pending: list[int] = []
    pending_seen: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, _declared_clauses = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from exc
            if num_vars < 0:
                raise DimacsError(f"line {lineno}: negative variable count")
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause data before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: bad token {tok!r}") from exc
            if lit == 0:
                if not pending:
                    raise DimacsError(f"line {lineno}: empty clause (0 with no literals)")
                clauses.append(
                    Clause(len(clauses) + 1, tuple(Literal.from_int(x) for x in pending))
                )
                pending = []
                pending_seen = {}
                continue
            var = abs(lit)
            if var > num_vars:
                raise DimacsError(f"line {lineno}: variable {var} exceeds declared {num_vars}")
            if var in pending_seen:
                if pending_seen[var] != lit:
                    raise DimacsError(f"line {lineno}: complementary pair on {var}")
                continue
            pending_seen[var] = lit
            pending.append(lit)
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if pending:
        raise DimacsError("unterminated final clause (missing 0)")
    used = frozenset().union(*(c.variables for c in clauses)) if clauses else frozenset()
    free = frozenset(range(1, num_vars + 1)) - used
    return CnfFormula(tuple(clauses), free)


def write_dimacs(f: CnfFormula) -> str:
    """Serialize to DIMACS: 'p cnf <max-var-id> <#clauses>', clauses 0-terminated."""
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    for c in f.clauses:
        body = " ".join(str(l) for l in c.literals)
        lines.append(f"{body} 0" if body else "0")
    return "\n".join(lines) + "\n"
