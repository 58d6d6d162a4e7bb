"""DIMACS CNF parsing, validation, serialization, and direct clause evaluation.

Only width-3 clauses are accepted: the downstream spin mapping expands each
clause into a cubic polynomial over three distinct spins. Files written by
common 3-SAT generators (trailing ``%`` marker, stray ``0`` lines, clauses
wrapped over several lines) parse cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DimacsError(ValueError):
    """Malformed DIMACS input. Carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Literal:
    """A variable occurrence, 1-based, possibly negated."""

    var: int
    negated: bool = False

    def __post_init__(self):
        if self.var < 1:
            raise ValueError(f"variable index must be >= 1, got {self.var}")

    @classmethod
    def from_signed(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(lit), lit < 0)

    def to_signed(self) -> int:
        return -self.var if self.negated else self.var

    def value(self, assignment: Sequence[bool]) -> bool:
        return bool(assignment[self.var - 1]) ^ self.negated


Clause = tuple[Literal, Literal, Literal]


@dataclass(frozen=True)
class CnfFormula:
    """A 3-CNF formula: ``num_vars`` variables, width-3 clauses."""

    num_vars: int
    clauses: tuple[Clause, ...]

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


def _validate_clause(lits: list[int], n: int, line: int) -> Clause:
    if len(lits) != 3:
        raise DimacsError(f"clause width {len(lits)} != 3", line)
    for lit in lits:
        if abs(lit) > n:
            raise DimacsError(f"variable {abs(lit)} out of range 1..{n}", line)
    vs = [abs(lit) for lit in lits]
    if len(set(vs)) != 3:
        raise DimacsError(f"repeated variable in clause {lits}", line)
    return tuple(Literal.from_signed(lit) for lit in lits)  # type: ignore[return-value]


def parse_dimacs(text: str | Iterable[str]) -> CnfFormula:
    """Parse DIMACS CNF text into a :class:`CnfFormula`.

    Accepts a string or an iterable of lines. Comment lines (``c``), blank
    lines, and everything from a ``%`` terminator onward are ignored. Errors
    report the 1-based line number.
    """
    if isinstance(text, str):
        lines: Iterable[str] = text.splitlines()
    else:
        lines = text

    num_vars = -1
    num_clauses = -1
    header_line = 0
    clauses: list[Clause] = []
    pending: list[int] = []
    pending_line = 0
    done = False

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if done or not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            done = True
            continue
        if line.startswith("p"):
            if num_vars >= 0:
                raise DimacsError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"bad header {line!r}", lineno)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"non-integer header field in {line!r}", lineno) from None
            if num_vars < 0 or num_clauses < 0:
                raise DimacsError("negative header count", lineno)
            header_line = lineno
            continue
        if num_vars < 0:
            raise DimacsError(f"clause data before header: {line!r}", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"non-integer token {tok!r}", lineno) from None
            if lit == 0:
                if pending:
                    clauses.append(_validate_clause(pending, num_vars, pending_line))
                    pending = []
            else:
                if not pending:
                    pending_line = lineno
                pending.append(lit)

    if num_vars < 0:
        raise DimacsError("missing 'p cnf' header")
    if pending:
        # Tolerate a final clause with no trailing 0.
        clauses.append(_validate_clause(pending, num_vars, pending_line))
    if num_clauses >= 0 and len(clauses) != num_clauses:
        raise DimacsError(
            f"header declares {num_clauses} clauses but {len(clauses)} found", header_line
        )
    return CnfFormula(num_vars=num_vars, clauses=tuple(clauses))


def parse_dimacs_file(path) -> CnfFormula:
    with open(path, "r", encoding="utf-8") as f:
        return parse_dimacs(f)


def serialize_dimacs(formula: CnfFormula) -> str:
    """Render a formula as DIMACS text. Round-trips through :func:`parse_dimacs`."""
    out = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    for clause in formula.clauses:
        out.append(" ".join(str(lit.to_signed()) for lit in clause) + " 0")
    return "\n".join(out) + "\n"


def count_unsat(formula: CnfFormula, assignment: Sequence[bool]) -> int:
    """Number of clauses whose three literals are all false under ``assignment``."""
    if len(assignment) != formula.num_vars:
        raise ValueError(
            f"assignment length {len(assignment)} != num_vars {formula.num_vars}"
        )
    unsat = 0
    for clause in formula.clauses:
        if not any(lit.value(assignment) for lit in clause):
            unsat += 1
    return unsat


def clause_arrays(formula: CnfFormula) -> tuple[np.ndarray, np.ndarray]:
    """0-based variable indices and negation flags as (m, 3) arrays.

    Used by the exhaustive oracle and the instance generator to evaluate many
    assignments at once.
    """
    m = formula.num_clauses
    vs = np.zeros((m, 3), dtype=np.int64)
    neg = np.zeros((m, 3), dtype=bool)
    for j, clause in enumerate(formula.clauses):
        for q, lit in enumerate(clause):
            vs[j, q] = lit.var - 1
            neg[j, q] = lit.negated
    return vs, neg


def count_unsat_batch(formula: CnfFormula, assignments: np.ndarray) -> np.ndarray:
    """Vectorized :func:`count_unsat` over a (B, n) boolean assignment matrix."""
    assignments = np.asarray(assignments, dtype=bool)
    if assignments.ndim != 2 or assignments.shape[1] != formula.num_vars:
        raise ValueError(f"expected (B, {formula.num_vars}) boolean matrix")
    vs, neg = clause_arrays(formula)
    lit_true = assignments[:, vs] ^ neg  # (B, m, 3)
    return np.sum(~lit_true.any(axis=2), axis=1)
