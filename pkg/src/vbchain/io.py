"""Text formats.

VBK1 (kernel)::

    VBK1
    n
    pi_1 ... pi_n
    P_11 ... P_1n
    ...
    P_n1 ... P_nn

VBQ1 (proposal table) is the same with header ``VBQ1`` and no pi line.
Functional and target files are ``n`` whitespace-separated decimals.
Numbers are written with 17 significant digits, which round-trips doubles.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import FormatError
from .kernel import DB_TOL, ReversibleKernel, from_matrix
from .mh_finite import ProposalTable


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _row(values) -> str:
    return " ".join(fmt(v) for v in values)


def _content_lines(text: str) -> list[str]:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    return lines


def _parse_row(line: str, n: int, what: str) -> list[float]:
    toks = line.split()
    if len(toks) != n:
        raise FormatError(f"{what}: expected {n} numbers, found {len(toks)}")
    try:
        return [float(t) for t in toks]
    except ValueError as exc:
        raise FormatError(f"{what}: {exc}") from None


def _parse_header(lines: list[str], magic: str, extra: int) -> int:
    if not lines or lines[0].strip() != magic:
        raise FormatError(f"missing {magic} header")
    if len(lines) < 2:
        raise FormatError("missing state count")
    try:
        n = int(lines[1].strip())
    except ValueError:
        raise FormatError(f"bad state count {lines[1]!r}") from None
    if n < 1:
        raise FormatError(f"state count must be positive, got {n}")
    want = 2 + extra + n
    if len(lines) != want:
        kind = "trailing content" if len(lines) > want else "truncated file"
        raise FormatError(f"{kind}: expected {want} lines, found {len(lines)}")
    return n


def dumps_kernel(K: ReversibleKernel) -> str:
    lines = ["VBK1", str(K.n), _row(K.pi)] + [_row(r) for r in K.P]
    return "\n".join(lines) + "\n"


def parse_kernel_tables(text: str) -> tuple[np.ndarray, np.ndarray]:
    lines = _content_lines(text)
    n = _parse_header(lines, "VBK1", 1)
    pi = np.array(_parse_row(lines[2], n, "pi"))
    P = np.array([_parse_row(lines[3 + i], n, f"row {i + 1}") for i in range(n)])
    return P, pi


def loads_kernel(text: str, tol: float = DB_TOL) -> ReversibleKernel:
    P, pi = parse_kernel_tables(text)
    return from_matrix(P, pi, tol)


def dumps_proposal(q) -> str:
    q = q.q if isinstance(q, ProposalTable) else np.asarray(q, dtype=float)
    return "\n".join(["VBQ1", str(q.shape[0])] + [_row(r) for r in q]) + "\n"


def loads_proposal(text: str) -> ProposalTable:
    lines = _content_lines(text)
    n = _parse_header(lines, "VBQ1", 0)
    return ProposalTable(np.array([_parse_row(lines[2 + i], n, f"row {i + 1}") for i in range(n)]))


def loads_vector(text: str) -> np.ndarray:
    try:
        vals = [float(t) for t in text.split()]
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if not vals:
        raise FormatError("empty vector file")
    return np.array(vals)


def dumps_vector(v) -> str:
    return _row(v) + "\n"


def read_kernel(path, tol: float = DB_TOL) -> ReversibleKernel:
    return loads_kernel(Path(path).read_text(), tol)


def write_kernel(K: ReversibleKernel, path) -> None:
    Path(path).write_text(dumps_kernel(K))


def read_proposal(path) -> ProposalTable:
    return loads_proposal(Path(path).read_text())


def write_proposal(q, path) -> None:
    Path(path).write_text(dumps_proposal(q))


def read_vector(path) -> np.ndarray:
    return loads_vector(Path(path).read_text())
