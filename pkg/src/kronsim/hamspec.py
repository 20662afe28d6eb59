"""Parser for the HAMSPEC text format.

Line-oriented, `#` starts a comment, `.` is the decimal separator regardless
of locale. Layout:

    dims K M d
    flags rescale timedep          # optional
    term 1: Z , Z , I
    term 2: [ 0 1 ; 1 0 ] , I , I
    coeff 1: cosine 1.0 2.0        # optional, any kind from the catalog

Factors are `I`, a named Pauli (`X`, `Y`, `Z`), or a row-major d x d literal
`[ re+imi ... ; ... ]` with whitespace-separated entries and `;` between
rows. Named Paulis are divided by 2 only when the `rescale` flag is set; on
top of that, any term whose operator norm still exceeds 1/2 gets its first
non-identity factor divided down so the product of factor norms lands exactly
on 1/2. Identity factors are never rescaled. Without the flag, a term over
the norm premise is rejected (pure-identity terms excepted: nothing could be
rescaled without changing what they are).
"""

from __future__ import annotations

import numpy as np

from .errors import NormPremiseViolated, NotHermitian, ParseError
from .linalg import max_entry_norm
from .model import (
    NORM_PREMISE,
    NORM_PREMISE_SLACK,
    TensorFactorHamiltonian,
    TimeCoefficient,
    is_identity_factor,
    make_term,
)

PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

KNOWN_FLAGS = ("rescale", "timedep")


def _parse_complex(token: str, line_no: int) -> complex:
    try:
        return complex(token.replace("i", "j"))
    except ValueError:
        raise ParseError(f"bad complex entry {token!r}", line_no) from None


def _parse_factor(token: str, d: int, line_no: int, rescale: bool) -> np.ndarray:
    token = token.strip()
    if token == "I":
        return np.eye(d, dtype=np.complex128)
    if token in PAULI:
        if d != 2:
            raise ParseError(f"named Pauli {token} requires d=2, header says d={d}", line_no)
        mat = PAULI[token]
        return mat / 2.0 if rescale else mat.copy()
    if token.startswith("[") and token.endswith("]"):
        rows = token[1:-1].split(";")
        if len(rows) != d:
            raise ParseError(f"matrix literal has {len(rows)} rows, expected {d}", line_no)
        out = np.zeros((d, d), dtype=np.complex128)
        for r, row in enumerate(rows):
            entries = row.split()
            if len(entries) != d:
                raise ParseError(
                    f"matrix row {r} has {len(entries)} entries, expected {d}", line_no
                )
            for c, entry in enumerate(entries):
                out[r, c] = _parse_complex(entry, line_no)
        return out
    raise ParseError(f"unrecognized factor {token!r}", line_no)


def _rescale_term(factors: list[np.ndarray], margin: float) -> list[np.ndarray]:
    """Divide the first non-identity factor so the term norm lands on 1/2."""
    norm = 1.0
    for f in factors:
        norm *= float(np.linalg.norm(f, 2))
    if norm <= NORM_PREMISE + NORM_PREMISE_SLACK:
        return factors
    for j, f in enumerate(factors):
        if not is_identity_factor(f):
            factors[j] = f / (margin * 2.0 * norm)
            return factors
    return factors  # pure identity term: nothing rescalable


def parse_hamiltonian(text, margin: float = 1.0) -> TensorFactorHamiltonian:
    """Parse HAMSPEC text (str or bytes) into a validated Hamiltonian."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    dims = None
    flags: set[str] = set()
    term_lines: dict[int, tuple[str, int]] = {}
    coeff_lines: dict[int, tuple[str, int]] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "dims":
            if dims is not None:
                raise ParseError("duplicate dims line", line_no)
            parts = rest.split()
            if len(parts) != 3:
                raise ParseError("dims line needs exactly K M d", line_no)
            try:
                dims = tuple(int(p) for p in parts)
            except ValueError:
                raise ParseError(f"non-integer dims {rest!r}", line_no) from None
            if dims[0] < 1 or dims[1] < 1 or dims[2] < 2:
                raise ParseError(
                    f"bad dims K={dims[0]} M={dims[1]} d={dims[2]}", line_no
                )
        elif head == "flags":
            for flag in rest.split():
                if flag not in KNOWN_FLAGS:
                    raise ParseError(f"unknown flag {flag!r}", line_no)
                flags.add(flag)
        elif head in ("term", "coeff"):
            if dims is None:
                raise ParseError(f"{head} line before dims", line_no)
            idx_str, sep, body = rest.partition(":")
            if not sep:
                raise ParseError(f"{head} line missing ':'", line_no)
            try:
                idx = int(idx_str.strip())
            except ValueError:
                raise ParseError(f"bad {head} index {idx_str.strip()!r}", line_no) from None
            if not 1 <= idx <= dims[0]:
                raise ParseError(f"{head} index {idx} outside 1..{dims[0]}", line_no)
            store = term_lines if head == "term" else coeff_lines
            if idx in store:
                raise ParseError(f"duplicate {head} {idx}", line_no)
            store[idx] = (body.strip(), line_no)
        else:
            raise ParseError(f"unrecognized line {line!r}", line_no)

    if dims is None:
        raise ParseError("missing dims line")
    k, m, d = dims
    missing = [i for i in range(1, k + 1) if i not in term_lines]
    if missing:
        raise ParseError(f"missing term lines for {missing}")

    rescale = "rescale" in flags
    terms = []
    for i in range(1, k + 1):
        body, line_no = term_lines[i]
        tokens = body.split(",")
        if len(tokens) != m:
            raise ParseError(f"term {i} has {len(tokens)} factors, expected {m}", line_no)
        factors = [_parse_factor(tok, d, line_no, rescale) for tok in tokens]
        for j, f in enumerate(factors):
            defect = max_entry_norm(f - f.conj().T)
            if defect > 1e-12:
                raise NotHermitian(
                    f"term {i} factor {j} is not Hermitian (defect {defect:.3e})"
                )
        if rescale:
            factors = _rescale_term(factors, margin)
        pure_identity = all(is_identity_factor(f) for f in factors)
        try:
            terms.append(make_term(factors, enforce_norm=not pure_identity))
        except NormPremiseViolated as exc:
            if rescale:
                raise
            raise NormPremiseViolated(
                f"term {i}: {exc}; set the rescale flag or scale the factors"
            ) from None

    coefficients = None
    if coeff_lines or "timedep" in flags:
        coefficients = []
        for i in range(1, k + 1):
            if i not in coeff_lines:
                coefficients.append(TimeCoefficient("constant", (1.0,)))
                continue
            body, line_no = coeff_lines[i]
            parts = body.split()
            if not parts:
                raise ParseError(f"coeff {i} missing kind", line_no)
            kind = parts[0]
            try:
                params = tuple(float(p) for p in parts[1:])
            except ValueError:
                raise ParseError(f"coeff {i} has non-numeric parameters", line_no) from None
            try:
                coefficients.append(TimeCoefficient(kind, params))
            except Exception as exc:
                raise ParseError(f"coeff {i}: {exc}", line_no) from None

    return TensorFactorHamiltonian(
        k=k,
        m=m,
        d=d,
        terms=tuple(terms),
        coefficients=tuple(coefficients) if coefficients is not None else None,
    )


def parse_hamiltonian_file(path, margin: float = 1.0) -> TensorFactorHamiltonian:
    return parse_hamiltonian(_read_bytes(path), margin=margin)


def _read_bytes(path) -> bytes:
    # Unreadable input is an input problem, not an internal failure.
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc


def parse_vector(text) -> np.ndarray:
    """Parse a state-vector file: one complex amplitude per line, `#` comments.

    Amplitudes accept the same `re+imi` syntax as matrix literals. The vector
    is returned as-is (no normalization); emptiness is a parse error.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    entries = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        entries.append(_parse_complex(line, line_no))
    if not entries:
        raise ParseError("vector file has no amplitudes")
    return np.array(entries, dtype=np.complex128)


def parse_vector_file(path) -> np.ndarray:
    return parse_vector(_read_bytes(path))
