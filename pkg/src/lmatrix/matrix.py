"""Immutable dense matrices over an exact field, with a JSON wire format."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .fields import FieldCtx, FieldError, field_make


class MatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ExactMatrix:
    """Dense row-major matrix. Entries are field elements of ``ctx``."""

    ctx: FieldCtx
    rows: int
    cols: int
    entries: tuple
    _trusted: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise MatrixError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise MatrixError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )
        if not self._trusted:
            object.__setattr__(self, "entries", tuple(self.ctx(x) for x in self.entries))

    # construction -----------------------------------------------------------
    @classmethod
    def trusted(cls, ctx, rows, cols, entries) -> "ExactMatrix":
        """Skip per-entry coercion; caller guarantees entries already lie in ctx."""
        return cls(ctx, rows, cols, tuple(entries), _trusted=True)

    @classmethod
    def from_rows(cls, ctx, rows) -> "ExactMatrix":
        ctx = field_make(ctx)
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise MatrixError("ragged rows")
        return cls(ctx, len(rows), ncols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, ctx, n: int) -> "ExactMatrix":
        one, zero = ctx.one, ctx.zero
        return cls.trusted(ctx, n, n, [one if i == j else zero for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, ctx, rows: int, cols: int | None = None) -> "ExactMatrix":
        cols = rows if cols is None else cols
        return cls.trusted(ctx, rows, cols, [ctx.zero] * (rows * cols))

    @classmethod
    def ones(cls, ctx, rows: int, cols: int | None = None) -> "ExactMatrix":
        cols = rows if cols is None else cols
        return cls.trusted(ctx, rows, cols, [ctx.one] * (rows * cols))

    @classmethod
    def block(cls, blocks) -> "ExactMatrix":
        """Assemble from a 2-D list of matrices with compatible shapes."""
        ctx = blocks[0][0].ctx
        out = []
        for brow in blocks:
            h = brow[0].rows
            for b in brow:
                if b.rows != h:
                    raise MatrixError("block heights differ")
                if b.ctx != ctx:
                    raise MatrixError("blocks live over different fields")
            for i in range(h):
                row = []
                for b in brow:
                    row.extend(b.row(i))
                out.append(row)
        ncols = len(out[0]) if out else 0
        if any(len(r) != ncols for r in out):
            raise MatrixError("block widths differ")
        return cls.trusted(ctx, len(out), ncols, [x for r in out for x in r])

    # access -----------------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self) -> list:
        return [self.row(i) for i in range(self.rows)]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.ctx == other.ctx and self.shape == other.shape
                and all(a == b for a, b in zip(self.entries, other.entries)))

    def __hash__(self):
        return hash((self.ctx, self.rows, self.cols))

    # arithmetic -------------------------------------------------------------
    def _check(self, other):
        if self.ctx != other.ctx:
            raise MatrixError(f"field mismatch: {self.ctx} vs {other.ctx}")

    def __add__(self, other):
        self._check(other)
        if self.shape != other.shape:
            raise MatrixError("shape mismatch")
        return ExactMatrix.trusted(self.ctx, self.rows, self.cols,
                                   [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check(other)
        if self.shape != other.shape:
            raise MatrixError("shape mismatch")
        return ExactMatrix.trusted(self.ctx, self.rows, self.cols,
                                   [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, c) -> "ExactMatrix":
        c = self.ctx(c)
        return ExactMatrix.trusted(self.ctx, self.rows, self.cols, [c * a for a in self.entries])

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise MatrixError("shape mismatch in product")
        cols_b = [other.column(j) for j in range(other.cols)]
        zero = self.ctx.zero
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for cb in cols_b:
                acc = zero
                for a, b in zip(r, cb):
                    if a and b:
                        acc = acc + a * b
                out.append(acc)
        return ExactMatrix.trusted(self.ctx, self.rows, other.cols, out)

    def column(self, j: int) -> list:
        return list(self.entries[j::self.cols]) if self.cols else []

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix.trusted(self.ctx, self.cols, self.rows,
                                   [self.entries[i * self.cols + j]
                                    for j in range(self.cols) for i in range(self.rows)])

    def shift_diagonal(self, lam) -> "ExactMatrix":
        """M - lam*I."""
        if not self.is_square:
            raise MatrixError("square matrix required")
        lam = self.ctx(lam)
        e = list(self.entries)
        for i in range(self.rows):
            e[i * self.cols + i] = e[i * self.cols + i] - lam
        return ExactMatrix.trusted(self.ctx, self.rows, self.cols, e)

    # structure --------------------------------------------------------------
    def submatrix(self, rows, cols) -> "ExactMatrix":
        rows, cols = list(rows), list(cols)
        return ExactMatrix.trusted(self.ctx, len(rows), len(cols),
                                   [self.entries[i * self.cols + j] for i in rows for j in cols])

    def principal(self, n: int) -> "ExactMatrix":
        """Leading principal n x n submatrix."""
        if n > min(self.rows, self.cols):
            raise MatrixError(f"cannot take a {n}x{n} principal part of a {self.rows}x{self.cols} matrix")
        return self.submatrix(range(n), range(n))

    def augment_ones(self) -> "ExactMatrix":
        """(M | 1): append an all-ones column."""
        one = self.ctx.one
        e = []
        for i in range(self.rows):
            e.extend(self.row(i))
            e.append(one)
        return ExactMatrix.trusted(self.ctx, self.rows, self.cols + 1, e)

    def over(self, ctx) -> "ExactMatrix":
        """Reinterpret entries in another field (e.g. reduce integers mod p)."""
        ctx = field_make(ctx)
        src = self.ctx
        if src.kind == "numberfield":
            conv = []
            for x in self.entries:
                if not x.is_rational():
                    raise FieldError(f"{src.fmt(x)} is not rational")
                conv.append(ctx(x.c[0]))
            return ExactMatrix.trusted(ctx, self.rows, self.cols, conv)
        if src.kind == "prime":
            return ExactMatrix(ctx, self.rows, self.cols, tuple(x.v for x in self.entries))
        return ExactMatrix(ctx, self.rows, self.cols, self.entries)

    def is_symmetric(self) -> bool:
        if not self.is_square:
            return False
        n = self.rows
        e = self.entries
        return all(e[i * n + j] == e[j * n + i] for i in range(n) for j in range(i + 1, n))

    def diagonal(self) -> list:
        return [self.entries[i * self.cols + i] for i in range(min(self.rows, self.cols))]

    def off_diagonal(self):
        n = self.cols
        for i in range(self.rows):
            for j in range(n):
                if i != j:
                    yield (i, j), self.entries[i * n + j]

    def histogram(self, off_diagonal_only: bool = True) -> Counter:
        if off_diagonal_only:
            return Counter(v for _, v in self.off_diagonal())
        return Counter(self.entries)

    def lmatrix_violations(self, L, diagonal=0) -> list:
        """Cells breaking the L-matrix property: wrong diagonal or off-diagonal entry outside L."""
        if not self.is_square:
            return [("shape", self.rows, self.cols)]
        Ls = {self.ctx(a) for a in L}
        diag = self.ctx(diagonal)
        bad = []
        n = self.cols
        for i in range(self.rows):
            for j in range(n):
                v = self.entries[i * n + j]
                if (i == j and v != diag) or (i != j and v not in Ls):
                    bad.append((i, j))
        return bad

    def is_lmatrix(self, L, diagonal=0) -> bool:
        return not self.lmatrix_violations(L, diagonal)

    # serialization -----------------------------------------------------------
    def to_json_obj(self, claims: dict | None = None) -> dict:
        obj = {
            "field": self.ctx.descriptor,
            "rows": self.rows,
            "cols": self.cols,
            "entries": [self.ctx.fmt(x) for x in self.entries],
        }
        if claims:
            obj["claims"] = claims
        return obj

    def to_json(self, claims: dict | None = None) -> str:
        return json.dumps(self.to_json_obj(claims), separators=(",", ":"), sort_keys=False) + "\n"

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ExactMatrix":
        for key in ("field", "rows", "cols", "entries"):
            if key not in obj:
                raise MatrixError(f"matrix JSON lacks {key!r}")
        ctx = field_make(obj["field"])
        rows, cols = obj["rows"], obj["cols"]
        if not isinstance(rows, int) or not isinstance(cols, int):
            raise MatrixError("rows/cols must be integers")
        ents = obj["entries"]
        if not isinstance(ents, list) or not all(isinstance(x, str) for x in ents):
            raise MatrixError("entries must be a list of strings")
        return cls(ctx, rows, cols, tuple(ctx.parse(x) for x in ents))

    @classmethod
    def from_json(cls, text: str) -> "ExactMatrix":
        return cls.from_json_obj(json.loads(text))

