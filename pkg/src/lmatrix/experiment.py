"""Growth-table experiments and independent verification of matrix files."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import jsonschema
import sympy

from .constructions import (
    ConstructionError,
    certify,
    construct_fivethirds,
    construct_square,
    construct_threehalves,
    construct_xy3,
)
from .fields import field_make
from .linalg import InvariantViolation, certified_rank, rank_bounds_modular
from .matrix import ExactMatrix, MatrixError
from .relations import LSet, RelationError, normalize_min_negatives, primitive_relation

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["construction", "primes"],
    "additionalProperties": False,
    "properties": {
        "construction": {"enum": ["square", "threehalves", "fivethirds", "xy3"]},
        "field": {"type": "string"},
        "L": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "relation": {"type": "array", "items": {"type": "integer"}},
        "x": {"type": "string"},
        "y": {"type": "string"},
        "primes": {
            "oneOf": [
                {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
                {"type": "object", "required": ["start", "stop"], "additionalProperties": False,
                 "properties": {"start": {"type": "integer"}, "stop": {"type": "integer"}}},
            ]
        },
        "seed": {"type": "integer"},
        "out_dir": {"type": "string"},
        "csv": {"type": "string"},
        "cert": {"enum": ["exact", "modular", "bound"]},
        "cert_primes": {"type": "array", "items": {"type": "integer", "minimum": 2}},
    },
    "allOf": [
        {"if": {"properties": {"construction": {"const": "fivethirds"}}},
         "then": {"required": ["seed"]}},
        {"if": {"properties": {"construction": {"const": "xy3"}}},
         "then": {"required": ["x", "y"]}, "else": {"required": ["L"]}},
    ],
}

MATRIX_SCHEMA = {
    "type": "object",
    "required": ["field", "rows", "cols", "entries"],
    "properties": {
        "field": {"type": "string"},
        "rows": {"type": "integer", "minimum": 0},
        "cols": {"type": "integer", "minimum": 0},
        "entries": {"type": "array", "items": {"type": "string"}},
        "claims": {
            "type": "object",
            "properties": {
                "L": {"type": "array", "items": {"type": "string"}},
                "diagonal": {"type": "string"},
                "symmetric": {"type": "boolean"},
                "rank_upper": {"type": "integer"},
                "rank": {"type": "integer"},
                "rank_lower": {"type": "integer"},
            },
        },
    },
}


EXACT_VERIFY_LIMIT = 1500


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    construction: str
    primes: list
    field: str = "QQ"
    L: list = dc_field(default_factory=list)
    relation: list | None = None
    x: str | None = None
    y: str | None = None
    seed: int | None = None
    out_dir: str | None = None
    csv: str | None = None
    cert: str = "exact"
    cert_primes: list = dc_field(default_factory=lambda: [1000003, 1000033])

    @classmethod
    def from_obj(cls, obj: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(obj, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(map(str, exc.absolute_path)) or "<root>"
            raise ConfigError(f"config invalid at {where}: {exc.message}") from None
        obj = dict(obj)
        pr = obj.pop("primes")
        if isinstance(pr, dict):
            pr = [p for p in range(pr["start"], pr["stop"] + 1) if sympy.isprime(p)]
        bad = [p for p in pr if not sympy.isprime(p)]
        if bad:
            raise ConfigError(f"not prime: {bad}")
        if not pr:
            raise ConfigError("no primes in range")
        return cls(primes=sorted(set(pr)), **obj)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not JSON ({exc})") from None
        return cls.from_obj(obj)


@dataclass
class GrowthRow:
    q: int
    size: int
    rank_upper: int
    rank_certified_lower: int
    rank_certified_exact: int | None = None

    @property
    def ratio(self) -> float:
        """size / rank, using the exact rank when known and the upper bound otherwise."""
        r = self.rank_certified_exact if self.rank_certified_exact is not None else self.rank_upper
        return self.size / r if r else float("inf")


COLUMNS = ["q", "size", "rank_upper", "rank_certified_lower", "rank_certified_exact", "ratio"]


@dataclass
class GrowthTable:
    rows: list = dc_field(default_factory=list)
    failures: list = dc_field(default_factory=list)  # (q, message)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, row: GrowthRow) -> None:
        self.rows.append(row)
        self.rows.sort(key=lambda r: r.q)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            exact = "" if r.rank_certified_exact is None else r.rank_certified_exact
            w.writerow([r.q, r.size, r.rank_upper, r.rank_certified_lower, exact, f"{r.ratio:.6f}"])
        return buf.getvalue()


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _build(cfg: ExperimentConfig, q: int):
    ctx = field_make(cfg.field)
    cert = "bound" if cfg.cert == "modular" else cfg.cert
    if cfg.construction == "xy3":
        return construct_xy3(ctx.parse(cfg.x), ctx.parse(cfg.y), q, ctx, cert=cert)
    L = LSet(ctx, tuple(ctx.parse(s) for s in cfg.L))
    A = cfg.relation
    if A is None:
        res = primitive_relation(L)
        if not res.exists:
            raise RelationError(f"L has no primitive relation (certificate {res.certificate})")
        A = res.relation.A
        if cfg.construction == "square" and len(res.relation.negatives) > 1 and L.is_integral():
            A = normalize_min_negatives(res.relation).A
    if cfg.construction == "square":
        return construct_square(L, A, q, cert=cert)
    if cfg.construction == "threehalves":
        return construct_threehalves(L, A, q, cert=cert)
    return construct_fivethirds(L, A, q, seed=cfg.seed, cert=cert)


def report_claims(rep) -> dict:
    ctx = rep.matrix.ctx
    claims = {
        "L": rep.declared_L.strings(),
        "diagonal": ctx.fmt(rep.lam),
        "symmetric": True,
        "rank_upper": rep.rank_upper,
    }
    if rep.rank_certified is not None:
        claims["rank"] = rep.rank_certified.rank
    elif rep.bounds is not None:
        claims["rank_lower"] = rep.bounds.lower
    return claims


def run_experiment(cfg: ExperimentConfig) -> GrowthTable:
    """Construct, verify and certify for each q; write artifacts if ``out_dir`` is set."""
    table = GrowthTable()
    out = Path(cfg.out_dir) if cfg.out_dir else None
    for q in cfg.primes:
        try:
            rep = _build(cfg, q)
            if cfg.cert == "modular":
                certify(rep, "modular", cfg.cert_primes)
            rep.verify()
        except (ConstructionError, InvariantViolation, RelationError, MatrixError) as exc:
            table.failures.append((q, f"{type(exc).__name__}: {exc}"))
            continue
        exact = rep.rank_certified.rank if rep.rank_certified else None
        lower = exact if exact is not None else (rep.bounds.lower if rep.bounds else 0)
        table.add(GrowthRow(q, rep.size, rep.rank_upper, lower, exact))
        if out is not None:
            atomic_write(out / f"{cfg.construction}_q{q}.json", rep.matrix.to_json(report_claims(rep)))
            atomic_write(out / f"{cfg.construction}_q{q}.report.json",
                         json.dumps(rep.summary(), indent=2) + "\n")
    if out is not None:
        atomic_write(out / (cfg.csv or f"{cfg.construction}_growth.csv"), table.to_csv())
        summary = {"ok": table.ok, "failures": [{"q": q, "error": m} for q, m in table.failures]}
        atomic_write(out / f"{cfg.construction}_summary.json", json.dumps(summary, indent=2) + "\n")
    return table


# --------------------------------------------------------------------------
# verification of stored matrices
# --------------------------------------------------------------------------

@dataclass
class VerifyReport:
    ok: bool
    checks: dict = dc_field(default_factory=dict)
    failures: list = dc_field(default_factory=list)  # human-readable, cells as (row,col)

    def to_obj(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "failures": self.failures}


def verify_obj(obj: dict, primes=(1000003, 1000033)) -> VerifyReport:
    try:
        jsonschema.validate(obj, MATRIX_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        return VerifyReport(False, {"schema": False}, [f"schema: {where}: {exc.message}"])
    try:
        M = ExactMatrix.from_json_obj(obj)
    except (MatrixError, ValueError) as exc:
        return VerifyReport(False, {"schema": False}, [f"parse: {exc}"])
    ctx = M.ctx
    rep = VerifyReport(True, {"schema": True})
    claims = obj.get("claims", {})
    n = M.rows
    if "L" in claims or "diagonal" in claims:
        if not M.is_square:
            rep.failures.append("claims need a square matrix")
        else:
            Ls = {ctx.parse(s) for s in claims.get("L", [])}
            diag = ctx.parse(claims.get("diagonal", "0"))
            bad_diag = [(i, i) for i in range(n) if M[i, i] != diag]
            bad_off = []
            if "L" in claims:
                bad_off = [(i, j) for i in range(n) for j in range(n) if i != j and M[i, j] not in Ls]
            rep.checks["diagonal"] = not bad_diag
            rep.checks["L"] = not bad_off
            for i, j in bad_diag:
                rep.failures.append(f"diagonal ({i},{j}) = {ctx.fmt(M[i, j])}, claimed {ctx.fmt(diag)}")
            for i, j in bad_off:
                rep.failures.append(f"entry ({i},{j}) = {ctx.fmt(M[i, j])} not in L")
    if claims.get("symmetric"):
        asym = [(i, j) for i in range(n) for j in range(i + 1, n) if M[i, j] != M[j, i]]
        rep.checks["symmetric"] = not asym
        for i, j in asym:
            rep.failures.append(f"asymmetric at ({i},{j})")
    if any(k in claims for k in ("rank", "rank_upper", "rank_lower")) and n:
        cert = certified_rank(M) if n * ctx.degree <= EXACT_VERIFY_LIMIT else None
        if cert is not None and cert.rank is not None:
            lo = hi = cert.rank
            rep.checks["rank_method"] = "exact"
        else:
            b = rank_bounds_modular(M, primes)
            lo, hi = b.lower, None
            rep.checks["rank_method"] = "modular"
        rep.checks["rank_lower"] = lo
        if "rank" in claims and hi is not None and claims["rank"] != hi:
            rep.failures.append(f"rank is {hi}, claimed {claims['rank']}")
        if "rank" in claims and hi is None and lo > claims["rank"]:
            rep.failures.append(f"rank is at least {lo}, claimed {claims['rank']}")
        if "rank_upper" in claims and lo > claims["rank_upper"]:
            rep.failures.append(f"rank {lo} exceeds the claimed bound {claims['rank_upper']}")
        if "rank_lower" in claims and hi is not None and hi < claims["rank_lower"]:
            rep.failures.append(f"rank {hi} is below the claimed lower bound {claims['rank_lower']}")
    rep.ok = not rep.failures
    return rep


def verify_file(path) -> VerifyReport:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        return VerifyReport(False, {"schema": False}, [f"not JSON: {exc}"])
    return verify_obj(obj)
