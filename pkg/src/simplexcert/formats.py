"""Model-spec and certificate documents.

Both are YAML, written line by line with numbers at 17 significant digits so
a parse/render cycle reproduces every float bit for bit.

A model spec looks like::

    alphabet: ["0", "1", "2"]
    kind: mixture-generators
    generators:
      - [1, 0, 0]
      - [0, 0.5, 0.5]
    box: [[-1, 1]]      # optional, default [-1, 1]^d
    count: 25           # optional
    seed: 0             # optional
    tolerances: {tol: 1e-8, tol_rank: 1e-9, autoparallel: 1e-4}   # optional

Kinds and their payload keys:

* ``mixture-generators``: ``generators`` (d+1 distributions)
* ``exponential``: ``C``, ``F``
* ``mixture``: ``C``, ``F``
* ``alpha``: ``alpha``, ``F`` (d+1 rows), optional ``center``
* ``samples``: ``dim``, ``samples``, optional ``parameters``
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from .alpha import AlphaSpec, ExponentialSpec, MixtureSpec, SampledModel
from .core import Alphabet, Channel, Dist, Partition
from .equivalence import Certificate, TheoremReport, simplex_model
from .errors import CertificationError, SimplexCertError

KINDS = ("mixture-generators", "exponential", "mixture", "alpha", "samples")
CERT_FORMAT = "simplexcert-certificate/1"
DIAG_FORMAT = "simplexcert-diagnostic/1"
REPORT_FORMAT = "simplexcert-report/1"
TOLERANCE_KEYS = ("tol", "tol_rank", "autoparallel")


class SpecParseError(SimplexCertError):
    """Malformed spec or certificate document; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.field = field


def num(x) -> str:
    x = float(x)
    if x == 0:
        return "0"
    if not np.isfinite(x):
        return ".nan" if np.isnan(x) else (".inf" if x > 0 else "-.inf")
    return "%.17g" % x


def row(values) -> str:
    return "[" + ", ".join(num(v) for v in values) + "]"


def _matrix(name, rows, indent=""):
    rows = list(rows)
    if not rows:
        return [f"{indent}{name}: []"]
    return [f"{indent}{name}:"] + [f"{indent}  - {row(r)}" for r in rows]


def _load(text):
    """Parse YAML; returns (data, {top-level key: 1-based line}, {key: line of each list item})."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise SpecParseError(str(getattr(exc, "problem", exc)), mark.line + 1 if mark else None) from None
    if not isinstance(data, dict):
        raise SpecParseError("document must be a mapping", 1)
    lines = {k.value: k.start_mark.line + 1 for k, _ in node.value}
    items = {
        k.value: [item.start_mark.line + 1 for item in v.value]
        for k, v in node.value
        if isinstance(v, yaml.SequenceNode)
    }
    return data, lines, items


class _Fields:
    def __init__(self, data, lines, items=None):
        self.data, self.lines, self.items = data, lines, items or {}

    def fail(self, key, message, row=None):
        line = self.lines.get(key)
        if row is not None and row < len(self.items.get(key, ())):
            line = self.items[key][row]
        raise SpecParseError(message, line, key)

    def has(self, key):
        return key in self.data

    def get(self, key, default=None):
        return self.data.get(key, default)

    def require(self, key):
        if key not in self.data:
            raise SpecParseError("missing required field", None, key)
        return self.data[key]

    def vector(self, key, n=None):
        try:
            v = np.asarray(self.require(key), dtype=float)
        except (TypeError, ValueError):
            self.fail(key, "expected a list of numbers")
        if v.ndim != 1 or (n is not None and v.shape[0] != n):
            self.fail(key, f"expected a list of {n} numbers" if n else "expected a flat list")
        return v

    def table(self, key, n=None, allow_empty=False):
        raw = self.require(key)
        if allow_empty and raw == []:
            return np.zeros((0, n or 0))
        if isinstance(raw, list) and n is not None:
            for i, r in enumerate(raw):
                if isinstance(r, list) and len(r) != n:
                    self.fail(key, f"row {i} has {len(r)} entries, expected {n}", row=i)
        try:
            t = np.asarray(raw, dtype=float)
        except (TypeError, ValueError):
            self.fail(key, "expected a list of rows of numbers")
        if t.ndim == 1 and n is not None and t.shape[0] == n:
            t = t[None, :]
        if t.ndim != 2 or (n is not None and t.shape[1] != n):
            self.fail(key, f"every row must have {n} entries" if n else "expected a table")
        return t


@dataclass
class ModelSpecFile:
    alphabet: Alphabet
    kind: str
    payload: dict
    box: Optional[list] = None
    count: Optional[int] = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0


def parse_spec(text: str) -> ModelSpecFile:
    f = _Fields(*_load(text))
    labels = f.require("alphabet")
    if isinstance(labels, int):
        labels = [str(i) for i in range(labels)]
    if not isinstance(labels, list) or not labels:
        f.fail("alphabet", "expected a nonempty list of labels or a size")
    try:
        alphabet = Alphabet.of(labels)
    except SimplexCertError as exc:
        f.fail("alphabet", str(exc))
    n = alphabet.size
    kind = f.require("kind")
    if kind not in KINDS:
        f.fail("kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")

    payload = {}
    if kind == "mixture-generators":
        payload["generators"] = f.table("generators", n)
    elif kind in ("exponential", "mixture"):
        payload["C"] = f.vector("C", n)
        payload["F"] = f.table("F", n, allow_empty=True)
    elif kind == "alpha":
        try:
            payload["alpha"] = float(f.require("alpha"))
        except (TypeError, ValueError):
            f.fail("alpha", "expected a number")
        payload["F"] = f.table("F", n)
        if f.has("center"):
            payload["center"] = f.vector("center", payload["F"].shape[0])
    else:
        dim = f.require("dim")
        if not isinstance(dim, int) or dim < 0:
            f.fail("dim", "expected a nonnegative integer")
        payload["dim"] = dim
        payload["samples"] = f.table("samples", n)
        if f.has("parameters"):
            payload["parameters"] = f.table("parameters", dim, allow_empty=dim == 0)

    box = None
    if f.has("box"):
        box = f.table("box", 2, allow_empty=True).tolist()
    count = f.get("count")
    if count is not None and (not isinstance(count, int) or count < 1):
        f.fail("count", "expected a positive integer")
    tolerances = f.get("tolerances", {}) or {}
    if not isinstance(tolerances, dict) or set(tolerances) - set(TOLERANCE_KEYS):
        f.fail("tolerances", f"expected a mapping with keys among {TOLERANCE_KEYS}")
    try:
        tolerances = {k: float(v) for k, v in tolerances.items()}
    except (TypeError, ValueError):
        f.fail("tolerances", "tolerances must be numbers")
    seed = f.get("seed", 0)
    if not isinstance(seed, int):
        f.fail("seed", "expected an integer")
    return ModelSpecFile(alphabet, kind, payload, box, count, tolerances, seed)


def load_spec(path) -> ModelSpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


@dataclass
class BuiltModel:
    model: SampledModel
    e_spec: Optional[ExponentialSpec] = None
    m_spec: Optional[MixtureSpec] = None


def build_model(spec: ModelSpecFile) -> BuiltModel:
    """Instantiate the sampled model (and declared family specs) a spec describes."""
    A, pl = spec.alphabet, spec.payload
    if spec.kind == "mixture-generators":
        qs = [Dist(A, q) for q in pl["generators"]]
        return BuiltModel(simplex_model(qs, spec.box, spec.count))
    if spec.kind == "exponential":
        e = ExponentialSpec(A, pl["C"], pl["F"])
        return BuiltModel(SampledModel.from_spec(e, spec.box, spec.count), e_spec=e)
    if spec.kind == "mixture":
        m = MixtureSpec(A, pl["C"], pl["F"])
        box = spec.box
        if box is None:
            box = [(-0.1, 0.1)] * m.dim
        return BuiltModel(SampledModel.from_spec(m, box, spec.count), m_spec=m)
    if spec.kind == "alpha":
        a = AlphaSpec(pl["alpha"], A, pl["F"], pl.get("center"))
        box = spec.box
        if box is None:
            box = [(-0.1, 0.1)] * a.dim
        return BuiltModel(SampledModel.from_spec(a, box, spec.count))
    samples = pl["samples"]
    params = pl.get("parameters")
    if params is None:
        params = np.zeros((samples.shape[0], pl["dim"]))
    return BuiltModel(SampledModel(A, pl["dim"], samples, params))


# --- certificates ---------------------------------------------------------------


def render_certificate(cert: Certificate, tool_version: str) -> str:
    out = [
        f"format: {CERT_FORMAT}",
        f"tool_version: {json.dumps(tool_version)}",
        f"seed: {cert.seed}",
        "alphabet: [" + ", ".join(json.dumps(s) for s in cert.alphabet.labels) + "]",
        "partition:",
    ]
    out += ["  - [" + ", ".join(str(x) for x in b) + "]" for b in cert.partition.blocks]
    out += _matrix("generators", (q.weights for q in cert.generators))
    out.append(f"base_point: {row(cert.base_point.weights)}")
    out += _matrix("V", cert.embedding.kernel)
    out += _matrix("W", cert.left_inverse.kernel)
    out.append("residuals:")
    out += [f"  {k}: {num(v)}" for k, v in cert.residuals.items()]
    return "\n".join(out) + "\n"


def parse_certificate(text: str) -> Certificate:
    f = _Fields(*_load(text))
    if f.get("format") != CERT_FORMAT:
        f.fail("format", f"expected {CERT_FORMAT!r}")
    try:
        alphabet = Alphabet.of(f.require("alphabet"))
        n = alphabet.size
        blocks = f.require("partition")
        P = Partition(alphabet, [tuple(b) for b in blocks])
        d1 = len(P)
        gens = f.table("generators", n)
        qs = tuple(Dist(alphabet, q) for q in gens)
        base = Dist(alphabet, f.vector("base_point", n))
        V = Channel(Alphabet(d1), alphabet, f.table("V", d1))
        W = Channel(alphabet, Alphabet(d1), f.table("W", n))
    except SpecParseError:
        raise
    except (SimplexCertError, TypeError, ValueError) as exc:
        raise SpecParseError(f"invalid certificate: {exc}") from None
    residuals = {str(k): float(v) for k, v in (f.get("residuals") or {}).items()}
    return Certificate(P, qs, V, W, base, residuals, int(f.get("seed", 0)))


def certificates_equal(a: Certificate, b: Certificate) -> bool:
    """Field-for-field, bit-exact equality."""
    same = (
        a.alphabet == b.alphabet
        and a.partition == b.partition
        and a.seed == b.seed
        and len(a.generators) == len(b.generators)
        and a.residuals == b.residuals
    )
    arrays = [
        (a.base_point.weights, b.base_point.weights),
        (a.embedding.kernel, b.embedding.kernel),
        (a.left_inverse.kernel, b.left_inverse.kernel),
    ] + [(p.weights, q.weights) for p, q in zip(a.generators, b.generators)]
    return bool(same and all(x.shape == y.shape and np.array_equal(x, y) for x, y in arrays))


def render_diagnostic(exc: CertificationError, tool_version: str) -> str:
    out = [
        f"format: {DIAG_FORMAT}",
        f"tool_version: {json.dumps(tool_version)}",
        "status: failed",
        f"stage: {exc.stage}",
        f"message: {json.dumps(str(exc))}",
    ]
    if exc.residual is not None:
        out.append(f"residual: {num(exc.residual)}")
    if exc.witness is not None:
        out += _matrix("witness", exc.witness)
    return "\n".join(out) + "\n"


def render_report(report: TheoremReport, tool_version: str) -> str:
    out = [
        f"format: {REPORT_FORMAT}",
        f"tool_version: {json.dumps(tool_version)}",
        "conditions: {" + ", ".join(f"{k}: {str(v).lower()}" for k, v in report.conditions.items()) + "}",
        f"consistent: {str(report.consistent).lower()}",
        "alpha:",
    ]
    for a in report.alpha_grid:
        v = report.family[a]
        line = (
            f"  - {{alpha: {num(a)}, family: {str(v.is_family).lower()}, "
            f"dimension: {v.dimension}, residual: {num(v.max_residual)}"
        )
        if report.autoparallel is not None:
            ap = report.autoparallel[a]
            line += f", autoparallel: {str(ap.verdict).lower()}, normal: {num(ap.max_normal_component)}"
        out.append(line + "}")
    if report.failure is not None:
        out.append(f"failure: {{stage: {report.failure.stage}, message: {json.dumps(str(report.failure))}}}")
    out.append("faults: [" + ", ".join(json.dumps(s) for s in report.faults) + "]")
    return "\n".join(out) + "\n"
