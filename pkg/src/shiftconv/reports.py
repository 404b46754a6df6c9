"""Machine-readable run records: JSON documents, CSV summaries and run manifests.

Numbers are never written as binary floats.  Each one becomes an object
holding a decimal string and the count of significant digits it carries;
exact rationals also keep their ``p/q`` form.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__

__all__ = [
    "FORMAT_VERSION",
    "IdentityReport",
    "RunManifest",
    "encode_number",
    "decode_number",
    "report_document",
    "to_json",
    "to_csv",
    "write_atomic",
    "schema",
    "CSV_FIELDS",
]

FORMAT_VERSION = 1
FLOAT_DIGITS = 17


def encode_number(x, digits: int):
    """JSON-safe encoding of an int, Fraction, float, mpmath or complex value."""
    if x is None:
        return None
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Fraction)):
        q = Fraction(x)
        with mpmath.workdps(digits + 5):
            dec = mpmath.nstr(mpmath.mpf(q.numerator) / q.denominator, digits)
        return {"rational": str(q), "decimal": dec, "digits": digits}
    if isinstance(x, float):
        return {"decimal": repr(x), "digits": FLOAT_DIGITS}
    if isinstance(x, complex):
        if x.imag == 0:
            return encode_number(x.real, digits)
        return {"re": repr(x.real), "im": repr(x.imag), "digits": FLOAT_DIGITS}
    if isinstance(x, mpmath.mpc):
        if x.imag == 0:
            return encode_number(x.real, digits)
        return {"re": mpmath.nstr(x.real, digits), "im": mpmath.nstr(x.imag, digits), "digits": digits}
    if isinstance(x, mpmath.mpf):
        return {"decimal": mpmath.nstr(x, digits), "digits": digits}
    if hasattr(x, "item"):  # numpy scalar
        return encode_number(x.item(), digits)
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode_number(obj):
    """Inverse of :func:`encode_number` (floats come back as mpmath values)."""
    if obj is None:
        return None
    if "rational" in obj:
        return Fraction(obj["rational"])
    with mpmath.workdps(obj["digits"] + 5):
        if "re" in obj:
            return mpmath.mpc(mpmath.mpf(obj["re"]), mpmath.mpf(obj["im"]))
        return mpmath.mpf(obj["decimal"])


def _flat(x):
    # plain-text form for CSV cells
    if x is None:
        return ""
    if "rational" in x:
        return x["rational"]
    if "re" in x:
        return f"{x['re']}{'' if x['im'].startswith('-') else '+'}{x['im']}j"
    return x["decimal"]


@dataclass
class RunManifest:
    """Everything needed to repeat a run: the argument vector plus the resolved parameters."""

    command: str
    argv: list
    parameters: dict
    precision: int
    ladder: list = field(default_factory=list)
    seed: int | None = None
    version: str = __version__
    timestamp: str = ""

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        return cls(**d)


@dataclass
class IdentityReport:
    """One verification run: inputs, per-term values, truncation, both sides and the verdict."""

    kind: str  # eval-sum, eval-rhs, conjecture, family, self-test
    identity: str
    inputs: dict
    lhs: object = None
    rhs: object = None
    discrepancy: object = None
    error_bar: object = None
    tolerance: object = None
    verdict: str = ""
    terms: dict = field(default_factory=dict)
    ladder: list = field(default_factory=list)  # (N, partial sum)
    truncation: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @classmethod
    def from_conjecture(cls, rep, kind: str = "conjecture") -> "IdentityReport":
        inputs = {"n": rep.n, "r1": _param(rep.r1), "r2": _param(rep.r2)}
        if rep.degree is not None:
            inputs["degree"] = rep.degree
            inputs["sample"] = rep.sample
            inputs["coefficients"] = dict(rep.coefficients)
        trunc = {"points": [N for N, _ in rep.ladder]}
        if rep.decay_alpha is not None:
            trunc["decay_alpha"] = rep.decay_alpha
            trunc["decay_beta"] = rep.decay_beta
        return cls(
            kind=kind,
            identity=rep.identity,
            inputs=inputs,
            lhs=rep.lhs,
            rhs=rep.rhs,
            discrepancy=rep.discrepancy,
            error_bar=rep.error_bar if rep.lhs is not None else None,
            tolerance=rep.tolerance,
            verdict=rep.verdict,
            ladder=list(rep.ladder),
            truncation=trunc,
            notes=[rep.reason] if rep.reason else [],
        )

    def to_dict(self, digits: int) -> dict:
        enc = lambda x: encode_number(x, digits)  # noqa: E731
        return {
            "kind": self.kind,
            "identity": self.identity,
            "inputs": self.inputs,
            "lhs": enc(self.lhs),
            "rhs": enc(self.rhs),
            "discrepancy": enc(self.discrepancy),
            "error_bar": enc(_finite(self.error_bar)),
            "tolerance": enc(self.tolerance),
            "verdict": self.verdict,
            "terms": {k: enc(v) for k, v in self.terms.items()},
            "ladder": [{"N": int(N), "value": enc(v)} for N, v in self.ladder],
            "truncation": self.truncation,
            "notes": list(self.notes),
        }


def _finite(x):
    if isinstance(x, float) and x != x:
        return None
    if isinstance(x, float) and x in (float("inf"), float("-inf")):
        return None
    return x


def _param(x):
    if isinstance(x, (int, Fraction)):
        return str(x)
    return str(complex(x)) if complex(x).imag else repr(float(complex(x).real))


def report_document(reports, manifest: RunManifest, digits: int) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "manifest": manifest.to_dict(),
        "reports": [r.to_dict(digits) for r in reports],
    }


def to_json(reports, manifest: RunManifest, digits: int) -> str:
    return json.dumps(report_document(reports, manifest, digits), indent=2, sort_keys=False) + "\n"


CSV_FIELDS = [
    "kind",
    "identity",
    "inputs",
    "lhs",
    "rhs",
    "discrepancy",
    "error_bar",
    "tolerance",
    "verdict",
    "terms",
    "ladder",
    "truncation",
    "notes",
]


def to_csv(reports, digits: int) -> str:
    """One row per report; nested fields are written as compact JSON, numbers as decimal strings."""
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    wr.writeheader()
    for r in reports:
        d = r.to_dict(digits)
        row = {}
        for k in CSV_FIELDS:
            v = d[k]
            if k in ("lhs", "rhs", "discrepancy", "error_bar", "tolerance"):
                row[k] = _flat(v)
            elif isinstance(v, str):
                row[k] = v
            else:
                row[k] = json.dumps(v, separators=(",", ":"))
        wr.writerow(row)
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def schema() -> dict:
    """The JSON schema that every report document validates against."""
    path = Path(__file__).with_name("report.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))
