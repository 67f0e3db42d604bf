"""Analysis report bundle and its lossless JSON encoding.

Rationals are encoded as decimal-free "p/q" strings (big integers never as
native JSON numbers); infinity is the string "inf". Reports round-trip
byte-identically: encoding is sorted-key JSON written atomically.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Mapping

from .gaps import Gap, GapChain, PorosityEstimate
from .metrics import PorosityCertificate, TruncatedSequence
from .rational import Q, parse_rational


def encode_value(value: Any) -> Any:
    if value is None or isinstance(value, (str, bool, int)):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        raise TypeError(f"refusing to encode non-exact float {value}")
    if isinstance(value, Q):
        return str(value)
    if isinstance(value, Mapping):
        return {str(k): encode_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode_value(v) for v in value]
    raise TypeError(f"cannot encode {type(value).__name__}")


def decode_rational(text: str | None) -> Q | float | None:
    if text is None:
        return None
    if text == "inf":
        return math.inf
    return parse_rational(text)


def gap_doc(gap: Gap) -> dict:
    return {"left": str(gap.left), "right": str(gap.right)}


def chain_doc(chain: GapChain) -> dict:
    return {
        "epsilon": str(chain.epsilon),
        "depth": chain.depth,
        "gaps": [gap_doc(g) for g in chain.gaps],
    }


def sequence_doc(seq: TruncatedSequence) -> dict:
    return {
        "values": [str(v) for v in seq.values],
        "source": seq.source,
        "rule": seq.rule_label,
    }


def certificate_doc(cert: PorosityCertificate) -> dict:
    doc: dict[str, Any] = {
        "verdict": cert.verdict,
        "depth": cert.depth,
        "epsilon": str(cert.epsilon),
        "trivial_branch": cert.trivial_branch,
    }
    if cert.universal is not None:
        doc["universal_chain"] = chain_doc(cert.universal)
    if cert.M_value is not None:
        doc["M"] = {"value": str(cert.M_value), "converged": bool(cert.M_converged)}
    if cert.C_E_value is not None:
        doc["C_E"] = str(cert.C_E_value)
    if cert.witness_tau is not None:
        doc["witness_tau"] = sequence_doc(cert.witness_tau)
    if cert.defeats:
        doc["defeats"] = [
            {
                "k": str(d.k),
                "K": str(d.K),
                "violations": [
                    {"index": v.index, "point": str(v.point)} for v in d.violations
                ],
            }
            for d in cert.defeats
        ]
    if cert.reason is not None:
        doc["reason"] = cert.reason
    return doc


def porosity_doc(estimate: PorosityEstimate) -> dict:
    return {
        "p_plus": str(estimate.estimate),
        "converged": estimate.converged,
        "partial": estimate.partial,
        "witness_h": str(estimate.witness_h),
    }


@dataclass(frozen=True)
class AnalysisReport:
    """Everything one run computed, with flags on every estimate."""

    set_spec: dict
    parameters: dict
    porosity: dict | None = None
    csp: dict | None = None
    quantities: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    timings: dict | None = None

    def to_json(self) -> dict:
        doc: dict[str, Any] = {
            "set_spec": self.set_spec,
            "parameters": encode_value(self.parameters),
            "quantities": encode_value(self.quantities),
            "witnesses": encode_value(self.witnesses),
        }
        if self.porosity is not None:
            doc["porosity"] = encode_value(self.porosity)
        if self.csp is not None:
            doc["csp"] = encode_value(self.csp)
        if self.timings is not None:
            doc["timings"] = self.timings
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, doc: Mapping) -> "AnalysisReport":
        return cls(
            set_spec=dict(doc["set_spec"]),
            parameters=dict(doc["parameters"]),
            porosity=dict(doc["porosity"]) if "porosity" in doc else None,
            csp=dict(doc["csp"]) if "csp" in doc else None,
            quantities=dict(doc.get("quantities", {})),
            witnesses=dict(doc.get("witnesses", {})),
            timings=dict(doc["timings"]) if "timings" in doc else None,
        )

    @classmethod
    def loads(cls, text: str) -> "AnalysisReport":
        return cls.from_json(json.loads(text))


def write_atomic(path: str, text: str) -> None:
    """Write via temp file + rename so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
