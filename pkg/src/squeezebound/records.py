"""Line-delimited JSON result files.

The first line is a header ``{"record": "header", "config": ..., "config_hash": ...,
"timestamp": ...}``; every later line is one result record.  Floats are written
with round-trip precision, complex numbers as ``[re, im]`` and NaN as ``null``.
"""
from __future__ import annotations

import datetime as _dt
import hashlib
import json
import math
import os
from typing import Iterable, List, Tuple

import numpy as np

from .discs import AnalyticDisc
from .hermitian import HermitianPolynomial
from .kobayashi import CertificateRecord, IndicatrixData, MetricEstimate
from .normal_form import NORMALIZED, NormalFormResult, detect_model_type
from .specfile import format_rho
from .squeezing import SqueezingBound


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _num(x):
    x = float(x)
    return None if math.isnan(x) else x


def encode_vector(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def decode_vector(data) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data], dtype=complex)


def disc_to_dict(disc: AnalyticDisc) -> dict:
    return {"basepoint": encode_vector(disc.basepoint),
            "coefficients": [encode_vector(c) for c in disc.coefficients]}


def disc_from_dict(data: dict) -> AnalyticDisc:
    return AnalyticDisc(decode_vector(data["basepoint"]),
                        np.array([decode_vector(c) for c in data["coefficients"]]))


def polynomial_to_dict(p: HermitianPolynomial) -> list:
    return [[list(a), list(b), float(c.real), float(c.imag)] for (a, b), c in p.sorted_terms()]


def estimate_to_dict(est: MetricEstimate, family_tag: str = "") -> dict:
    out = {"record": "metric_estimate", "domain": family_tag,
           "p": encode_vector(est.basepoint), "zeta": encode_vector(est.direction),
           "kind": est.kind, "value": _num(est.value),
           "witness": None if est.witness is None else disc_to_dict(est.witness),
           "config_hash": est.config_hash, "seed": est.seed, "certificate": None}
    if est.certificate is not None:
        c = est.certificate
        out["certificate"] = {"k": c.k, "delta": c.delta, "constant": c.constant,
                              "exponent": c.exponent, "variant": c.variant,
                              "delta_cap": c.delta_cap, "derivation": c.derivation}
    return out


def estimate_from_dict(data: dict) -> MetricEstimate:
    cert = None
    if data.get("certificate"):
        cert = CertificateRecord(**data["certificate"])
    witness = disc_from_dict(data["witness"]) if data.get("witness") else None
    return MetricEstimate(decode_vector(data["p"]), decode_vector(data["zeta"]), data["value"],
                          data["kind"], witness, cert, data.get("config_hash"), data.get("seed"))


def indicatrix_to_dict(ind: IndicatrixData, family_tag: str = "") -> dict:
    return {"record": "indicatrix", "domain": family_tag, "p": encode_vector(ind.basepoint),
            "entries": [{"direction": encode_vector(e.direction), "r_lo": e.r_lo, "r_hi": e.r_hi,
                         "upper": estimate_to_dict(e.upper, family_tag),
                         "lower": estimate_to_dict(e.lower, family_tag)} for e in ind.entries]}


def squeezing_to_dict(b: SqueezingBound, family_tag: str = "") -> dict:
    return {"record": "squeezing_bound", "domain": family_tag, "mode": b.mode,
            "p": encode_vector(b.basepoint), "delta": b.delta,
            "zeta1": encode_vector(b.zeta1), "zeta2": encode_vector(b.zeta2),
            "lambda": _num(b.lam), "r_d": _num(b.r_d), "epsilon": _num(b.epsilon),
            "bound": b.bound, "diagnostic": b.diagnostic,
            "trace": [estimate_to_dict(m, family_tag) for m in b.trace]}


def normal_form_to_dict(res: NormalFormResult) -> dict:
    log = []
    for entry in res.transform_log:
        item = {"kind": entry["kind"]}
        for key, val in entry.items():
            if key == "kind":
                continue
            if isinstance(val, HermitianPolynomial):
                item[key] = polynomial_to_dict(val)
            else:
                item[key] = [float(complex(val).real), float(complex(val).imag)]
        log.append(item)
    d = detect_model_type(res) if res.status == NORMALIZED else None
    return {"record": "normal_form", "status": res.status, "k": res.k, "d": d,
            "degrees": res.degrees(), "rho": format_rho(res.jet.to_hermitian()),
            "P": polynomial_to_dict(res.P), "Q": polynomial_to_dict(res.Q),
            "R": polynomial_to_dict(res.R),
            "violation": None if res.violation is None else polynomial_to_dict(res.violation),
            "transform_log": log}


def header(config: dict, deterministic: bool = False) -> dict:
    out = {"record": "header", "config": config, "config_hash": config_hash(config)}
    if not deterministic:
        out["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return out


def dumps(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, allow_nan=False) + "\n" for r in records)


def write_results(path: str, config: dict, records: Iterable[dict], deterministic: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps([header(config, deterministic), *records]))


def read_results(path: str) -> Tuple[dict, List[dict]]:
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or lines[0].get("record") != "header":
        raise ValueError(f"{path}: missing header record")
    return lines[0], lines[1:]


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def verify_file(path: str) -> bool:
    """Recompute the header's config hash and the digest of a companion CSV table."""
    head, _ = read_results(path)
    config = head.get("config", {})
    if head.get("config_hash") != config_hash(config):
        return False
    digest = config.get("extra", {}).get("csv_sha256")
    if digest is None:
        return True
    csv_path = os.path.join(os.path.dirname(path), os.path.basename(path)[:-len(".jsonl")] + ".csv")
    try:
        with open(csv_path, encoding="utf-8") as fh:
            return text_digest(fh.read()) == digest
    except OSError:
        return False
