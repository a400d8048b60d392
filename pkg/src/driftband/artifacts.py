"""Self-describing JSON fit artifacts.

A saved fit carries everything the predict command needs: slopes, the
window plan, the baseline bounds, and any centering metadata from the
preprocessing step, plus the tool version and the fully resolved command
configuration. Serialization is canonical (sorted keys, fixed layout) so
identical fits produce identical bytes.
"""

from __future__ import annotations

import json

FORMAT_NAME = "driftband-fit"

_REQUIRED = ("format", "version", "feature_names", "beta", "bounds")


def fit_payload(
    *,
    version: str,
    response: str,
    feature_names,
    beta,
    plan,
    mu_lower: float,
    mu_upper: float,
    block_length: int | None,
    config: dict,
    centering: dict | None = None,
    stats: dict | None = None,
) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": version,
        "response": response,
        "feature_names": list(feature_names),
        "beta": [float(b) for b in beta],
        "window_plan": {
            "source": plan.source,
            "n0": plan.n0,
            "starts": [int(v) for v in plan.starts],
            "stops": [int(v) for v in plan.stops],
        },
        "bounds": {
            "mu_lower": float(mu_lower),
            "mu_upper": float(mu_upper),
            "block_length": block_length,
        },
        "config": config,
        "centering": centering,
        "stats": stats,
    }


def save_fit_artifact(path, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def load_fit_artifact(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    missing = [k for k in _REQUIRED if k not in payload]
    if missing:
        raise ValueError(f"{path}: not a fit artifact (missing {missing})")
    if payload["format"] != FORMAT_NAME:
        raise ValueError(f"{path}: unexpected artifact format {payload['format']!r}")
    return payload
