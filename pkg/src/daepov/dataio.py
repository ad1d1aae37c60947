"""File formats: measurement CSV, system/config JSON, report JSON.

This module owns every on-disk schema. All serialization is deterministic
(stable key order, shortest round-trip float formatting) and round-trips
exactly; infinite condition numbers are encoded as the string ``"inf"``
because JSON has no infinity literal.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .dipca import NoiseModel
from .errors import ParseError, SchemaVersionError
from .mc import ErrorTable, McConfig
from .pipeline import DiscoverOptions, DiscoveryReport
from .pov import PartitionResult, SourceReport
from .simulate import External, GaussianWhite, Prbs, SourceSignalSpec, Step
from .structure import StructureEstimate
from .sysmodel import Equation, GroundTruthPartition, LtiDaeSystem

SCHEMA_VERSION = 1

_SIGNAL_KINDS = {
    "gaussian": (GaussianWhite, ("mean", "variance")),
    "prbs": (Prbs, ("amplitude", "band")),
    "step": (Step, ("time", "height")),
    "external": (External, ("samples",)),
}


@dataclass(frozen=True)
class Dataset:
    """Named multivariate time series, one row per variable."""

    names: tuple[str, ...]
    data: np.ndarray
    provenance: dict | None = None


# ---------------------------------------------------------------------------
# measurement CSV


def read_csv(path) -> Dataset:
    """Read a column-per-variable CSV with a header row; reject non-finite cells."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        names = tuple(name.strip() for name in header)
        if not names or any(not n for n in names):
            raise ParseError(f"{path}: blank column name in header")
        columns: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(names):
                raise ParseError(
                    f"{path}: line {lineno} has {len(row)} cells, expected {len(names)}"
                )
            parsed = []
            for col, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: line {lineno}, column {col + 1}: not a number: {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise ParseError(
                        f"{path}: line {lineno}, column {col + 1}: non-finite value {cell!r}"
                    )
                parsed.append(value)
            columns.append(parsed)
    if not columns:
        raise ParseError(f"{path}: no data rows")
    return Dataset(names=names, data=np.asarray(columns, dtype=float).T)


def write_csv(dataset: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.names)
        for row in dataset.data.T:
            writer.writerow([repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# system / source configuration JSON


def _var_index(ref, variables, where):
    if isinstance(ref, str):
        try:
            return variables.index(ref)
        except ValueError:
            raise ParseError(f"{where}: unknown variable {ref!r}") from None
    idx = int(ref)
    if not 0 <= idx < len(variables):
        raise ParseError(f"{where}: variable index {idx} out of range")
    return idx


def system_from_dict(doc: dict) -> LtiDaeSystem:
    try:
        variables = tuple(str(v) for v in doc["variables"])
        raw_eqs = doc["equations"]
    except (KeyError, TypeError) as err:
        raise ParseError(f"system description missing field: {err}") from err
    equations = []
    for i, raw in enumerate(raw_eqs):
        where = f"equation {i}"
        try:
            kind = raw["kind"]
            output = _var_index(raw["output"], variables, where)
            terms = tuple(
                (
                    _var_index(t["var"], variables, where),
                    int(t["lag"]),
                    float(t["coeff"]),
                )
                for t in raw["terms"]
            )
        except (KeyError, TypeError, ValueError) as err:
            raise ParseError(f"{where}: {err}") from err
        equations.append(Equation(kind=kind, output=output, terms=terms))
    return LtiDaeSystem(variables=variables, equations=tuple(equations))


def system_to_dict(system: LtiDaeSystem, sources=None) -> dict:
    doc = {
        "variables": list(system.variables),
        "equations": [
            {
                "kind": eq.kind,
                "output": system.variables[eq.output],
                "terms": [
                    {"var": system.variables[v], "lag": lag, "coeff": coeff}
                    for v, lag, coeff in eq.terms
                ],
            }
            for eq in system.equations
        ],
    }
    if sources is not None:
        doc["sources"] = [
            {
                "variable": system.variables[s.variable],
                "signal": s.signal.to_dict(),
                **({"seed_offset": s.seed_offset} if s.seed_offset is not None else {}),
            }
            for s in sources
        ]
    return doc


def signal_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind not in _SIGNAL_KINDS:
        raise ParseError(f"unknown signal kind {kind!r}")
    cls, fields = _SIGNAL_KINDS[kind]
    try:
        return cls(**{f: doc[f] for f in fields if f in doc})
    except TypeError as err:
        raise ParseError(f"bad {kind} signal: {err}") from err


def sources_from_dict(doc: dict, system: LtiDaeSystem) -> list[SourceSignalSpec]:
    """Source specs from a system document; default every free variable to white noise."""
    raw = doc.get("sources")
    if raw is None:
        return [SourceSignalSpec(variable=v, signal=GaussianWhite()) for v in system.source_variables]
    specs = []
    for i, entry in enumerate(raw):
        where = f"source {i}"
        var = _var_index(entry.get("variable"), system.variables, where)
        signal = signal_from_dict(entry.get("signal", {"kind": "gaussian"}))
        offset = entry.get("seed_offset")
        specs.append(
            SourceSignalSpec(
                variable=var, signal=signal, seed_offset=None if offset is None else int(offset)
            )
        )
    return specs


def read_system(path) -> tuple[LtiDaeSystem, list[SourceSignalSpec]]:
    doc = _read_json(path)
    system = system_from_dict(doc)
    return system, sources_from_dict(doc, system)


def write_system(system: LtiDaeSystem, path, sources=None) -> None:
    _write_json(system_to_dict(system, sources=sources), path)


# ---------------------------------------------------------------------------
# discovery report JSON


def _encode_cond(value: float):
    return "inf" if math.isinf(value) else float(value)


def _decode_cond(value) -> float:
    return math.inf if value == "inf" else float(value)


def report_to_dict(report: DiscoveryReport) -> dict:
    names = report.names
    return {
        "schema_version": SCHEMA_VERSION,
        "names": list(names),
        "noise": {
            "sigmas": [float(s) for s in report.noise.sigmas],
            "d_used": report.noise.d_used,
            "iterations": report.noise.iterations,
            "converged": report.noise.converged,
            "lag": report.noise.lag,
        },
        "structure": {
            "n_a": report.structure.n_a,
            "n_d": report.structure.n_d,
            "n_s": report.structure.n_s,
            "d_at_lag": {str(k): v for k, v in sorted(report.structure.d_at_lag.items())},
            "lags": list(report.structure.lags),
        },
        "partitions": [
            {
                "dependent": [names[i] for i in p.dependent],
                "cond": _encode_cond(p.cond),
                "admissible": p.admissible,
                "free": [names[i] for i in p.free],
            }
            for p in report.partitions
        ],
        "sources": {
            "unambiguous": [names[i] for i in report.sources.unambiguous],
            "ambiguous": [names[i] for i in report.sources.ambiguous],
            "threshold": report.sources.threshold,
        },
        "options": report.options.to_dict(),
        "spectrum": [float(s) for s in report.spectrum],
    }


def report_from_dict(doc: dict) -> DiscoveryReport:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"report schema {version!r}, supported: {SCHEMA_VERSION}")
    names = tuple(doc["names"])
    index = {n: i for i, n in enumerate(names)}
    noise = NoiseModel(
        sigmas=np.asarray(doc["noise"]["sigmas"], dtype=float),
        d_used=int(doc["noise"]["d_used"]),
        iterations=int(doc["noise"]["iterations"]),
        converged=bool(doc["noise"]["converged"]),
        lag=int(doc["noise"]["lag"]),
    )
    st = doc["structure"]
    structure = StructureEstimate(
        n_a=int(st["n_a"]),
        n_d=int(st["n_d"]),
        n_s=int(st["n_s"]),
        d_at_lag={int(k): int(v) for k, v in st["d_at_lag"].items()},
        lags=tuple(int(v) for v in st["lags"]),
    )
    partitions = tuple(
        PartitionResult(
            dependent=tuple(index[n] for n in p["dependent"]),
            cond=_decode_cond(p["cond"]),
            admissible=bool(p["admissible"]),
            free=tuple(index[n] for n in p["free"]),
        )
        for p in doc["partitions"]
    )
    src = doc["sources"]
    sources = SourceReport(
        unambiguous=tuple(index[n] for n in src["unambiguous"]),
        ambiguous=tuple(index[n] for n in src["ambiguous"]),
        admissible=tuple(p for p in partitions if p.admissible),
        threshold=src["threshold"],
    )
    opts = doc["options"]
    options = DiscoverOptions(
        lag_max=int(opts["lag_max"]),
        lag2=None if opts["lag2"] is None else int(opts["lag2"]),
        threshold=float(opts["threshold"]),
        unity_ceiling=float(opts["unity_ceiling"]),
        center=bool(opts["center"]),
        max_combinations=int(opts["max_combinations"]),
    )
    return DiscoveryReport(
        names=names,
        noise=noise,
        structure=structure,
        partitions=partitions,
        sources=sources,
        options=options,
        spectrum=np.asarray(doc["spectrum"], dtype=float),
    )


def write_report(report: DiscoveryReport, path) -> None:
    _write_json(report_to_dict(report), path)


def read_report(path) -> DiscoveryReport:
    return report_from_dict(_read_json(path))


# ---------------------------------------------------------------------------
# simulation truth JSON


def truth_to_dict(system, measurement, partitions: list[GroundTruthPartition]) -> dict:
    names = system.variables
    return {
        "schema_version": SCHEMA_VERSION,
        "variables": list(names),
        "seed": measurement.seed,
        "snr": [float(v) for v in measurement.snr],
        "true_sigmas": [float(v) for v in measurement.true_sigmas],
        "partitions": [
            {
                "dependent": [names[i] for i in p.dependent],
                "rank": p.rank,
                "admissible": p.admissible,
                "free": [names[i] for i in p.free],
            }
            for p in partitions
        ],
    }


# ---------------------------------------------------------------------------
# noise model JSON


def noise_to_dict(noise: NoiseModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "sigmas": [float(s) for s in noise.sigmas],
        "d_used": noise.d_used,
        "iterations": noise.iterations,
        "converged": noise.converged,
        "lag": noise.lag,
    }


# ---------------------------------------------------------------------------
# Monte Carlo config JSON and error-table CSV


def mc_config_from_dict(doc: dict) -> McConfig:
    try:
        system = system_from_dict(doc["system"])
        sources = sources_from_dict(doc["system"], system)
        snr = tuple(float(v) for v in doc["snr"])
        n_total = int(doc["n_total"])
        runs = int(doc["runs"])
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"bad Monte Carlo config: {err}") from err
    disc = doc.get("discover", {})
    options = DiscoverOptions(
        lag_max=int(disc.get("lag", 5)),
        lag2=None if disc.get("lag2") is None else int(disc.get("lag2")),
        threshold=float(disc.get("threshold", DiscoverOptions.threshold)),
        unity_ceiling=float(disc.get("unity_ceiling", DiscoverOptions.unity_ceiling)),
        center=bool(disc.get("center", True)),
    )
    return McConfig(
        system=system,
        sources=tuple(sources),
        snr=snr,
        n_total=n_total,
        runs=runs,
        base_seed=int(doc.get("base_seed", 0)),
        burn_in=int(doc.get("burn_in", 500)),
        options=options,
    )


def read_mc_config(path) -> McConfig:
    return mc_config_from_dict(_read_json(path))


def write_error_table(table: ErrorTable, names, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["combination", "truth", "observed_admissible", "type1_pct", "type2_pct", "failed_runs"]
        )
        for row in table.rows:
            writer.writerow(
                [
                    "+".join(names[i] for i in row.dependent),
                    "admissible" if row.truth_admissible else "inadmissible",
                    row.observed_admissible,
                    "" if row.type1_pct is None else repr(row.type1_pct),
                    "" if row.type2_pct is None else repr(row.type2_pct),
                    table.failed_runs,
                ]
            )


# ---------------------------------------------------------------------------
# shared JSON helpers


def _read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: invalid JSON: {err}") from err


def _write_json(doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")
