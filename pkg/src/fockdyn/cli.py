"""Command-line front end.

Actions (combinable, e.g. ``fockdyn certify propagate --config run.toml``):

* ``certify``      -- run the four operator checks, write certification.json
* ``propagate``    -- sum the Dyson series for a basis vector, write
                      dyson_run.json and dyson_terms.csv
* ``emit-bundle``  -- save the model bundle (h0/h1/grading + manifest)

The model comes from a TOML config (``--config``); without one a built-in
single-mode toy model is used.  Exit codes: 0 success, 1 a certification
failure (or a propagation refused by ``--require-certified``), 2 rejected
configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .bundle import ModelBundle, toy_single_mode
from .certification import certify
from .config import TOLS
from .dirac import PositionLattice, coulomb_values, potential_from_matrix_file, zero_potential
from .dyson import dyson_propagate, oracle_compare
from .field import Cutoff, dirac_klein_gordon_bundle, dirac_maxwell_bundle, photon_space

DEFAULT_FINE_STRUCTURE = 1.0 / 137.035999

ACTIONS = ("certify", "propagate", "emit-bundle")


class ConfigError(ValueError):
    """The configuration file was rejected."""


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _write_json(path: Path, payload: dict, started: float) -> None:
    body = _jsonable(payload)
    body["timing"] = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seconds": time.monotonic() - started,
    }
    path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")


def strip_timing(text: str) -> str:
    """Drop the volatile "timing" block from a report, for byte-stable
    comparison of repeated runs."""
    body = json.loads(text)
    body.pop("timing", None)
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def _section(cfg: dict, name: str) -> dict:
    part = cfg.get(name, {})
    if not isinstance(part, dict):
        raise ConfigError(f"[{name}] must be a table")
    return part


def _get(table: dict, key: str, kind, default=None, *, required=False, where=""):
    if key not in table:
        if required:
            raise ConfigError(f"missing required key '{key}'{where}")
        return default
    value = table[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"key '{key}'{where} must be {kind.__name__}, got {value!r}")
    return value


def _resolve_charge(raw, fine_structure: float, key: str) -> float:
    if isinstance(raw, str):
        if raw == "e":
            return math.sqrt(fine_structure)
        raise ConfigError(f"'{key}' string value must be \"e\", got {raw!r}")
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return float(raw)
    raise ConfigError(f"'{key}' must be a number or the string \"e\"")


def _build_cutoff(table: dict, lattice: PositionLattice) -> Cutoff:
    kind = _get(table, "kind", str, "gaussian", where=" in [model.cutoff]")
    scale = _get(table, "scale", float, None, where=" in [model.cutoff]")
    if kind == "gaussian":
        if scale is None:
            return Cutoff.default_for(photon_space(lattice).grid)
        return Cutoff.gaussian(scale)
    if kind == "sharp":
        if scale is None:
            raise ConfigError("sharp cutoff requires 'scale' (the momentum radius)")
        return Cutoff.sharp(scale)
    raise ConfigError(f"unknown cutoff kind {kind!r}")


def _build_potential(table: dict, lattice: PositionLattice, charge: float):
    kind = _get(table, "kind", str, "zero", where=" in [model.potential]")
    if kind == "zero":
        return zero_potential(lattice)
    if kind == "coulomb":
        z = _get(table, "z", float, required=True, where=" in [model.potential]")
        return coulomb_values(lattice, z, charge)
    if kind == "file":
        path = _get(table, "path", str, required=True, where=" in [model.potential]")
        return potential_from_matrix_file(lattice, path)
    raise ConfigError(f"unknown potential kind {kind!r}")


def build_bundle(cfg: dict) -> ModelBundle:
    """Construct the model bundle a parsed config describes."""
    model = _section(cfg, "model")
    physics = _section(cfg, "physics")
    fine_structure = _get(physics, "fine_structure", float, DEFAULT_FINE_STRUCTURE,
                          where=" in [physics]")
    kind = _get(model, "kind", str, "toy_single_mode", where=" in [model]")

    try:
        if kind == "toy_single_mode":
            return toy_single_mode(
                omega=_get(model, "omega", float, 1.0, where=" in [model]"),
                coupling=_get(model, "coupling", float, 0.1, where=" in [model]"),
                n_max=_get(model, "n_max", int, 14, where=" in [model]"),
            )
        if kind == "external_bundle":
            path = _get(model, "path", str, required=True, where=" in [model]")
            return ModelBundle.load(path)
        if kind in ("dirac_maxwell", "dirac_klein_gordon"):
            lattice = PositionLattice(
                _get(model, "points_per_axis", int, 1, where=" in [model]"),
                _get(model, "spacing", float, 1.0, where=" in [model]"),
            )
            n_max = _get(model, "n_max", int, 2, where=" in [model]")
            mass = _get(model, "mass", float, 1.0, where=" in [model]")
            cutoff = _build_cutoff(_section(model, "cutoff"), lattice)
            if kind == "dirac_maxwell":
                charge = _resolve_charge(model.get("charge", 0.0), fine_structure, "charge")
                potential = _build_potential(_section(model, "potential"), lattice, charge)
                return dirac_maxwell_bundle(lattice, n_max, mass=mass, charge=charge,
                                            potential=potential, cutoff=cutoff)
            coupling = _resolve_charge(model.get("coupling", 0.0), fine_structure, "coupling")
            potential = _build_potential(_section(model, "potential"), lattice, coupling)
            return dirac_klein_gordon_bundle(lattice, n_max, mass=mass, coupling=coupling,
                                             potential=potential, cutoff=cutoff)
        raise ConfigError(f"unknown model kind {kind!r}")
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def _run_certify(bundle, cfg, seed, out_dir, started) -> dict:
    table = _section(cfg, "certify")
    if seed is None:
        seed = _get(table, "seed", int, 0, where=" in [certify]")
    report = certify(
        bundle,
        seed=seed,
        n_samples=_get(table, "n_samples", int, 10_000, where=" in [certify]"),
        support=_get(table, "support", int, 256, where=" in [certify]"),
    )
    payload = report.to_dict()
    _write_json(out_dir / "certification.json", payload, started)
    for name, result in report.conditions.items():
        print(f"certify: {name} {'PASS' if result['ok'] else 'FAIL'}")
    print(f"certification: {'PASS' if report.all_pass else 'FAIL'} "
          f"-> {out_dir / 'certification.json'}")
    return payload


def _run_propagate(bundle, cfg, out_dir, started) -> None:
    table = _section(cfg, "propagate")
    index = _get(table, "initial_index", int, 0, where=" in [propagate]")
    if not 0 <= index < bundle.dim:
        raise ConfigError(f"initial_index {index} outside [0, {bundle.dim})")
    xi = np.zeros(bundle.dim, dtype=complex)
    xi[index] = 1.0
    run = dyson_propagate(
        bundle,
        xi,
        _get(table, "t", float, 1.0, where=" in [propagate]"),
        t_prime=_get(table, "t_prime", float, 0.0, where=" in [propagate]"),
        order=_get(table, "order", int, 12, where=" in [propagate]"),
        nodes=_get(table, "nodes", int, 16, where=" in [propagate]"),
    )
    record = run.to_record()
    print(f"propagate: t={run.t:g} order={run.order} trusted={run.trusted} "
          f"margin={run.margin:g}")

    comparison = None
    if run.trusted and bundle.dim <= TOLS.dense_dim_limit:
        comparison = oracle_compare(bundle, run)
        record["oracle"] = comparison
        print(f"propagate: discrepancy vs dense oracle {comparison['discrepancy']:.3e}")
    elif not run.trusted:
        record["oracle"] = None
        print("propagate: untrusted run, oracle comparison skipped")
    else:
        record["oracle"] = None
        print("propagate: dimension too large for the dense oracle, comparison skipped")

    _write_json(out_dir / "dyson_run.json", record, started)
    with open(out_dir / "dyson_terms.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["order", "term_norm", "partial_discrepancy"])
        for n, norm in enumerate(run.term_norms):
            disc = ""
            if comparison is not None:
                disc = f"{comparison['partial_discrepancies'][n]:.17g}"
            writer.writerow([n, f"{norm:.17g}", disc])
    print(f"propagate: -> {out_dir / 'dyson_run.json'} {out_dir / 'dyson_terms.csv'}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fockdyn",
        description="certify and propagate truncated Fock-space models",
    )
    parser.add_argument("actions", nargs="+", choices=ACTIONS, metavar="action",
                        help=f"one or more of: {', '.join(ACTIONS)}")
    parser.add_argument("--config", help="TOML model/run configuration")
    parser.add_argument("--seed", type=int, default=None,
                        help="certification RNG seed (overrides the config)")
    parser.add_argument("--require-certified", action="store_true",
                        help="refuse to propagate unless certification passes")
    parser.add_argument("--out", default="fockdyn_out", help="output directory")
    args = parser.parse_args(argv)

    started = time.monotonic()
    try:
        cfg = load_config(args.config)
        bundle = build_bundle(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = dict(bundle.manifest)
    manifest["manifest_hash"] = bundle.manifest_hash()
    _write_json(out_dir / "manifest.json", manifest, started)
    print(f"model: {bundle.manifest.get('model', '?')}  dim: {bundle.dim}  "
          f"hash: {bundle.manifest_hash()[:12]}")

    actions = list(dict.fromkeys(args.actions))
    certification = None
    failed = False
    try:
        if args.require_certified and "propagate" in actions and "certify" not in actions:
            actions.insert(0, "certify")
        for action in actions:
            if action == "emit-bundle":
                target = out_dir / "bundle"
                bundle.save(target)
                print(f"emit-bundle: -> {target}")
            elif action == "certify":
                certification = _run_certify(bundle, cfg, args.seed, out_dir, started)
                if not certification["all_pass"]:
                    failed = True
            elif action == "propagate":
                if args.require_certified:
                    if certification is None or not certification["all_pass"]:
                        print("propagate: refused, certification did not pass",
                              file=sys.stderr)
                        failed = True
                        continue
                _run_propagate(bundle, cfg, out_dir, started)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
