"""Command-line entry point.

Three subcommands wire the pipeline to files on disk:

  theory      exact state + information sweep, no sampling
  experiment  sampled tomography run with optional mitigation
  table       fidelity/purity summary CSV over a batch of configurations

Every run writes a manifest with the config echo and a sha256 per emitted
file.  Outputs are deterministic functions of the config (including the seed),
independent of the parallelism degree; nothing is stamped with wall-clock
time or filesystem paths.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure inside
the pipeline.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .information import InfoReport, reports_to_csv, reports_to_json
from .pipeline import config_label, run_experiment, run_theory
from .sampling import DEFAULT_READOUT_FLIP, DEFAULT_SHOTS, NoiseModel
from .tomography import complex_matrix_to_json

_PRESET_QUBITS = (2, 3, 4, 5, 6)


@dataclass(frozen=True)
class RunConfig:
    """Validated knobs for one CLI invocation."""

    qubits: int
    variant: str
    shots: int = DEFAULT_SHOTS
    noise_p: float | None = DEFAULT_READOUT_FLIP
    depolarizing: float = 0.0
    seed: int = 0
    mitigation: bool = True
    mode: str = "physical"
    ordering: tuple[int, ...] | None = None
    theta_system: float = math.pi / 2
    out_dir: Path = Path("qdarwin_out")
    fmt: str = "json"

    def __post_init__(self):
        if self.qubits not in _PRESET_QUBITS:
            raise ValueError(f"qubits must be one of {_PRESET_QUBITS}, got {self.qubits}")
        if self.variant not in ("A", "B"):
            raise ValueError(f"variant must be A or B, got {self.variant!r}")
        if self.shots < 1:
            raise ValueError("shots must be positive")
        if self.mode not in ("physical", "raw"):
            raise ValueError(f"mode must be physical or raw, got {self.mode!r}")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.fmt!r}")
        if self.noise_p is not None and not 0.0 <= self.noise_p < 0.5:
            raise ValueError("noise probability must lie in [0, 0.5) or be 'none'")
        object.__setattr__(self, "out_dir", Path(self.out_dir))

    def noise_model(self) -> NoiseModel | None:
        if self.noise_p is None and self.depolarizing == 0.0:
            return None
        return NoiseModel.symmetric(self.qubits, self.noise_p or 0.0, self.depolarizing)

    def echo(self) -> dict:
        """Reproducibility echo; deliberately excludes paths and worker count."""
        return {
            "qubits": self.qubits,
            "variant": self.variant,
            "shots": self.shots,
            "noise": self.noise_p if self.noise_p is not None else "none",
            "depolarizing": self.depolarizing,
            "seed": self.seed,
            "mitigation": "on" if self.mitigation else "off",
            "mode": self.mode,
            "ordering": list(self.ordering) if self.ordering else None,
            "theta_system": self.theta_system,
        }


def _parse_noise(text: str) -> float | None:
    if text.strip().lower() == "none":
        return None
    return float(text)


def _parse_ordering(text: str) -> tuple[int, ...] | None:
    text = text.strip()
    if not text:
        return None
    return tuple(int(part) for part in text.split(","))


def _parse_int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(part) for part in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdarwin",
        description="System-environment branching states: simulation, tomography and information analysis.",
    )
    parser.add_argument("--version", action="version", version=f"qdarwin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, sampled: bool) -> None:
        p.add_argument("--qubits", type=int, default=2, help="total qubits, 2..6")
        p.add_argument("--variant", type=str, default="A", help="coupling preset, A or B")
        p.add_argument("--ordering", type=_parse_ordering, default=None,
                       help="comma-separated sweep order of environment qubits, e.g. 2,1,3")
        p.add_argument("--theta-system", type=float, default=math.pi / 2,
                       help="system rotation angle in radians")
        p.add_argument("--out", type=Path, default=Path("qdarwin_out"), help="output directory")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="format of the information report")
        if sampled:
            p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
            p.add_argument("--seed", type=int, required=True,
                           help="master seed; sampled runs never seed from the clock")
            p.add_argument("--noise", type=_parse_noise, default=DEFAULT_READOUT_FLIP,
                           help="symmetric readout flip probability, or 'none'")
            p.add_argument("--depolarizing", type=float, default=0.0,
                           help="depolarizing strength per two-qubit gate")
            p.add_argument("--mitigation", choices=("on", "off"), default="on")
            p.add_argument("--mode", choices=("physical", "raw"), default="physical")
            p.add_argument("--workers", type=int, default=0,
                           help="parallel sampling workers; 0 = all available")

    p_theory = sub.add_parser("theory", help="exact information curves, no sampling")
    add_common(p_theory, sampled=False)

    p_exp = sub.add_parser("experiment", help="sampled tomography + information pipeline")
    add_common(p_exp, sampled=True)

    p_table = sub.add_parser("table", help="fidelity/purity summary over configurations")
    p_table.add_argument("--qubits", type=_parse_int_list, default=(2, 3, 4, 5, 6),
                         help="comma-separated qubit counts; empty for a header-only table")
    p_table.add_argument("--variants", type=str, default="A,B")
    p_table.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p_table.add_argument("--seed", type=int, required=True)
    p_table.add_argument("--noise", type=_parse_noise, default=DEFAULT_READOUT_FLIP)
    p_table.add_argument("--depolarizing", type=float, default=0.0)
    p_table.add_argument("--workers", type=int, default=0)
    p_table.add_argument("--out", type=Path, default=Path("qdarwin_out"))
    return parser


def _write_files(out_dir: Path, files: dict[str, str], command: str, config_echo: dict) -> list[Path]:
    """Write payload files plus a manifest with their checksums."""
    out_dir.mkdir(parents=True, exist_ok=True)
    checksums = {}
    for name, text in files.items():
        (out_dir / name).write_text(text)
        checksums[name] = hashlib.sha256(text.encode()).hexdigest()
    manifest = {
        "tool": "qdarwin",
        "version": __version__,
        "command": command,
        "config": config_echo,
        "files": checksums,
    }
    manifest_text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    (out_dir / "manifest.json").write_text(manifest_text)
    return [out_dir / name for name in (*files, "manifest.json")]


def _info_payload(reports: list[InfoReport], fmt: str) -> tuple[str, str]:
    if fmt == "csv":
        return "info_report.csv", reports_to_csv(reports)
    return "info_report.json", reports_to_json(reports) + "\n"


def _rho_json(label: str, config_echo: dict, matrix) -> str:
    doc = {"config": config_echo, "label": label, "matrix": complex_matrix_to_json(matrix)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def cmd_theory(config: RunConfig) -> list[Path]:
    _, rho, report = run_theory(config.qubits, config.variant, config.theta_system, config.ordering)
    echo = config.echo()
    name, payload = _info_payload([report], config.fmt)
    files = {
        "rho_theory.json": _rho_json(config_label(config.qubits, config.variant), echo, rho.mat),
        name: payload,
    }
    return _write_files(config.out_dir, files, "theory", echo)


def cmd_experiment(config: RunConfig, workers: int = 1) -> list[Path]:
    result = run_experiment(
        qubits=config.qubits,
        variant=config.variant,
        shots=config.shots,
        seed=config.seed,
        noise=config.noise_model(),
        mitigation=config.mitigation,
        mode=config.mode,
        ordering=config.ordering,
        theta_system=config.theta_system,
        workers=workers,
    )
    echo = config.echo()
    experiment_doc = {
        "config": echo,
        "label": result.label,
        "n_settings": result.n_settings,
        "unmitigated": result.unmitigated.to_json_dict(),
        "mitigated": result.mitigated.to_json_dict() if result.mitigated else None,
    }
    name, payload = _info_payload(list(result.info_reports), config.fmt)
    files = {
        "rho_theory.json": _rho_json(result.label, echo, result.rho_theory.mat),
        "rho_experiment.json": json.dumps(experiment_doc, sort_keys=True, indent=2) + "\n",
        name: payload,
    }
    return _write_files(config.out_dir, files, "experiment", echo)


TABLE_HEADER = (
    "case",
    "qubits",
    "variant",
    "fidelity",
    "fidelity_mitigated",
    "purity",
    "purity_mitigated",
)


def cmd_table(
    configs: list[RunConfig],
    out_dir: Path,
    workers: int = 1,
) -> list[Path]:
    """Run each configuration with mitigation and emit one summary row apiece."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    echoes = []
    for k, config in enumerate(configs):
        result = run_experiment(
            qubits=config.qubits,
            variant=config.variant,
            shots=config.shots,
            seed=config.seed,
            noise=config.noise_model(),
            mitigation=True,
            workers=workers,
            seed_prefix=(k,),
        )
        case = f"S-E{config.qubits - 1} ({config.variant})"
        writer.writerow(
            [
                case,
                config.qubits,
                config.variant,
                repr(result.unmitigated.fidelity_vs_theory),
                repr(result.mitigated.fidelity_vs_theory),
                repr(result.unmitigated.purity_projected),
                repr(result.mitigated.purity_projected),
            ]
        )
        echoes.append(config.echo())
    files = {"table.csv": buf.getvalue()}
    return _write_files(out_dir, files, "table", {"runs": echoes})


def _workers(flag: int) -> int:
    if flag and flag > 0:
        return flag
    import os

    return os.cpu_count() or 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "table":
            variants = [v.strip().upper() for v in args.variants.split(",") if v.strip()]
            configs = [
                RunConfig(
                    qubits=q,
                    variant=v,
                    shots=args.shots,
                    noise_p=args.noise,
                    depolarizing=args.depolarizing,
                    seed=args.seed,
                    out_dir=args.out,
                )
                for q in args.qubits
                for v in variants
            ]
        else:
            config = RunConfig(
                qubits=args.qubits,
                variant=str(args.variant).upper(),
                shots=getattr(args, "shots", DEFAULT_SHOTS),
                noise_p=getattr(args, "noise", None),
                depolarizing=getattr(args, "depolarizing", 0.0),
                seed=getattr(args, "seed", 0),
                mitigation=getattr(args, "mitigation", "on") == "on",
                mode=getattr(args, "mode", "physical"),
                ordering=args.ordering,
                theta_system=args.theta_system,
                out_dir=args.out,
                fmt=args.format,
            )
    except (ValueError, TypeError) as exc:
        print(f"qdarwin: invalid configuration: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "theory":
            paths = cmd_theory(config)
        elif args.command == "experiment":
            paths = cmd_experiment(config, workers=_workers(args.workers))
        else:
            paths = cmd_table(configs, out_dir=args.out, workers=_workers(args.workers))
    except Exception as exc:  # pipeline-stage failure, numerical or otherwise
        print(f"qdarwin: pipeline failure: {exc}", file=sys.stderr)
        return 3

    for path in paths:
        print(path)
    return 0


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
