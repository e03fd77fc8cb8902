"""Interface en ligne de commande de indexlab.

Chaque sous-commande lit une configuration (fichier ``key = value`` puis
options), exécute le calcul et écrit un rapport JSON (ou sa projection CSV)
précédé d'un bloc de provenance. Codes de sortie : 0 succès, 2 invariant
violé ou configuration invalide, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import scipy
from pydantic import ValidationError

from indexlab import __version__
from indexlab.config import settings
from indexlab.exceptions import ConfigError, IndexLabError, InvariantViolation, NotStabilized
from indexlab.logging_conf import get_logger, setup_logging
from indexlab.schemas.run import Command, OutputFormat, RunConfig
from indexlab.services.catalog import CATALOG, build
from indexlab.services.enumeration import FeasibilityConstraints, case_split
from indexlab.services.forms import (
    dim_harmonic_l2star,
    dimension_note,
    holomorphic_basis,
    l2star_end_norm,
    laplacian_decay_order,
)
from indexlab.services.mesh import build_mesh, dump_mesh
from indexlab.services.parity import SECTOR_LABELS, costa_audit, costa_parity_dims
from indexlab.services.spectral import (
    default_schedule,
    eigenfunctions_frame,
    index_estimate,
    weighted_eigenpairs,
)
from indexlab.services.surface import (
    WeierstrassData,
    check_periods,
    curvature_decay_fit,
    end_analysis,
    normal_gradient_bound_check,
    surface_topology,
    total_curvature,
)
from indexlab.services.topology import (
    Sidedness,
    SurfaceTopology,
    bound_report,
    jorge_meeks_degree,
    sandwich,
    total_curvature_over_pi,
)
from indexlab.utils.seed import set_seed

logger = get_logger(__name__)

SURFACE_KEYS = (
    "k",
    "t",
    "gauss_numerator",
    "gauss_denominator",
    "dh_numerator",
    "dh_denominator",
    "punctures",
)
_JM_TOL = 1e-2
_END_NORM_EPSILON = 1e-8

Payload = tuple[dict[str, Any], pd.DataFrame]


# --- configuration ---


def parse_config_file(path: Path) -> dict[str, Any]:
    """Lit un fichier ``key = value`` (valeurs JSON si possible, sinon texte).

    Raises:
        ConfigError: Si une ligne n'a pas la forme attendue
    """
    values: dict[str, Any] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            values[key] = json.loads(value)
        except json.JSONDecodeError:
            values[key] = value
    return values


def _csv_numbers(text: str, kind: Callable[[str], Any]) -> list[Any]:
    return [kind(part) for part in text.split(",") if part.strip()]


def _flag_values(args: argparse.Namespace) -> dict[str, Any]:
    """Options explicitement données (les valeurs None sont ignorées)."""
    values = {
        key: value
        for key, value in vars(args).items()
        if value is not None and key not in {"command", "config", "surface_name"}
    }
    if "schedule" in values:
        values["schedule"] = _csv_numbers(values["schedule"], float)
    if "multiplicities" in values:
        values["multiplicities"] = _csv_numbers(values["multiplicities"], int)
    if getattr(args, "surface_name", None):
        values["surface"] = args.surface_name
    return values


def _normalize_surface(values: dict[str, Any]) -> dict[str, Any]:
    """Regroupe nom et paramètres de surface dans une entrée ``surface``."""
    merged = dict(values)
    surface = merged.pop("surface", None)
    if isinstance(surface, str):
        surface = {"name": surface}
    elif surface is not None and not isinstance(surface, dict):
        raise ConfigError(f"surface must be a name or a mapping (got {surface!r})")
    params = {key: merged.pop(key) for key in SURFACE_KEYS if key in merged}
    if surface is None and params:
        raise ConfigError(f"surface parameters {sorted(params)} given without a surface")
    if surface is not None:
        surface = {**surface, **params}
        merged["surface"] = surface
    return merged


def build_config(args: argparse.Namespace) -> RunConfig:
    """Fusionne fichier de configuration et options, puis valide.

    Raises:
        ConfigError: Clé inconnue ou valeur invalide
    """
    values: dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    values.update(_flag_values(args))
    values["command"] = args.command
    if args.command == Command.COSTA_AUDIT.value:
        values.setdefault("surface", "costa")
    values = _normalize_surface(values)
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def _topology(cfg: RunConfig) -> SurfaceTopology:
    if not cfg.multiplicities:
        raise ConfigError("--d (multiplicities) is required")
    sided = Sidedness.ONE if cfg.one_sided else Sidedness.TWO
    try:
        return SurfaceTopology.of(cfg.genus, cfg.multiplicities, sided)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _surface(cfg: RunConfig) -> WeierstrassData:
    if cfg.surface is None:
        raise ConfigError(f"{cfg.command.value} needs a surface ({', '.join(CATALOG)} or rational)")
    try:
        return build(cfg.surface.name, **cfg.surface.params())
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e


def _frac(value: Fraction) -> dict[str, Any]:
    return {"exact": str(value), "float": float(value)}


# --- sous-commandes ---


def cmd_surface(cfg: RunConfig) -> Payload:
    """Bouts, ajustements de décroissance et contrôle de Jorge-Meeks.

    Raises:
        InvariantViolation: Si la courbure totale s'écarte de Jorge-Meeks
    """
    wd = _surface(cfg)
    topology = surface_topology(wd)
    ends = [end_analysis(wd, p) for p in wd.punctures]
    fits = []
    for end in ends:
        fits.append(curvature_decay_fit(wd, end).to_dict())
        fits.append(normal_gradient_bound_check(wd, end).to_dict())
    curvature = total_curvature(wd)
    expected = math.pi * float(total_curvature_over_pi(topology))
    tol = cfg.tol or _JM_TOL
    mismatch = abs(curvature.value - expected)
    if mismatch > tol * max(abs(expected), 1.0):
        raise InvariantViolation(
            f"{wd.name}: total curvature {curvature.value:.6f} differs from Jorge-Meeks {expected:.6f}"
        )
    payload = {
        "surface": wd.name,
        "parameters": dict(wd.parameters),
        "period_defect": wd.period_defect,
        "topology": topology.to_dict(),
        "ends": [end.to_dict() for end in ends],
        "decay_fits": fits,
        "total_curvature": curvature.to_dict(),
        "jorge_meeks": {
            "degree": str(jorge_meeks_degree(topology)),
            "expected_total_curvature": expected,
            "relative_error": mismatch / max(abs(expected), 1.0),
        },
        "residues": check_periods(wd),
    }
    frame = pd.DataFrame(
        [
            {
                "puncture": str(e.to_dict()["puncture"]),
                "multiplicity": e.multiplicity,
                "winding": e.winding,
                "branching_order": e.branching_order,
                "normal_x": e.normal_limit[0],
                "normal_y": e.normal_limit[1],
                "normal_z": e.normal_limit[2],
            }
            for e in ends
        ]
    )
    return payload, frame


def cmd_bound(cfg: RunConfig) -> Payload:
    t = _topology(cfg)
    report = bound_report(t).to_dict()
    payload = {"topology": t.to_dict(), **report}
    return payload, pd.DataFrame([{"topology": t.label(), **report}])


def cmd_sandwich(cfg: RunConfig) -> Payload:
    t = _topology(cfg)
    lower, upper = sandwich(t)
    payload = {"topology": t.to_dict(), "lower": _frac(lower), "upper": _frac(upper)}
    frame = pd.DataFrame(
        [{"topology": t.label(), "lower": str(lower), "upper": str(upper)}]
    )
    return payload, frame


def cmd_enumerate(cfg: RunConfig) -> Payload:
    constraints = FeasibilityConstraints(
        nonflat=cfg.nonflat,
        embedded=cfg.embedded,
        min_ends=cfg.min_ends,
        min_genus=cfg.min_genus,
    )
    if cfg.literature:
        constraints = constraints.with_literature()
    sided = Sidedness.ONE if cfg.one_sided else Sidedness.TWO
    rows = case_split(cfg.budget, sided, constraints)
    found = sorted(t for row in rows for t in row.survivors)
    payload = {
        "budget": cfg.budget,
        "sided": sided.value,
        "constraints": constraints.to_dict(),
        "topologies": [t.to_dict() for t in found],
        "case_split": [row.to_dict() for row in rows],
    }
    frame = pd.DataFrame(
        [
            {
                "genus": t.genus,
                "ends": t.ends,
                "multiplicities": ",".join(map(str, t.multiplicities)),
                "sided": t.sided.value,
            }
            for t in found
        ],
        columns=["genus", "ends", "multiplicities", "sided"],
    )
    return payload, frame


def _stages_frame(report_dict: dict[str, Any]) -> pd.DataFrame:
    rows = []
    for stage in report_dict["stages"]:
        row = {k: v for k, v in stage.items() if k != "lowest_eigs"}
        row["lowest_eigs"] = " ".join(f"{v:.10g}" for v in stage["lowest_eigs"])
        rows.append(row)
    return pd.DataFrame(rows)


def cmd_index(cfg: RunConfig) -> Payload:
    """Indice par exhaustion ; rapport partiel écrit avant une non-stabilisation."""
    wd = _surface(cfg)
    schedule = default_schedule(wd, cfg.schedule, cfg.h)
    try:
        report = index_estimate(wd, schedule, adaptive=cfg.adaptive, k_eigs=cfg.k_eigs)
        failure = None
    except NotStabilized as e:
        report, failure = e.report, e

    payload: dict[str, Any] = {"surface": wd.name, "parameters": dict(wd.parameters)}
    payload.update(report.to_dict())
    topology = surface_topology(wd)
    if jorge_meeks_degree(topology) > 0:
        lower, upper = sandwich(topology)
        payload["sandwich"] = {"lower": _frac(lower), "upper": _frac(upper)}

    if report.stages and (cfg.dump_mesh or cfg.dump_eigs):
        last = report.stages[-1]
        mesh = build_mesh(wd, last.R, last.delta, last.h)
        if cfg.dump_mesh:
            payload["mesh_dump"] = str(dump_mesh(mesh, cfg.dump_mesh))
        if cfg.dump_eigs:
            pairs = weighted_eigenpairs(mesh, max(1, cfg.k_eigs))
            frame = eigenfunctions_frame(mesh, pairs)
            cfg.dump_eigs.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(cfg.dump_eigs, index=False, float_format="%.12g")
            payload["weighted_eigenvalues"] = [value for value, _ in pairs]
            payload["eigs_dump"] = str(cfg.dump_eigs)

    if failure is not None:
        _emit(cfg, payload, _stages_frame(payload))
        raise failure
    return payload, _stages_frame(payload)


def cmd_forms(cfg: RunConfig) -> Payload:
    """Dimensions L²*, base holomorphe et (Costa) décomposition par parité."""
    payload: dict[str, Any] = {}
    if cfg.surface is not None:
        wd = _surface(cfg)
        topology = surface_topology(wd)
        basis = holomorphic_basis(wd, topology)
        payload["surface"] = wd.name
        payload["basis"] = basis.to_dict()
        payload["basis"]["max_residue_sum"] = float(max(abs(r) for r in basis.residue_sums))
    else:
        topology = _topology(cfg)
    payload["topology"] = topology.to_dict()
    payload["dimension"] = dim_harmonic_l2star(topology)
    payload["note"] = dimension_note(topology)
    payload["decay"] = laplacian_decay_order(topology).to_dict()
    payload["end_norms"] = [
        l2star_end_norm(d + offset, d, _END_NORM_EPSILON).to_dict()
        for d in sorted(set(topology.multiplicities))
        for offset in (1, 2)
    ]

    frame = pd.DataFrame(payload["end_norms"])
    if cfg.surface is not None and cfg.surface.name == "costa":
        parity = costa_parity_dims(cfg.surface.t or 1.0)
        payload["parity"] = parity.to_dict()
        frame = pd.DataFrame(
            {
                "sector": list(SECTOR_LABELS),
                "tilde": list(parity.tilde),
                "dim": list(parity.dims),
            }
        )
    return payload, frame


def cmd_costa_audit(cfg: RunConfig) -> Payload:
    if cfg.surface is not None and cfg.surface.name != "costa":
        raise ConfigError(f"costa-audit runs on the Costa family (got {cfg.surface.name})")
    t = cfg.surface.t if cfg.surface is not None and cfg.surface.t else 1.0
    wd = build("costa", t=t)
    schedule = default_schedule(wd, cfg.schedule, cfg.h)
    audit = costa_audit(t, schedule)
    payload = audit.to_dict()
    frame = pd.DataFrame(
        {
            "sector": list(SECTOR_LABELS),
            "dim": list(audit.parity.dims),
            "tilde": list(audit.parity.tilde),
            "count": [audit.last_counts[label] for label in SECTOR_LABELS],
            "stabilized": [audit.restricted[label].stabilized for label in SECTOR_LABELS],
        }
    )
    return payload, frame


COMMANDS: dict[Command, Callable[[RunConfig], Payload]] = {
    Command.SURFACE: cmd_surface,
    Command.BOUND: cmd_bound,
    Command.SANDWICH: cmd_sandwich,
    Command.ENUMERATE: cmd_enumerate,
    Command.INDEX: cmd_index,
    Command.FORMS: cmd_forms,
    Command.COSTA_AUDIT: cmd_costa_audit,
}


# --- sorties ---


def provenance(cfg: RunConfig) -> dict[str, Any]:
    """Écho de la configuration et versions des modules."""
    return {
        "config": cfg.model_dump(mode="json", exclude_none=True),
        "versions": {
            "indexlab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
        },
        "settings": {
            "seed": settings.seed,
            "potential_rule": settings.potential_rule,
            "dense_threshold": settings.dense_threshold,
            "stabilization_window": settings.stabilization_window,
        },
    }


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Path):
        return str(value)
    return value


def render(cfg: RunConfig, payload: dict[str, Any], frame: pd.DataFrame) -> str:
    """Texte de sortie : JSON trié ou CSV précédé d'une ligne de provenance."""
    block = provenance(cfg)
    if cfg.format == OutputFormat.CSV:
        header = "# provenance " + json.dumps(_jsonable(block), sort_keys=True)
        return header + "\n" + frame.to_csv(index=False, float_format="%.12g")
    document = {"provenance": block, "result": payload}
    return json.dumps(_jsonable(document), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _emit(cfg: RunConfig, payload: dict[str, Any], frame: pd.DataFrame) -> None:
    text = render(cfg, payload, frame)
    if cfg.out is None:
        sys.stdout.write(text)
        return
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(text, encoding="utf-8")
    logger.info(f"Report written to {cfg.out}")


# --- parseur ---


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="Fichier key = value")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], help="json ou csv")
    parser.add_argument("--out", type=Path, help="Fichier de sortie (stdout par défaut)")
    parser.add_argument("--tol", type=float, help="Tolérance relative des contrôles")


def _add_topology(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--g", dest="genus", type=int, help="Genre")
    parser.add_argument("--d", dest="multiplicities", help="Multiplicités, ex. 1,1,1")
    parser.add_argument(
        "--one-sided", dest="one_sided", action="store_true", default=None, help="Surface unilatère"
    )


def _add_surface(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "surface_name",
        nargs=None if required else "?",
        help=f"Surface : {', '.join(CATALOG)} ou rational",
    )
    parser.add_argument("--k", type=int, help="Ordre d'Enneper")
    parser.add_argument("--t", type=float, help="Rapport des périodes (Costa)")


def _add_spectral(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--schedule", help="Rayons R, ex. 10,20,40,80,160")
    parser.add_argument("--h", type=float, help="Pas relatif du maillage")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="indexlab",
        description="Indice de Morse des surfaces minimales complètes de courbure totale finie",
    )
    parser.add_argument("--version", action="version", version=f"indexlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("surface", help="Bouts, décroissances et Jorge-Meeks")
    _add_surface(p)
    _add_common(p)

    for name, text in (("bound", "Bornes d'indice exactes"), ("sandwich", "Encadrement de l'indice")):
        p = sub.add_parser(name, help=text)
        _add_topology(p)
        _add_common(p)

    p = sub.add_parser("enumerate", help="Topologies compatibles avec un budget d'indice")
    p.add_argument("--budget", type=int, help="Budget d'indice")
    p.add_argument("--embedded", action="store_true", default=None, help="Bouts plongés")
    p.add_argument("--nonflat", action="store_true", default=None, help="Σ(dⱼ+1) ≥ 4")
    p.add_argument("--min-ends", dest="min_ends", type=int, help="Nombre minimal de bouts")
    p.add_argument("--min-genus", dest="min_genus", type=int, help="Genre minimal")
    p.add_argument(
        "--literature", action="store_true", default=None, help="Applique le fichier de littérature"
    )
    p.add_argument(
        "--one-sided", dest="one_sided", action="store_true", default=None, help="Surfaces unilatères"
    )
    _add_common(p)

    p = sub.add_parser("index", help="Indice par exhaustion")
    _add_surface(p)
    _add_spectral(p)
    p.add_argument(
        "--no-adaptive", dest="adaptive", action="store_false", default=None, help="h fixe"
    )
    p.add_argument("--k-eigs", dest="k_eigs", type=int, help="Valeurs propres par étape")
    p.add_argument("--dump-mesh", dest="dump_mesh", type=Path, help="Export du dernier maillage")
    p.add_argument("--dump-eigs", dest="dump_eigs", type=Path, help="Export CSV des fonctions propres")
    _add_common(p)

    p = sub.add_parser("forms", help="Formes harmoniques L²* et parités")
    _add_surface(p, required=False)
    _add_topology(p)
    _add_common(p)

    p = sub.add_parser("costa-audit", help="Chaîne complète de parité sur la famille de Costa")
    p.add_argument("--t", type=float, help="Rapport des périodes")
    _add_spectral(p)
    _add_common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Point d'entrée de la console ``indexlab``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(stream=sys.stderr)
    set_seed()
    try:
        cfg = build_config(args)
        payload, frame = COMMANDS[cfg.command](cfg)
        _emit(cfg, payload, frame)
    except IndexLabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValueError as e:
        logger.error(f"ValueError: {e}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
