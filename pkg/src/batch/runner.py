"""
Scenario Runner

Turns a validated ScenarioConfig into a trajectory and a witness report,
and runs parameter sweeps over copies of one scenario.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from src.batch.config import (
    ClosedFormRate,
    ScenarioConfig,
    TabulatedRate,
    validate_config,
    read_config_data,
    set_by_path,
)
from src.batch.export import write_report_json, write_summary_csv, write_trajectory_csv
from src.batch.plotting import plot_csv
from src.dynamics import TimeGrid, Trajectory, propagate_commutative, propagate_ode, trajectory_from_maps
from src.exceptions import ConfigError, RateDomainError
from src.models import (
    MapFamily,
    TimeLocalGenerator,
    amplitude_damping,
    dephasing_gellmann,
    dephasing_qubit,
    dephasing_weyl,
    generalized_pauli,
    pauli_channel,
    weyl_channel,
)
from src.models.microscopic import DecoherenceModel, LorentzianBath, lorentzian_G, perfect_decoherence
from src.models.rates import RateFunction, closed_form, constant, from_csv
from src.settings import get_settings
from src.witness import (
    WitnessReport,
    aggregate,
    w_blp,
    w_body_containment,
    w_cp_divisibility,
    w_eigen_moduli,
    w_ew_functional,
    w_f_monotone,
    w_hs_norm,
    w_volume,
)
from src.witness.report import WITNESS_ORDER, WitnessRecord, inapplicable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BuiltModel:
    """Generator and/or map family for one scenario"""
    dim: int
    family: str
    generator: Optional[TimeLocalGenerator] = field(default=None, repr=False)
    maps: Optional[MapFamily] = field(default=None, repr=False)


@dataclass(frozen=True)
class RunResult:
    config: ScenarioConfig
    trajectory: Trajectory = field(repr=False)
    report: WitnessReport = field(repr=False)
    outputs: Dict[str, Path] = field(default_factory=dict)


def build_rate(spec: Union[float, ClosedFormRate, TabulatedRate], base_dir: Path) -> RateFunction:
    if isinstance(spec, ClosedFormRate):
        return closed_form(spec.tag, spec.amplitude, spec.frequency, spec.offset)
    if isinstance(spec, TabulatedRate):
        path = Path(spec.csv)
        if not path.is_absolute():
            path = base_dir / path
        try:
            return from_csv(path)
        except RateDomainError as e:
            raise ConfigError(str(e)) from e
    return constant(float(spec))


def build_model(config: ScenarioConfig, base_dir: Union[str, Path] = ".") -> BuiltModel:
    """
    Instantiate the configured family.

    Amplitude damping integrates its bath function G over the scenario grid,
    so the model is only valid up to grid.t_max.
    """
    base_dir = Path(base_dir)
    params = config.model
    family = params.family

    def rates(specs):
        return [build_rate(s, base_dir) for s in specs]

    if family == "dephasing_qubit":
        return BuiltModel(2, family, generator=dephasing_qubit(build_rate(params.gamma, base_dir)))
    if family == "pauli":
        return BuiltModel(2, family, generator=pauli_channel(*rates(params.gammas)))
    if family == "dephasing_weyl":
        return BuiltModel(params.dim, family, generator=dephasing_weyl(params.dim, rates(params.gammas)))
    if family == "dephasing_gellmann":
        return BuiltModel(params.dim, family, generator=dephasing_gellmann(params.dim, rates(params.gammas)))
    if family == "weyl":
        return BuiltModel(params.dim, family, generator=weyl_channel(params.dim, rates(params.gammas)))
    if family == "generalized_pauli":
        return BuiltModel(params.dim, family, generator=generalized_pauli(params.dim, rates(params.gammas)))
    if family == "amplitude_damping":
        bath = LorentzianBath(**params.bath.model_dump())
        G = lorentzian_G(bath, config.grid.t_max)
        model = amplitude_damping(G, G.derivative, t_max=config.grid.t_max)
        logger.info("Lorentzian bath: %s coupling", "strong" if bath.strong_coupling else "weak")
        return BuiltModel(2, family, generator=model.generator, maps=model.maps)
    if family == "perfect_decoherence":
        model = DecoherenceModel(
            eps=np.asarray(params.eps, dtype=float),
            h_b=np.asarray(params.h_b, dtype=float),
            b_ops=np.asarray(params.b_ops, dtype=float),
            rho_b=np.asarray(params.rho_b, dtype=float),
        )
        return BuiltModel(model.dim, family, maps=perfect_decoherence(model))
    raise ConfigError(f"unknown family '{family}'")


def select_route(config: ScenarioConfig, model: BuiltModel) -> str:
    """Map-defined families go through their maps; commutative generators skip the ODE"""
    route = config.route
    if route == "auto":
        if model.maps is not None:
            return "maps"
        return "commutative" if model.generator.commutative else "ode"
    if route in ("commutative", "ode") and model.generator is None:
        raise ConfigError(f"route '{route}' needs a generator; family '{model.family}' only has maps")
    if route == "maps" and model.maps is None:
        raise ConfigError(f"route 'maps' needs a map family; '{model.family}' is generator-defined")
    return route


def propagate(model: BuiltModel, route: str, grid: TimeGrid) -> Trajectory:
    if route == "maps":
        return trajectory_from_maps(model.maps, grid, generator=model.generator)
    if route == "commutative":
        return propagate_commutative(model.generator, grid)
    return propagate_ode(model.generator, grid)


def run_witnesses(config: ScenarioConfig, traj: Trajectory, generator: Optional[TimeLocalGenerator]) -> List[WitnessRecord]:
    tol = config.tolerances
    samples = config.samples
    seed = config.seed if config.seed is not None else 0
    selected = set(config.witnesses)
    records = []
    for name in WITNESS_ORDER:
        if name not in selected:
            continue
        logger.debug("Running witness %s", name)
        if name == "volume":
            records.append(w_volume(traj, generator, tol=tol.deriv))
        elif name == "eigen_moduli":
            records.append(w_eigen_moduli(traj, generator, tol=tol.deriv))
        elif name == "f_monotone":
            records.append(w_f_monotone(traj, tol=tol.deriv, structure_tol=tol.structure))
        elif name == "ew_functional":
            if generator is None:
                records.append(inapplicable(name, "no time-local generator available"))
            else:
                records.append(w_ew_functional(generator, traj.grid, tol=tol.deriv))
        elif name == "blp":
            if samples.blp_order > traj.dim:
                raise ConfigError(f"blp_order {samples.blp_order} exceeds the dimension {traj.dim}")
            records.append(w_blp(traj, k=samples.blp_order, samples=samples.blp, seed=seed, tol=tol.deriv))
        elif name == "hs_norm":
            records.append(w_hs_norm(traj, samples=samples.hs_norm, seed=seed, tol=tol.deriv))
        elif name == "body_containment":
            records.append(w_body_containment(traj, tol=tol.deriv))
        elif name == "cp_divisibility":
            records.append(w_cp_divisibility(generator, traj.grid, tol=tol.positivity))
    return records


def evaluate(config: ScenarioConfig, base_dir: Union[str, Path] = ".") -> Tuple[Trajectory, WitnessReport]:
    """Propagate the scenario and aggregate its witnesses, without writing files"""
    grid = TimeGrid.uniform(config.grid.t_max, config.grid.points)
    model = build_model(config, base_dir)
    route = select_route(config, model)
    logger.info("Scenario %s: family %s, d = %d, route %s", config.name, model.family, model.dim, route)
    traj = propagate(model, route, grid)
    records = run_witnesses(config, traj, model.generator)
    report = aggregate(records, config.name, model.family, model.dim, traj.route, seed=config.seed)
    return traj, report


def _resolve(out_dir: Path, configured: Optional[str], default: str) -> Path:
    path = Path(configured) if configured else Path(default)
    return path if path.is_absolute() else out_dir / path


def run_scenario(
    config: ScenarioConfig,
    base_dir: Union[str, Path] = ".",
    out_dir: Optional[Union[str, Path]] = None,
) -> RunResult:
    """
    Run one scenario and write its trajectory CSV, report JSON and, when
    configured, an SVG plot of output.plot_columns.

    Relative output paths resolve against out_dir (default: base_dir).
    """
    out_dir = Path(out_dir) if out_dir is not None else Path(base_dir)
    traj, report = evaluate(config, base_dir)

    outputs = {
        "trajectory_csv": write_trajectory_csv(
            traj, _resolve(out_dir, config.output.trajectory_csv, f"{config.name}_trajectory.csv")),
        "report_json": write_report_json(
            report, _resolve(out_dir, config.output.report_json, f"{config.name}_report.json")),
    }
    if config.output.plot_svg:
        outputs["plot_svg"] = plot_csv(outputs["trajectory_csv"], config.output.plot_columns,
                                       _resolve(out_dir, config.output.plot_svg, ""))
    return RunResult(config=config, trajectory=traj, report=report, outputs=outputs)


def run_file(path: Union[str, Path], out_dir: Optional[Union[str, Path]] = None) -> RunResult:
    path = Path(path)
    data = read_config_data(path)
    return run_scenario(validate_config(data), base_dir=path.parent, out_dir=out_dir)


def summary_header(witnesses: Sequence[str]) -> List[str]:
    header = ["index", "value"]
    for name in WITNESS_ORDER:
        if name in witnesses:
            header += [f"{name}_verdict", f"{name}_first_violation"]
    return header + ["cp_rate_conditions", "cp_rate_first_violation",
                     "p_rate_conditions", "p_rate_first_violation"]


def summary_row(index: int, value: Any, report: WitnessReport) -> List[Any]:
    row: List[Any] = [index, json.dumps(value, sort_keys=True)]
    cp_details: Dict[str, Any] = {}
    for record in report.records:
        verdict = record.verdict if record.applicable else "inapplicable"
        row += [verdict, record.first_violation_time]
        if record.name == "cp_divisibility":
            cp_details = record.details
    for group in ("cp", "p"):
        conditions = cp_details.get(f"{group}_rate_conditions")
        if conditions is None:
            row += [None, None]
        else:
            row += ["violated" if conditions["violated"] else "hold", conditions["first_violation_time"]]
    return row


def _sweep_one(job: Tuple[int, Dict[str, Any], str, str]) -> WitnessReport:
    index, data, base_dir, runs_dir = job
    config = validate_config(data)
    _, report = evaluate(config, base_dir)
    write_report_json(report, Path(runs_dir) / f"run_{index}.json")
    return report


def sweep(
    config_path: Union[str, Path],
    param: str,
    values: Sequence[Any],
    out_path: Union[str, Path],
    max_workers: Optional[int] = None,
) -> List[WitnessReport]:
    """
    One run per value of the dotted parameter path.

    Reports go to <out stem>_runs/run_<i>.json; the summary CSV lists the
    runs in input order whatever the completion order.

    Raises:
        ConfigError: unreadable config, unknown path, or a value that fails validation
    """
    config_path = Path(config_path)
    out_path = Path(out_path)
    data = read_config_data(config_path)
    base = validate_config(data)

    documents = [set_by_path(data, param, value) for value in values]
    for document in documents:
        validate_config(document)

    runs_dir = out_path.parent / f"{out_path.stem}_runs"
    jobs = [(i, doc, str(config_path.parent), str(runs_dir)) for i, doc in enumerate(documents)]
    workers = max_workers if max_workers is not None else get_settings().max_workers
    logger.info("Sweeping %s over %d values with %d worker(s)", param, len(jobs), workers)

    if workers <= 1 or len(jobs) <= 1:
        reports = [_sweep_one(job) for job in tqdm(jobs, desc=f"sweep {param}", disable=not jobs)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            reports = list(tqdm(executor.map(_sweep_one, jobs), total=len(jobs), desc=f"sweep {param}"))

    rows = [summary_row(i, value, report) for i, (value, report) in enumerate(zip(values, reports))]
    write_summary_csv(summary_header(base.witnesses), rows, out_path)
    return reports
