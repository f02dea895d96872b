"""
Scenario Configuration

JSON scenario files validated with pydantic. Unknown keys are rejected at
every level; physics parameters have no defaults.
"""

import json
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.exceptions import ConfigError
from src.linalg.bases import is_prime

WitnessName = Literal[
    "volume",
    "eigen_moduli",
    "f_monotone",
    "ew_functional",
    "blp",
    "hs_norm",
    "body_containment",
    "cp_divisibility",
]

ALL_WITNESSES: List[str] = list(WitnessName.__args__)
SAMPLED_WITNESSES = {"blp", "hs_norm"}


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ClosedFormRate(StrictModel):
    """amplitude * tag(frequency * t) + offset; 'exp' means exp(-frequency * t)"""
    tag: Literal["sin", "cos", "tanh", "exp"]
    amplitude: float
    frequency: float
    offset: float


class TabulatedRate(StrictModel):
    """Two-column (t, gamma) CSV, path relative to the scenario file"""
    csv: str


RateSpec = Union[float, ClosedFormRate, TabulatedRate]


def _count(name: str, gammas: list, expected: int) -> None:
    if len(gammas) != expected:
        raise ValueError(f"{name} needs {expected} rates, got {len(gammas)}")


class DephasingQubitParams(StrictModel):
    family: Literal["dephasing_qubit"]
    gamma: RateSpec


class DephasingWeylParams(StrictModel):
    family: Literal["dephasing_weyl"]
    dim: int = Field(..., ge=2)
    gammas: List[RateSpec]

    @model_validator(mode="after")
    def check_rates(self):
        _count("dephasing_weyl", self.gammas, self.dim - 1)
        return self


class DephasingGellMannParams(StrictModel):
    family: Literal["dephasing_gellmann"]
    dim: int = Field(..., ge=2)
    gammas: List[RateSpec]

    @model_validator(mode="after")
    def check_rates(self):
        _count("dephasing_gellmann", self.gammas, self.dim - 1)
        return self


class PauliParams(StrictModel):
    family: Literal["pauli"]
    gammas: List[RateSpec]

    @model_validator(mode="after")
    def check_rates(self):
        _count("pauli", self.gammas, 3)
        return self


class WeylParams(StrictModel):
    """Rates for (k, l) != (0, 0) in lexicographic order"""
    family: Literal["weyl"]
    dim: int = Field(..., ge=2)
    gammas: List[RateSpec]

    @model_validator(mode="after")
    def check_rates(self):
        _count("weyl", self.gammas, self.dim * self.dim - 1)
        return self


class GeneralizedPauliParams(StrictModel):
    family: Literal["generalized_pauli"]
    dim: int = Field(..., ge=2)
    gammas: List[RateSpec]

    @model_validator(mode="after")
    def check_rates(self):
        if not is_prime(self.dim):
            raise ValueError(f"unsupported dimension {self.dim}: generalized Pauli channel needs prime d")
        _count("generalized_pauli", self.gammas, self.dim + 1)
        return self


class BathParams(StrictModel):
    gamma_m: float = Field(..., ge=0.0, description="Coupling strength")
    width: float = Field(..., gt=0.0, description="Spectral width lambda")
    omega_c: float = Field(..., description="Centre frequency")
    detuning: float = Field(..., description="System transition minus centre frequency")


class AmplitudeDampingParams(StrictModel):
    family: Literal["amplitude_damping"]
    bath: BathParams


Matrix = List[List[float]]


class PerfectDecoherenceParams(StrictModel):
    family: Literal["perfect_decoherence"]
    eps: List[float]
    h_b: Matrix
    b_ops: List[Matrix]
    rho_b: Matrix


ModelParams = Annotated[
    Union[
        DephasingQubitParams,
        DephasingWeylParams,
        DephasingGellMannParams,
        PauliParams,
        WeylParams,
        GeneralizedPauliParams,
        AmplitudeDampingParams,
        PerfectDecoherenceParams,
    ],
    Field(discriminator="family"),
]


class GridConfig(StrictModel):
    t_max: float = Field(5.0, gt=0.0)
    points: int = Field(501, ge=3)


class ToleranceConfig(StrictModel):
    deriv: float = Field(1e-9, gt=0.0)
    positivity: float = Field(1e-9, gt=0.0)
    structure: float = Field(1e-9, gt=0.0)


class SampleConfig(StrictModel):
    blp: int = Field(200, ge=0)
    hs_norm: int = Field(100, ge=0)
    blp_order: int = Field(1, ge=1)


class OutputConfig(StrictModel):
    trajectory_csv: Optional[str] = None
    report_json: Optional[str] = None
    plot_svg: Optional[str] = None
    plot_columns: List[str] = Field(default_factory=lambda: ["f", "vol"])


class ScenarioConfig(StrictModel):
    """One scenario: model, grid, witnesses and outputs"""
    name: str
    model: ModelParams
    grid: GridConfig = Field(default_factory=GridConfig)
    witnesses: List[WitnessName] = Field(default_factory=lambda: list(ALL_WITNESSES))
    samples: SampleConfig = Field(default_factory=SampleConfig)
    seed: Optional[int] = None
    route: Literal["auto", "commutative", "ode", "maps"] = "auto"
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def check_witnesses(self):
        if len(set(self.witnesses)) != len(self.witnesses):
            raise ValueError("witness list contains duplicates")
        sampled = SAMPLED_WITNESSES.intersection(self.witnesses)
        if sampled and self.seed is None:
            raise ValueError(f"seed is required when sampled witnesses are selected: {sorted(sampled)}")
        return self


def validate_config(data: Dict[str, Any]) -> ScenarioConfig:
    """Validate a parsed document, converting pydantic errors to ConfigError"""
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid scenario: {e}") from e


def read_config_data(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"config file '{path}' not found") from e
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config '{path}': {e}") from e


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    return validate_config(read_config_data(path))


def set_by_path(data: Dict[str, Any], path: str, value: Any) -> Dict[str, Any]:
    """
    Return a deep copy of data with the dotted path replaced, e.g.
    'model.bath.gamma_m' or 'model.gammas.2'.

    Raises:
        ConfigError: if the path does not exist
    """
    copy = json.loads(json.dumps(data))
    keys = path.split(".")
    node = copy
    for i, key in enumerate(keys):
        last = i == len(keys) - 1
        if isinstance(node, list):
            try:
                index = int(key)
                node[index]
            except (ValueError, IndexError):
                raise ConfigError(f"parameter path '{path}' not found at '{key}'")
            if last:
                node[index] = value
            else:
                node = node[index]
        elif isinstance(node, dict):
            if key not in node:
                raise ConfigError(f"parameter path '{path}' not found at '{key}'")
            if last:
                node[key] = value
            else:
                node = node[key]
        else:
            raise ConfigError(f"parameter path '{path}' not found at '{key}'")
    return copy
