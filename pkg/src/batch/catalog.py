"""
Built-in model catalog

One entry per family: a descriptive title, the worked example it
implements, the parameter schema, and a complete example scenario that
passes validation unchanged.
"""

import json
from dataclasses import asdict, dataclass
from typing import Any, Dict, List

from src.batch.config import validate_config

RATE_SCHEMA = "number | {tag, amplitude, frequency, offset} | {csv}"


@dataclass(frozen=True)
class CatalogEntry:
    family: str
    title: str
    source: str
    structure: str
    parameters: Dict[str, str]
    example: Dict[str, Any]


def _scenario(name: str, model: Dict[str, Any]) -> Dict[str, Any]:
    return {"name": name, "model": model, "seed": 0}


def _tanh(amplitude: float) -> Dict[str, Any]:
    return {"tag": "tanh", "amplitude": amplitude, "frequency": 1.0, "offset": 0.0}


CATALOG: List[CatalogEntry] = [
    CatalogEntry(
        family="dephasing_qubit",
        title="Qubit dephasing",
        source="qubit dephasing with a time-dependent rate gamma(t)",
        structure="Hermitian, commutative",
        parameters={"gamma": RATE_SCHEMA},
        example=_scenario("dephasing_qubit", {"family": "dephasing_qubit", "gamma": 1.0}),
    ),
    CatalogEntry(
        family="dephasing_weyl",
        title="Weyl dephasing (powers of the clock operator)",
        source="dephasing generated by powers of the clock operator",
        structure="normal, commutative",
        parameters={"dim": "int >= 2", "gammas": f"d - 1 rates, each {RATE_SCHEMA}"},
        example=_scenario("dephasing_weyl", {"family": "dephasing_weyl", "dim": 3, "gammas": [0.5, 0.25]}),
    ),
    CatalogEntry(
        family="dephasing_gellmann",
        title="Gell-Mann dephasing (diagonal generators)",
        source="dephasing along the diagonal Gell-Mann generators",
        structure="Hermitian, commutative",
        parameters={"dim": "int >= 2", "gammas": f"d - 1 rates, each {RATE_SCHEMA}"},
        example=_scenario("dephasing_gellmann",
                          {"family": "dephasing_gellmann", "dim": 3, "gammas": [0.3, 0.7]}),
    ),
    CatalogEntry(
        family="pauli",
        title="Pauli channel (eternal non-Markovian rates)",
        source="Pauli channel, eternally non-Markovian at rates (1, 1, -tanh t)",
        structure="Hermitian, commutative",
        parameters={"gammas": f"3 rates (x, y, z), each {RATE_SCHEMA}"},
        example=_scenario("pauli", {"family": "pauli", "gammas": [1.0, 1.0, _tanh(-1.0)]}),
    ),
    CatalogEntry(
        family="weyl",
        title="Weyl channel (normal)",
        source="Weyl channel, eigenvalue-modulus conditions for every pair (m, n)",
        structure="normal, commutative",
        parameters={"dim": "int >= 2",
                    "gammas": f"d^2 - 1 rates for (k, l) != (0, 0) in lexicographic order, each {RATE_SCHEMA}"},
        example=_scenario("weyl", {"family": "weyl", "dim": 3, "gammas": [0.1] * 8}),
    ),
    CatalogEntry(
        family="generalized_pauli",
        title="Generalized Pauli channel (mutually unbiased bases)",
        source="generalized Pauli channel over d + 1 mutually unbiased bases",
        structure="Hermitian, commutative",
        parameters={"dim": "prime int", "gammas": f"d + 1 rates, one per basis, each {RATE_SCHEMA}"},
        example=_scenario("generalized_pauli",
                          {"family": "generalized_pauli", "dim": 3, "gammas": [0.2, 0.2, 0.2, 0.2]}),
    ),
    CatalogEntry(
        family="amplitude_damping",
        title="Amplitude damping from a Lorentzian bath",
        source="amplitude damping (Lorentzian bath), weak and strong coupling",
        structure="non-normal, commutative; generator singular where G(t) = 0",
        parameters={
            "bath.gamma_m": "coupling >= 0",
            "bath.width": "spectral width > 0",
            "bath.omega_c": "centre frequency",
            "bath.detuning": "transition minus centre frequency",
        },
        example=_scenario("amplitude_damping", {
            "family": "amplitude_damping",
            "bath": {"gamma_m": 0.2, "width": 1.0, "omega_c": 0.0, "detuning": 0.0},
        }),
    ),
    CatalogEntry(
        family="perfect_decoherence",
        title="Pure decoherence from a block-diagonal Hamiltonian",
        source="pure decoherence of a qubit coupled to a qubit environment",
        structure="normal, commutative",
        parameters={
            "eps": "system energies (length d)",
            "h_b": "environment Hamiltonian (real symmetric matrix)",
            "b_ops": "d coupling operators (real symmetric matrices)",
            "rho_b": "environment density matrix",
        },
        example=_scenario("perfect_decoherence", {
            "family": "perfect_decoherence",
            "eps": [0.0, 0.0],
            "h_b": [[0.0, 0.0], [0.0, 0.0]],
            "b_ops": [[[0.0, 1.0], [1.0, 0.0]], [[0.0, -1.0], [-1.0, 0.0]]],
            "rho_b": [[0.5, 0.0], [0.0, 0.5]],
        }),
    ),
]


def catalog_json() -> str:
    return json.dumps([asdict(entry) for entry in CATALOG], indent=2)


def catalog_text() -> str:
    lines = []
    for entry in CATALOG:
        lines.append(f"{entry.family}: {entry.title} [{entry.structure}]")
        lines.append(f"    worked example: {entry.source}")
        for key, schema in entry.parameters.items():
            lines.append(f"    {key}: {schema}")
    return "\n".join(lines)


def validate_examples() -> None:
    """Raise ConfigError if any catalog example fails validation"""
    for entry in CATALOG:
        validate_config(entry.example)
