"""Rate functions, channel-family generators and microscopic models"""

from src.models.generators import (
    AmplitudeDampingModel,
    MapFamily,
    TimeLocalGenerator,
    amplitude_damping,
    custom_generator,
    dephasing_gellmann,
    dephasing_qubit,
    dephasing_weyl,
    generalized_pauli,
    hamiltonian_generator,
    pauli_channel,
    weyl_channel,
)
from src.models.microscopic import DecoherenceModel, LorentzianBath, lorentzian_G, perfect_decoherence
from src.models.rates import RateFunction, closed_form, constant, from_csv, tabulated

__all__ = [
    'AmplitudeDampingModel',
    'MapFamily',
    'TimeLocalGenerator',
    'amplitude_damping',
    'custom_generator',
    'dephasing_gellmann',
    'dephasing_qubit',
    'dephasing_weyl',
    'generalized_pauli',
    'hamiltonian_generator',
    'pauli_channel',
    'weyl_channel',
    'DecoherenceModel',
    'LorentzianBath',
    'lorentzian_G',
    'perfect_decoherence',
    'RateFunction',
    'closed_form',
    'constant',
    'from_csv',
    'tabulated',
]
