"""Single-photon scattering off arrays of giant atoms in a 1D waveguide."""
from giantwqed.kernels import BACKEND
from giantwqed.model import (
    AtomArray,
    Configuration,
    CouplingPoint,
    GiantAtom,
    Regime,
    build_braided_array,
    build_explicit_array,
    build_nested_array,
    build_separate_array,
    characteristics,
    classify_configuration,
    pair_characteristics,
    single_atom_characteristics,
)
from giantwqed.engine import (
    DegenerateSpectrumError,
    SingularSystemError,
    collective_modes,
    reconstruct_from_modes,
    scatter,
    scatter_sweep,
)
from giantwqed.transfer import PoleError, cascade_scatter, cascade_sweep, closed_form_sweep

__version__ = "0.1.0"
