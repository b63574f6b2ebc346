"""Exactly solvable 1D potentials from first-order scaling intertwining.

A superpotential ``alpha`` of ``V`` at factorization energy ``E``, combined
with a dilation by ``e^lam``, yields the partner potential
``V_2(x) = e^{2lam} V(e^lam x) - alpha'(x)`` whose spectrum is
``e^{2lam} {E, E_0, E_1, ...}``.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError, DesignError, DomainError, GridMismatchError, GridTooNarrowError,
    IntervalError, NodefulSolutionError, NumericalError, OutOfDomainError,
    SameSignError, ScaledSusyError, SingularityError, ValidationError,
)
from .grid import GridFunction, GridSpec  # noqa: E402
from .potentials import Harmonic, HomogeneousPower, PotentialModel, Tabulated  # noqa: E402
from .riccati import (  # noqa: E402
    IntertwiningParams, numeric_superpotential, oscillator_superpotential,
    riccati_residual, unscale_superpotential,
)
from .intertwining import (  # noqa: E402
    apply_scaled_intertwiner, darboux_potential_difference, epsilon_of_lambda,
    ground_state_wavefunction, homogeneous_dpd, oscillator_partner, scaled_partner,
    standard_partner,
)
from .spectral import (  # noqa: E402
    ShapeClass, SpectrumReport, classify_shape, discretize, factorization_residual,
    intertwining_residual, lowest_k_eigenvalues, verify_spectrum_map,
)
from .design import DesignTarget, design_fixed_ground, design_uniform_scale, sweep_family  # noqa: E402
