"""Polar (hydrodynamic) form of the Dirac equation in 1+1, 1+2 and 1+3 dimensions."""
from .clifford import CliffordBasis, ConfigurationError, DimensionConfig, basis_for, build_basis, verify_algebra
from .connections import ConnectionData, FieldSample, InconsistentSampleError, decompose_derivative
from .conservation import (
    ConservedCurrents,
    EMField,
    RegimeWarning,
    compute_currents,
    compute_currents_polar,
    conservation_residuals,
    conservation_residuals_grid,
    navier_stokes_residual,
    nonrel_limit_energy,
    second_order_residual,
)
from .madelung import (
    PolarPointState,
    dirac_polar_residuals,
    equivalence_backward,
    equivalence_forward,
    fixed_frame_check,
    madelung_residuals,
    state_from_sample,
)
from .report import ResidualReport
from .schrodinger import WaveFunction, evolve_step, madelung_residuals_nr, polar_split
from .sources import AnalyticField, GridField, PlaneWaveSpec, dirac_step_1p1, plane_wave, superpose
from .spinor import PolarVariables, SingularSpinorError, compute_bilinears, polar_decompose, reconstruct_spinor
from .trajectories import Trajectory, integrate, transport_check, velocity_at

__version__ = "0.1.0"
