"""Semi-classical force model of the Aharonov-Bohm system.

Closed-form displacement, phase and delay expansions for an electron passing
a line flux, a numerical trajectory integrator that checks them, and the
feasibility analysis of AB interference experiments.
"""

__version__ = "0.1.0"

from abforce.catalog import (  # noqa: E402
    ExperimentRecord,
    RegimeReport,
    builtin_table1,
    classify_regime,
    coherence_length,
    derived_energy_spread,
    verify_record,
)
from abforce.constants import CODATA_2018, flux_from_gauss_cm2, flux_to_gauss_cm2  # noqa: E402
from abforce.errors import ConvergenceError, DomainError, SingularityError  # noqa: E402
from abforce.kinematics import (  # noqa: E402
    PassageGeometry,
    ab_phase,
    classical_delay,
    envelope_shift,
    force_x,
    relative_displacement,
    semiclassical_delay,
    semiclassical_phase,
    side_displacement,
    velocity_profile,
)
from abforce.physics import ElectronBeam, Solenoid, beam_from_energy, solenoid_field  # noqa: E402
from abforce.trajectory import (  # noqa: E402
    IntegratorConfig,
    TrajectoryResult,
    convergence_report,
    extract_second_order,
    integrate_passage,
    numeric_relative_displacement,
)
