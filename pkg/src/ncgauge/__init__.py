"""ncgauge: symbolic and numeric workbench for noncommutative U(1)-gauge
geometry on q-deformed spheres and noncommutative tori."""

from .scalars import Scalar, S_ONE, S_I, S_Q, S_S, S_LAM, S_PIHAT, q_power, rational
from .algebra import (Element, Generator, Presentation, parse_element,
                      check_local_confluence, StepBudgetExceeded, ParseError,
                      UnknownIdentifier)
from .calculus import (Calculus, Frame, ModularSymbol, FLAT, q_integer,
                       differential, check_calculus, ce_extension, tot, hor,
                       connection_data, connection_report, spectral_frame,
                       line_bimodule_report, bimodule_connection_report,
                       frohlich_apply, curvature_cocycle, vertical_parameter,
                       modular_apply)
from .scenarios import builtin_presentation, builtin_calculus, SCENARIOS

__version__ = "0.1.0"
