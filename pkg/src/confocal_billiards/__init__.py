"""Periodic billiard trajectories within ellipsoids in any dimension.

Three independent routes decide periodicity: Cayley-type rank
conditions on a square-root series, extremal polynomials solving a
Pell equation on a system of intervals, and direct simulation.
"""
from .billiard import (Trajectory, count_winding, launch_from_caustics, line_caustics,
                       next_impact, reflect, trace)
from .catalog import build_catalog
from .cayley import (PeriodicityVerdict, check_d_plus_1, check_five_d3, check_periodicity,
                     check_six_d3, planar_cayley)
from .confocal import (CausticSet, ConfocalFamily, IntervalSystem, cartesian_from_jacobi,
                       classify_caustics, interval_system, jacobi_coordinates)
from .errors import *  # noqa: F401,F403
from .extremal import (PellSolution, WindingData, analyze_alternance, find_caustics_d_plus_1,
                       hyperboloid_4periodic, pell_solve, unique_pair_in_family)
from .freqmap import (FrequencyVector, band_integral, frequency, gap_integral,
                      injectivity_probe, rotation_number, third_kind_polynomial)
from .series import (Polynomial, PowerSeries, hankel_condition, hankel_matrix, pade_sqrt,
                     sqrt_series)

__version__ = "0.1.0"
