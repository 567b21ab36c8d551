"""Periodic continued fractions over rings of integers, with exact arithmetic."""
from __future__ import annotations

from .contmat import PCF, Mat2, QuadPoly, e_matrix, eigen_check, quad_poly
from .experiment import (
    BudgetExceeded,
    DensityCertificate,
    InsufficientPoints,
    ScanReport,
    degeneracy_scan,
    harvest_and_certify,
    pell_bijection_check,
    vbar_degeneracy_scan,
)
from .factor import FactorProblem, FactorSolution, fiber_solve, naive_vbar_solve, phi_iso, vbar_solve
from .gauss import GaussExpansion, gauss_uniqueness_probe, m_set, nicf_expand_gauss
from .hurwitz import NICFExpansion, hurwitz_valid, nicf_expand, uniqueness_probe
from .literals import parse_matrix, parse_pcf, parse_quad, parse_ring, parse_value
from .pcf import NonConvergent, PCFValue, evaluate, exact_value, membership, worpitzky_check
from .pell import FPPoint, fp_lattice, fp_scan, fp_stream, fp_to_unit, fundamental_pell, r_beta, unit_to_fp
from .ring import QuadIrr, RElem, RelQuadIrr, RingSpec, Z, arith, nearest, norm_conj

__version__ = "0.1.0"
