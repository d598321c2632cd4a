"""Exact p-adic continued fractions and streaming Möbius and bilinear transformations."""

from .bilinear import BilinearEngine, decide_floor_bilinear, decide_floor_bilinear_ball, run_bilinear
from .engine import EventType, RunStatus, SingularMatrixError, Trace
from .expansion import (
    TERMINATED,
    Algorithm,
    ExplicitStream,
    NonTerminatingDetected,
    PeriodicStream,
    RationalExpander,
    SurdExpander,
    convergents,
    evaluate,
    make_stream,
)
from .moebius import MoebiusEngine, decide_floor, decide_floor_ball, decide_floor_mr
from .moebius import run as run_moebius
from .padic import DigitConvention, InsufficientPrecision, PadicContext, PadicDigits, floor_rational, vp
from .surd import QuadraticSurd, hensel_sqrt

__version__ = "0.1.0"
