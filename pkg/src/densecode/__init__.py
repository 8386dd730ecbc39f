"""Two-spin dense-coding simulator.

Four messages ride on one treated spin of an entangled pair: an ideal
circuit layer (gates, protocol), an NMR pulse layer (spin-selective
rotations, J-coupling delays, pseudo-pure preparation), density-matrix
tomography and a phenomenological error model, glued together by the
``densecode`` command-line tool.
"""

from .gates import BELL_VARIANT_ORDER, BellVariant
from .nmrsim import Delay, PulseSequence, Rf, SpinSystem
from .noise import ErrorParams
from .protocol import DecodedOutput, NotBasisStateError
from .tomo import ElementError, ModulusTable, RankDeficiencyError, ReadoutRecord

__all__ = [
    "BELL_VARIANT_ORDER",
    "BellVariant",
    "DecodedOutput",
    "Delay",
    "ElementError",
    "ErrorParams",
    "ModulusTable",
    "NotBasisStateError",
    "PulseSequence",
    "RankDeficiencyError",
    "ReadoutRecord",
    "Rf",
    "SpinSystem",
]

__version__ = "0.1.0"
