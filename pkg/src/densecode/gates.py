"""Ideal gate set: NOT, Walsh-Hadamard, controlled-NOT and the four encodings.

All gates are returned as fresh arrays in the qcore basis convention
(spin b = left label / control of ``cnot_ba``).
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from . import qcore

_SQRT2 = np.sqrt(2.0)


class BellVariant(Enum):
    """The four Bell start states, named by their amplitude pattern.

    Each variant carries the recipe producing it from |00>: which spins get
    a NOT before the Hadamard/CNOT pair of the preparation circuit.
    """

    MINUS_PHI = "minus-phi"  # (|00> - |11>)/sqrt2
    PLUS_PHI = "plus-phi"    # (|00> + |11>)/sqrt2
    MINUS_PSI = "minus-psi"  # (|01> - |10>)/sqrt2
    PLUS_PSI = "plus-psi"    # (|01> + |10>)/sqrt2

    @property
    def not_spins(self) -> tuple[str, ...]:
        """Spins that receive a NOT in the preparation circuit."""
        return {
            BellVariant.MINUS_PHI: ("b",),
            BellVariant.PLUS_PHI: (),
            BellVariant.MINUS_PSI: ("b", "a"),
            BellVariant.PLUS_PSI: ("a",),
        }[self]


BELL_VARIANT_ORDER = (
    BellVariant.MINUS_PHI,
    BellVariant.PLUS_PHI,
    BellVariant.MINUS_PSI,
    BellVariant.PLUS_PSI,
)


def not_gate() -> np.ndarray:
    """Single-spin NOT (sigma_x)."""
    return qcore.SIGMA_X.copy()


def hadamard() -> np.ndarray:
    """Walsh-Hadamard gate (1/sqrt2)[[1,1],[1,-1]]."""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / _SQRT2


def cnot_ba() -> np.ndarray:
    """Controlled-NOT with spin b as control and spin a as target."""
    return np.array(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 1, 0],
        ],
        dtype=complex,
    )


def cnot_ab() -> np.ndarray:
    """Controlled-NOT with spin a as control and spin b as target."""
    return np.array(
        [
            [1, 0, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
        ],
        dtype=complex,
    )


def encoding_unitary(i: int) -> np.ndarray:
    """The i-th message encoding on spin a: identity, sigma_z, sigma_x, i*sigma_y.

    The sign convention of the fourth encoding is i*sigma_y = [[0,1],[-1,0]],
    i.e. it maps |0> -> -|1> and |1> -> |0|; the minus sign matters for the
    signed outputs of the decoded states.
    """
    if i == 1:
        return qcore.ID2.copy()
    if i == 2:
        return qcore.SIGMA_Z.copy()
    if i == 3:
        return qcore.SIGMA_X.copy()
    if i == 4:
        return 1j * qcore.SIGMA_Y
    raise ValueError(f"encoding index must be 1..4, got {i!r}")


def bell_substitution(variant: BellVariant) -> np.ndarray:
    """Two-spin unitary of the NOT substitution step for ``variant``."""
    u = qcore.ID4.copy()
    for spin in variant.not_spins:
        n = not_gate()
        u = (qcore.tensor(n, qcore.ID2) if spin == "b" else qcore.tensor(qcore.ID2, n)) @ u
    return u
