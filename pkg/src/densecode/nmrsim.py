"""Pulse-level realization of the dense-coding network.

Rotation convention: X(theta) = exp(-i*theta*sigma_x/2), likewise Y and Z,
so X(pi) equals sigma_x and Y(pi) equals i*sigma_y up to a global phase.
Free evolution acts in the doubly-rotating frame: only the weak J coupling
survives, chemical shifts are zero unless the noise model injects offsets.

Sequences compile by left-multiplying event unitaries in time order, i.e.
``compile([e1, e2]) == U(e2) @ U(e1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .gates import BellVariant
from .protocol import check_message

SPINS = ("a", "b")
AXES = ("X", "Y", "Z")

#: Larmor frequencies (MHz) of the chloroform 1H / 13C pair; the J coupling
#: is NOT a measured constant of the artifact, only an overridable default.
DEFAULT_FREQ_A_MHZ = 500.13
DEFAULT_FREQ_B_MHZ = 125.77
DEFAULT_J_HZ = 215.0
DEFAULT_T2_S = 0.3


@dataclass(frozen=True)
class SpinSystem:
    """Static parameters of the two-spin sample.

    ``polarization_ratio`` is gamma_a/gamma_b; when omitted it is derived
    from the Larmor frequencies.
    """

    freq_a: float = DEFAULT_FREQ_A_MHZ  # MHz, spin a (1H)
    freq_b: float = DEFAULT_FREQ_B_MHZ  # MHz, spin b (13C)
    j_coupling: float = DEFAULT_J_HZ    # Hz
    t2_a: float = DEFAULT_T2_S          # s
    t2_b: float = DEFAULT_T2_S          # s
    polarization_ratio: float | None = None

    def __post_init__(self) -> None:
        for name in ("freq_a", "freq_b", "j_coupling", "t2_a", "t2_b"):
            if not getattr(self, name) > 0:
                raise ValueError(f"SpinSystem.{name} must be positive")
        if self.polarization_ratio is None:
            object.__setattr__(self, "polarization_ratio", self.freq_a / self.freq_b)
        elif not self.polarization_ratio > 0:
            raise ValueError("SpinSystem.polarization_ratio must be positive")


@dataclass(frozen=True)
class Rf:
    """A hard RF rotation pulse on one spin.

    ``phase_sign`` = -1 flips the RF phase by 180 degrees, i.e. rotates about
    the negative axis; miscalibration scales ``angle`` but never the sign.
    """

    spin: str
    axis: str
    angle: float
    phase_sign: int = 1

    def __post_init__(self) -> None:
        if self.spin not in SPINS:
            raise ValueError(f"Rf spin must be one of {SPINS}, got {self.spin!r}")
        if self.axis not in AXES:
            raise ValueError(f"Rf axis must be one of {AXES}, got {self.axis!r}")
        if not math.isfinite(self.angle):
            raise ValueError("Rf angle must be finite")
        if self.phase_sign not in (1, -1):
            raise ValueError("Rf phase_sign must be +1 or -1")


@dataclass(frozen=True)
class Delay:
    """Free evolution under the J coupling for ``duration`` seconds."""

    duration: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.duration) and self.duration >= 0):
            raise ValueError("Delay duration must be finite and >= 0")


PulseEvent = Rf | Delay


@dataclass(frozen=True)
class PulseSequence:
    """An ordered list of pulse events, earliest first."""

    events: tuple[PulseEvent, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        return PulseSequence(self.events + other.events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def total_delay(self) -> float:
        """Total free-evolution time (pulses are instantaneous)."""
        return sum(ev.duration for ev in self.events if isinstance(ev, Delay))


def rf_unitary(spin: str, axis: str, angle: float, phase_sign: int = 1) -> np.ndarray:
    """Two-spin unitary of a single hard pulse."""
    ev = Rf(spin, axis, angle, phase_sign)
    u2 = qcore.pauli_rotation(ev.axis, ev.angle * ev.phase_sign)
    if ev.spin == "b":
        return np.kron(u2, qcore.ID2)
    return np.kron(qcore.ID2, u2)


# Diagonal signs of sigma_z on b, sigma_z on a, and sigma_z*sigma_z.
_ZB_DIAG = np.array([1.0, 1.0, -1.0, -1.0])
_ZA_DIAG = np.array([1.0, -1.0, 1.0, -1.0])
_ZZ_DIAG = _ZB_DIAG * _ZA_DIAG


def j_evolution(sys: SpinSystem, t: float) -> np.ndarray:
    """Weak-coupling free evolution exp(-i*2*pi*J*t*(sz_b/2)(sz_a/2))."""
    if not (math.isfinite(t) and t >= 0):
        raise ValueError("evolution time must be finite and >= 0")
    phases = np.exp(-1j * (math.pi * sys.j_coupling * t / 2.0) * _ZZ_DIAG)
    return np.diag(phases)


def event_unitary(ev: PulseEvent, sys: SpinSystem) -> np.ndarray:
    if isinstance(ev, Rf):
        return rf_unitary(ev.spin, ev.axis, ev.angle, ev.phase_sign)
    return j_evolution(sys, ev.duration)


def compile_sequence(seq: PulseSequence, sys: SpinSystem) -> np.ndarray:
    """Compile a sequence to its two-spin propagator (later events applied later)."""
    u = qcore.ID4.copy()
    for ev in seq:
        u = event_unitary(ev, sys) @ u
    return u


def not_pulse(spin: str) -> PulseSequence:
    """NOT as a single X(pi) pulse (equals sigma_x up to global phase)."""
    return PulseSequence((Rf(spin, "X", math.pi),))


def pseudo_hadamard_b() -> PulseSequence:
    """The two-pulse Hadamard stand-in on spin b.

    Compiles to i*(sigma_z - sigma_x)/sqrt2 on spin b, which is the textbook
    Hadamard conjugated by sigma_z and phased; populations through the
    decoding network are unchanged.
    """
    return PulseSequence((Rf("b", "Y", -math.pi / 2), Rf("b", "X", math.pi)))


def cnot_pulse_sequence(
    sys: SpinSystem, control: str = "b", refocus: bool = True
) -> PulseSequence:
    """Controlled-NOT from spin-selective pulses around a 1/(2J) J evolution.

    The zz coupling is turned into the needed zx term by +-Y(pi/2) pulses on
    the target; two trailing 90-degree pulses absorb the residual single-spin
    phases.  The compiled propagator equals the ideal CNOT up to a global
    phase of exp(-i*pi/4).

    With ``refocus`` the J delay is split in half around a simultaneous
    X(pi) pair on both spins, undone by a second pair of opposed phase; this
    cancels static resonance offsets (and the pair's own miscalibration)
    without touching the J evolution.
    """
    if control not in SPINS:
        raise ValueError(f"control must be one of {SPINS}, got {control!r}")
    target = "a" if control == "b" else "b"
    tau = 1.0 / (2.0 * sys.j_coupling)
    if refocus:
        coupling: tuple[PulseEvent, ...] = (
            Delay(tau / 2),
            Rf("b", "X", math.pi),
            Rf("a", "X", math.pi),
            Delay(tau / 2),
            Rf("b", "X", math.pi, phase_sign=-1),
            Rf("a", "X", math.pi, phase_sign=-1),
        )
    else:
        coupling = (Delay(tau),)
    events = (
        (Rf(target, "Y", math.pi / 2),)
        + coupling
        + (
            Rf(target, "Y", -math.pi / 2),
            Rf(target, "X", math.pi / 2),
            Rf(control, "Z", math.pi / 2),
        )
    )
    return PulseSequence(events)


def encoding_pulse(i: int) -> PulseSequence:
    """Pulse form of the i-th encoding on spin a.

    Identity is an empty sequence; the Pauli encodings are single pi pulses
    X_a(pi), Y_a(pi) and Z_a(pi), each equal to the ideal encoding up to a
    global phase.  Note Z_a(pi), not Z_a(pi/2): only a pi z-rotation is
    proportional to sigma_z under the spin-rotation convention.
    """
    check_message(i)
    if i == 1:
        return PulseSequence(())
    axis = {2: "Z", 3: "X", 4: "Y"}[i]
    return PulseSequence((Rf("a", axis, math.pi),))


def bell_prep_sequence(
    sys: SpinSystem, variant: BellVariant, refocus: bool = True
) -> PulseSequence:
    """Pulse program preparing the Bell start state for ``variant``."""
    seq = PulseSequence(())
    for spin in variant.not_spins:
        seq = seq + not_pulse(spin)
    return seq + pseudo_hadamard_b() + cnot_pulse_sequence(sys, refocus=refocus)


def decode_sequence(sys: SpinSystem, refocus: bool = True) -> PulseSequence:
    """Pulse program of the decoding step: CNOT then pseudo-Hadamard on b."""
    return cnot_pulse_sequence(sys, refocus=refocus) + pseudo_hadamard_b()


def dense_coding_sequence(
    sys: SpinSystem, m: int, variant: BellVariant, refocus: bool = True
) -> PulseSequence:
    """Full pulse program: preparation, encoding of message ``m``, decoding."""
    return (
        bell_prep_sequence(sys, variant, refocus=refocus)
        + encoding_pulse(m)
        + decode_sequence(sys, refocus=refocus)
    )


def thermal_state(sys: SpinSystem, epsilon: float) -> np.ndarray:
    """High-temperature equilibrium state I/4 + eps*(ratio*sz_a + sz_b)/2.

    ``epsilon`` is the 13C single-spin polarization; the regime of validity
    is epsilon <= 1e-3.  Raises if the deviation would push a population
    negative (state no longer positive semidefinite).
    """
    if not (math.isfinite(epsilon) and epsilon >= 0):
        raise ValueError("epsilon must be finite and >= 0")
    r = sys.polarization_ratio
    diag = 0.25 + epsilon * (r * _ZA_DIAG + _ZB_DIAG) / 2.0
    if np.any(diag < 0):
        raise ValueError(
            f"epsilon {epsilon!r} too large: thermal populations go negative"
        )
    return np.diag(diag).astype(complex)


def permutation_sequences(sys: SpinSystem, refocus: bool = True) -> tuple[PulseSequence, ...]:
    """The three temporal-averaging prefixes P0, P1, P2.

    P0 does nothing; P1 and P2 are two-CNOT circuits that cyclically permute
    the populations of |01>, |10>, |11> (in opposite directions) while fixing
    |00>.
    """
    cn_ba = cnot_pulse_sequence(sys, control="b", refocus=refocus)
    cn_ab = cnot_pulse_sequence(sys, control="a", refocus=refocus)
    return (PulseSequence(()), cn_ab + cn_ba, cn_ba + cn_ab)


def temporal_average(
    sys: SpinSystem,
    epsilon: float,
    circuit: PulseSequence,
    refocus: bool = True,
) -> np.ndarray:
    """Average the circuit output over the three permuted thermal inputs.

    Each run compiles the permutation prefix followed by ``circuit`` and
    evolves the thermal state; the mean of the three runs carries a
    deviation proportional to the circuit acting on |00><00|.
    """
    rho_th = thermal_state(sys, epsilon)
    total = np.zeros((4, 4), dtype=complex)
    for prefix in permutation_sequences(sys, refocus=refocus):
        u = compile_sequence(prefix + circuit, sys)
        total += u @ rho_th @ u.conj().T
    return total / 3.0


def pseudo_pure_decomposition(rho: np.ndarray) -> tuple[float, float, float]:
    """Split ``rho`` as alpha*I/4 + beta*|00><00| + residual.

    Returns (alpha, beta, max|residual|); a temporal-averaged preparation
    state has residual at rounding level.
    """
    rho = qcore.check_density_matrix(rho)
    diag = np.real(np.diag(rho))
    background = float(np.mean(diag[1:]))
    alpha = 4.0 * background
    beta = float(diag[0] - background)
    model = alpha * np.eye(4) / 4.0 + beta * np.outer(
        qcore.basis_state(0), qcore.basis_state(0)
    )
    residual = float(np.max(np.abs(rho - model)))
    return alpha, beta, residual


def pseudo_pure_beta(sys: SpinSystem, epsilon: float) -> float:
    """Pure-state weight beta of the temporal-averaged preparation.

    For the thermal diagonal this is (2/3)*epsilon*(ratio + 1), known in
    closed form; used to rescale simulated experiments back to unit-weight
    density matrices.
    """
    return (2.0 / 3.0) * epsilon * (sys.polarization_ratio + 1.0)
