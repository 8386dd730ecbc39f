"""State tomography: simulated readout experiments and least-squares fit.

The readout set is the 9 pulse pairs {I, X90, Y90} x {I, X90, Y90}.  A
record stores exact product-operator expectations of the rotated state, but
the fit only consumes what NMR detection can see: the single-quantum
transverse terms of each spin (in-phase and antiphase, 8 values per
experiment).  Through the 9 rotations those terms determine all 15 free
coefficients of the product-operator expansion, so the reconstruction is an
overdetermined linear least squares.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import qcore

READOUT_PULSES = ("I", "X90", "Y90")

PAULI_LABELS = ("I", "X", "Y", "Z")
_PAULI = {
    "I": qcore.ID2,
    "X": qcore.SIGMA_X,
    "Y": qcore.SIGMA_Y,
    "Z": qcore.SIGMA_Z,
}

#: All 16 two-spin product operators; index p = 4*(b factor) + (a factor).
PRODUCT_LABELS = tuple(b + a for b, a in product(PAULI_LABELS, PAULI_LABELS))
PRODUCT_OPS = tuple(np.kron(_PAULI[lbl[0]], _PAULI[lbl[1]]) for lbl in PRODUCT_LABELS)

#: Observables a spectrometer sees directly: transverse magnetization of each
#: spin plus its antiphase partner (the in-phase/antiphase doublet lines).
DETECTABLE_LABELS = ("IX", "IY", "ZX", "ZY", "XI", "YI", "XZ", "YZ")
DETECTABLE_INDICES = tuple(PRODUCT_LABELS.index(lbl) for lbl in DETECTABLE_LABELS)

_FIT_INDICES = tuple(p for p in range(16) if PRODUCT_LABELS[p] != "II")


class RankDeficiencyError(ValueError):
    """Raised when the supplied records cannot determine all 15 coefficients."""


@dataclass(frozen=True)
class ReadoutRecord:
    """Observations of one readout experiment.

    ``observed`` is indexed by PRODUCT_LABELS and holds the product-operator
    expectations of the post-pulse state (the identity slot is always 1).
    Observations are modeled as exact expectations rather than synthesized
    spectra; the reconstruction consumes only the transverse-detectable
    subset, mirroring what a spectrometer extracts from line fits.
    """

    readout_b: str
    readout_a: str
    observed: np.ndarray

    def __post_init__(self) -> None:
        if self.readout_b not in READOUT_PULSES or self.readout_a not in READOUT_PULSES:
            raise ValueError(f"readout pulses must be in {READOUT_PULSES}")
        obs = np.asarray(self.observed, dtype=float)
        if obs.shape != (16,):
            raise ValueError("observed must hold 16 values")
        if not np.all(np.isfinite(obs)):
            raise ValueError("observed values must be finite")
        if abs(obs[0] - 1.0) > 1e-9:
            raise ValueError("identity expectation must be 1")
        object.__setattr__(self, "observed", obs)


def readout_unitary(readout_b: str, readout_a: str) -> np.ndarray:
    """Two-spin unitary of a readout pulse pair."""
    pulse = {
        "I": qcore.ID2,
        "X90": qcore.pauli_rotation("X", np.pi / 2),
        "Y90": qcore.pauli_rotation("Y", np.pi / 2),
    }
    return np.kron(pulse[readout_b], pulse[readout_a])


def _expectations(rho: np.ndarray) -> np.ndarray:
    return np.array([float(np.real(np.trace(op @ rho))) for op in PRODUCT_OPS])


def simulate_readouts(rho: np.ndarray) -> list[ReadoutRecord]:
    """Deterministic, noise-free readout records for all 9 pulse pairs."""
    rho = qcore.check_density_matrix(rho, psd_floor=1e-6)
    records = []
    for rb, ra in product(READOUT_PULSES, READOUT_PULSES):
        u = readout_unitary(rb, ra)
        rotated = u @ rho @ u.conj().T
        records.append(
            ReadoutRecord(readout_b=rb, readout_a=ra, observed=_expectations(rotated))
        )
    return records


def reconstruct(records: list[ReadoutRecord]) -> np.ndarray:
    """Least-squares fit of rho = (I + sum_P c_P P)/4 from readout records.

    Hermiticity and unit trace hold by construction.  Eigenvalues are
    clipped to zero (with trace renormalization) only when the fit dips
    below -1e-6; smaller negative dips are left untouched.
    """
    if not records:
        raise RankDeficiencyError("no readout records supplied")
    rows = []
    values = []
    for rec in records:
        u = readout_unitary(rec.readout_b, rec.readout_a)
        udag = u.conj().T
        for q in DETECTABLE_INDICES:
            # tr(Q U P U^H)/4 is the response of measurement Q to coefficient c_P
            back = udag @ PRODUCT_OPS[q] @ u
            rows.append(
                [float(np.real(np.trace(back @ PRODUCT_OPS[p]))) / 4.0 for p in _FIT_INDICES]
            )
            values.append(rec.observed[q])
    design = np.array(rows)
    target = np.array(values)
    coeffs, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < len(_FIT_INDICES):
        raise RankDeficiencyError(
            f"records determine only {rank} of {len(_FIT_INDICES)} coefficients"
        )
    rho = qcore.ID4.copy()
    for c, p in zip(coeffs, _FIT_INDICES):
        rho = rho + c * PRODUCT_OPS[p]
    rho = rho / 4.0
    rho = (rho + rho.conj().T) / 2.0
    if float(np.min(np.linalg.eigvalsh(rho))) < -1e-6:
        rho = clip_to_density(rho)
    return rho


def clip_to_density(rho: np.ndarray) -> np.ndarray:
    """Project a Hermitian matrix to the nearest PSD one and renormalize trace."""
    rho = np.asarray(rho, dtype=complex)
    rho = (rho + rho.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0.0, None)
    total = float(np.sum(vals))
    if total <= 0:
        raise ValueError("matrix has no positive weight to renormalize")
    return (vecs * (vals / total)) @ vecs.conj().T


@dataclass(frozen=True)
class ModulusTable:
    """Element moduli |rho_jk| on the 0..3 = |00>..|11> axes."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (4, 4):
            raise ValueError("modulus table must be 4x4")
        if np.any(vals < 0) or np.max(np.abs(vals - vals.T)) > 1e-9:
            raise ValueError("modulus table must be symmetric and non-negative")
        if np.any(np.diag(vals) > 1.0 + 1e-9):
            raise ValueError("diagonal moduli cannot exceed 1")
        object.__setattr__(self, "values", vals)

    def to_rows(self) -> list[tuple[int, int, float]]:
        """Flat (row, col, modulus) triples, row-major."""
        return [(j, k, float(self.values[j, k])) for j in range(4) for k in range(4)]

    def to_json_dict(self) -> dict:
        return {
            "axis": list(qcore.BASIS_LABELS),
            "modulus": [[float(v) for v in row] for row in self.values],
        }


def element_modulus_table(rho: np.ndarray) -> ModulusTable:
    """Moduli of all matrix elements of ``rho``."""
    rho = qcore.check_density_matrix(rho, psd_floor=1e-6)
    return ModulusTable(np.abs(rho))


@dataclass(frozen=True)
class ElementError:
    """Largest element-modulus disagreement, absolute and relative.

    ``relative`` is normalized by the largest modulus of the reference
    (theoretical) matrix.
    """

    absolute: float
    relative: float


def max_element_error(rho_exp: np.ndarray, rho_theory: np.ndarray) -> ElementError:
    """Max over elements of | |rho_exp| - |rho_theory| |."""
    exp_mod = np.abs(np.asarray(rho_exp, dtype=complex))
    th_mod = np.abs(np.asarray(rho_theory, dtype=complex))
    if exp_mod.shape != (4, 4) or th_mod.shape != (4, 4):
        raise ValueError("inputs must be 4x4 matrices")
    absolute = float(np.max(np.abs(exp_mod - th_mod)))
    scale = float(np.max(th_mod))
    if scale <= 0:
        raise ValueError("reference matrix has no nonzero element")
    return ElementError(absolute=absolute, relative=absolute / scale)
