"""Exact model of the cyclically driven three-level system.

Everything here works in units of the 2->1 relaxation rate (gamma12 = 1):
all rates, Rabi frequencies and detunings are dimensionless. The basis
order is |1>, |2>, |3> (indices 0, 1, 2). Density matrices are vectorized
by column stacking, vec(rho)[3*j + i] = rho[i, j], so vec(A rho B) =
kron(B.T, A) vec(rho).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSteadyStateError,
    IntegrationError,
    NonHermitianError,
    PerturbationFitError,
)

HERMITICITY_TOL = 1e-8
TRACE_TOL = 1e-6


def _wrap_phase(phi: float) -> float:
    """Reduce an angle to the interval (-pi, pi]."""
    phi = math.fmod(phi, 2.0 * math.pi)
    if phi > math.pi:
        phi -= 2.0 * math.pi
    elif phi <= -math.pi:
        phi += 2.0 * math.pi
    return phi


@dataclass(frozen=True)
class RelaxationRates:
    """The five dissipation rates, in units of gamma12.

    gamma12 is fixed to 1 by the unit convention; use :meth:`from_raw`
    to rescale an arbitrary positive set of rates.
    """

    gamma13: float
    gamma23: float
    gamma12: float = 1.0
    gphi2: float = 0.0
    gphi3: float = 0.0

    def __post_init__(self):
        for name in ("gamma12", "gamma13", "gamma23", "gphi2", "gphi3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.gamma12 != 1.0:
            raise ValueError(
                "gamma12 must equal 1 (unit convention); "
                "use RelaxationRates.from_raw to rescale"
            )

    @classmethod
    def from_raw(cls, gamma12, gamma13, gamma23, gphi2=0.0, gphi3=0.0):
        """Build from rates in arbitrary units by dividing out gamma12."""
        if gamma12 <= 0:
            raise ValueError("gamma12 must be > 0 to set the unit scale")
        return cls(
            gamma13=gamma13 / gamma12,
            gamma23=gamma23 / gamma12,
            gphi2=gphi2 / gamma12,
            gphi3=gphi3 / gamma12,
        )


@dataclass(frozen=True)
class EffectiveLinewidths:
    """Coherence decay rates of the 2-1 and 3-1 transitions."""

    Gamma21: float
    Gamma31: float


def effective_linewidths(rates: RelaxationRates) -> EffectiveLinewidths:
    """Gamma21 = (gamma12 + gphi2)/2, Gamma31 = (gamma13 + gamma23 + gphi3)/2."""
    return EffectiveLinewidths(
        Gamma21=0.5 * (rates.gamma12 + rates.gphi2),
        Gamma31=0.5 * (rates.gamma13 + rates.gamma23 + rates.gphi3),
    )


@dataclass(frozen=True)
class DriveField:
    """One classical drive tone: Rabi magnitude >= 0 and phase in radians.

    The complex amplitude follows the repo-wide sign convention
    Omega = |Omega| * exp(-i*phase).
    """

    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.magnitude < 0:
            raise ValueError(f"magnitude must be >= 0, got {self.magnitude}")

    @property
    def amplitude(self) -> complex:
        return self.magnitude * np.exp(-1j * self.phase)

    @classmethod
    def zero(cls) -> "DriveField":
        return cls(0.0, 0.0)


@dataclass(frozen=True)
class DriveConfiguration:
    """All drive tones plus the driving-field detuning delta_d.

    drive_d couples 1-2, control_c couples 2-3 (resonantly), signal_s
    couples 1-3. generated_td / generated_ts are the local amplitudes of
    the two mixing products (zero at the medium entrance). The control
    field is treated as undepleted everywhere.
    """

    drive_d: DriveField
    control_c: DriveField
    signal_s: DriveField
    delta_d: float = 0.0
    generated_td: DriveField = field(default_factory=DriveField.zero)
    generated_ts: DriveField = field(default_factory=DriveField.zero)

    @property
    def relative_phase(self) -> float:
        """phi = phi_d + phi_c - phi_s, reduced to (-pi, pi]."""
        return _wrap_phase(
            self.drive_d.phase + self.control_c.phase - self.signal_s.phase
        )


class DensityMatrix3:
    """3x3 Hermitian, trace-one state of the artificial atom."""

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
        defect = np.abs(m - m.conj().T).max()
        if defect > HERMITICITY_TOL:
            raise NonHermitianError(
                f"density matrix Hermiticity defect {defect:.3e} > {HERMITICITY_TOL:.0e}"
            )
        m = 0.5 * (m + m.conj().T)
        tr = m.trace().real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond {TRACE_TOL:.0e}")
        self._m = m
        self._m.setflags(write=False)

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @classmethod
    def ground(cls) -> "DensityMatrix3":
        m = np.zeros((3, 3), dtype=complex)
        m[0, 0] = 1.0
        return cls(m)

    def population(self, level: int) -> float:
        """Population of level |1>, |2> or |3> (argument 1, 2 or 3)."""
        return self._m[level - 1, level - 1].real

    def coherence(self, i: int, j: int) -> complex:
        """Matrix element rho_ij in 1-based level labels."""
        return self._m[i - 1, j - 1]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self._m).min())

    def hermiticity_defect(self) -> float:
        return float(np.abs(self._m - self._m.conj().T).max())

    def trace_defect(self) -> float:
        return abs(self._m.trace().real - 1.0)

    def __repr__(self):
        pops = ", ".join(f"p{k}={self.population(k):.4f}" for k in (1, 2, 3))
        return f"DensityMatrix3({pops})"


@dataclass(frozen=True)
class Liouvillian:
    """9x9 generator acting on column-stacked vec(rho)."""

    matrix: np.ndarray

    def trace_row_defect(self) -> float:
        """Max deviation of vec(I)^T . L from zero (trace preservation)."""
        vec_id = np.eye(3, dtype=complex).flatten(order="F")
        return float(np.abs(vec_id @ self.matrix).max())


@dataclass(frozen=True)
class CoherenceSet:
    """Order-resolved steady-state coherences of the 2-1 and 3-1 transitions."""

    rho21_1: complex
    rho31_1: complex
    rho21_2: complex
    rho31_2: complex


def _sigma(i: int, j: int) -> np.ndarray:
    """Transition operator |i><j| in 1-based level labels."""
    m = np.zeros((3, 3), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


def build_hamiltonian(config: DriveConfiguration) -> np.ndarray:
    """Rotating-frame Hamiltonian of the driven Delta system.

    H = delta_d*(|2><2| + |3><3|)
        - (1/2)*[(Omega_d + Omega_td)|2><1| + Omega_c|3><2|
                 + (Omega_s + Omega_ts)|3><1| + h.c.]

    The control tone is resonant with the 2-3 spacing by construction, so
    no control detuning appears.
    """
    a_d = config.drive_d.amplitude + config.generated_td.amplitude
    a_s = config.signal_s.amplitude + config.generated_ts.amplitude
    a_c = config.control_c.amplitude
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = config.delta_d
    h[2, 2] = config.delta_d
    h[1, 0] = -0.5 * a_d
    h[2, 1] = -0.5 * a_c
    h[2, 0] = -0.5 * a_s
    h[0, 1] = np.conj(h[1, 0])
    h[1, 2] = np.conj(h[2, 1])
    h[0, 2] = np.conj(h[2, 0])
    return h


def build_liouvillian(H: np.ndarray, rates: RelaxationRates) -> Liouvillian:
    """Generator of the master equation in column-stacked vectorization.

    Dissipation channels: relaxation sigma_12 (gamma12), sigma_13
    (gamma13), sigma_23 (gamma23) and pure dephasing sigma_22 (gphi2),
    sigma_33 (gphi3), each with the standard 1/2-anticommutator structure.
    """
    H = np.asarray(H, dtype=complex)
    defect = np.abs(H - H.conj().T).max()
    if defect > 1e-10:
        raise NonHermitianError(
            f"Hamiltonian Hermiticity defect {defect:.3e} > 1e-10"
        )
    eye = np.eye(3, dtype=complex)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    channels = [
        (rates.gamma12, _sigma(1, 2)),
        (rates.gamma13, _sigma(1, 3)),
        (rates.gamma23, _sigma(2, 3)),
        (rates.gphi2, _sigma(2, 2)),
        (rates.gphi3, _sigma(3, 3)),
    ]
    for rate, c in channels:
        if rate == 0.0:
            continue
        cdc = c.conj().T @ c
        L += rate * (
            np.kron(c.conj(), c)
            - 0.5 * np.kron(eye, cdc)
            - 0.5 * np.kron(cdc.T, eye)
        )
    return Liouvillian(matrix=L)


def apply_liouvillian(L: Liouvillian, rho: np.ndarray) -> np.ndarray:
    """d(rho)/dt for a matrix-form rho (convenience for tests)."""
    v = np.asarray(rho, dtype=complex).flatten(order="F")
    return (L.matrix @ v).reshape((3, 3), order="F")


def evolve(
    rho0: DensityMatrix3,
    L: Liouvillian,
    duration: float,
    step: float = 1e-2,
    return_diagnostics: bool = False,
):
    """Fixed-step 4th-order integration of d vec(rho)/dt = L vec(rho).

    The result is re-Hermitized as (rho + rho^dag)/2; the magnitude of
    that correction and the trace drift are available through
    return_diagnostics.
    """
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    if duration < 0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    v = rho0.matrix.flatten(order="F").copy()
    if duration > 0:
        n = max(1, math.ceil(duration / step))
        h = duration / n
        M = L.matrix
        for _ in range(n):
            k1 = M @ v
            k2 = M @ (v + 0.5 * h * k1)
            k3 = M @ (v + 0.5 * h * k2)
            k4 = M @ (v + h * k3)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    m = v.reshape((3, 3), order="F")
    trace_drift = abs(m.trace().real - 1.0)
    if not np.isfinite(trace_drift) or trace_drift > 1e-6:
        raise IntegrationError(
            f"trace drift {trace_drift:.3e} > 1e-6 after duration {duration}; "
            f"reduce the step (currently {step})"
        )
    herm_correction = float(np.abs(m - m.conj().T).max())
    state = DensityMatrix3(0.5 * (m + m.conj().T))
    if return_diagnostics:
        return state, {"hermitization": herm_correction, "trace_drift": trace_drift}
    return state


def steady_state(L: Liouvillian) -> DensityMatrix3:
    """Unique trace-one solution of L vec(rho) = 0.

    Trace preservation makes the three population rows (vec indices 0, 4,
    8) sum to zero, so dropping one of them never lowers the rank; the
    one with the smallest Euclidean norm is replaced by the trace
    constraint (deterministic choice; ties resolved by lowest index). A
    degenerate null space (dimension > 1) raises.
    """
    M = L.matrix
    sv = np.linalg.svd(M, compute_uv=False)
    scale = sv[0] if sv[0] > 0 else 1.0
    if sv[-2] / scale < 1e-10:
        raise DegenerateSteadyStateError(
            "Liouvillian null space has dimension > 1; steady state not unique"
        )
    A = M.copy()
    population_rows = np.array([0, 4, 8])
    norms = np.linalg.norm(A[population_rows], axis=1)
    row = int(population_rows[int(np.argmin(norms))])
    trace_row = np.zeros(9, dtype=complex)
    trace_row[[0, 4, 8]] = 1.0
    A[row, :] = trace_row
    b = np.zeros(9, dtype=complex)
    b[row] = 1.0
    v = np.linalg.solve(A, b)
    m = v.reshape((3, 3), order="F")
    m /= m.trace().real
    return DensityMatrix3(m)


def steady_state_residual(L: Liouvillian, rho: DensityMatrix3) -> float:
    """||L vec(rho)||_2, the defect of a claimed steady state."""
    v = rho.matrix.flatten(order="F")
    return float(np.linalg.norm(L.matrix @ v))


def _fit_odd_leading(eps: np.ndarray, values: np.ndarray) -> complex:
    """Leading coefficient a1 of values ~ a1*eps + a3*eps^3.

    With a single epsilon this is values/eps; with two or more the two-term
    model is fit by least squares, checking the residual against the
    leading coefficient when overdetermined.
    """
    y = values / eps
    if len(eps) == 1:
        return complex(y[0])
    X = np.stack([np.ones_like(eps), eps**2], axis=1)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    a1 = complex(coef[0])
    if len(eps) > 2 and abs(a1) > 0:
        resid = np.abs(X @ coef - y).max()
        if resid > 1e-6 * abs(a1):
            raise PerturbationFitError(
                f"order-extraction fit residual {resid:.3e} exceeds 1e-6 of the "
                "leading coefficient; drives too strong for perturbation theory"
            )
    return a1


def extract_weak_field_orders(
    config: DriveConfiguration,
    rates: RelaxationRates,
    epsilons,
) -> CoherenceSet:
    """Order-resolved coherences from brute-force steady states.

    The d- and s-drives are scaled by each epsilon (one branch at a time,
    the other weak drive held at zero, the control field untouched), the
    exact steady state is solved, and the coefficients linear in epsilon
    are extracted; they equal the perturbative coherences at the unscaled
    amplitudes. Serves as the implementation-independent oracle for the
    closed-form response module.
    """
    if config.generated_td.magnitude != 0 or config.generated_ts.magnitude != 0:
        raise ValueError("generated fields must be zero for order extraction")
    eps = np.asarray(list(epsilons), dtype=float)
    if len(eps) == 0:
        raise ValueError("need at least one epsilon")
    if np.any(eps > 1e-2) or np.any(eps <= 0):
        raise ValueError("epsilons must lie in (0, 1e-2]")
    if len(eps) > 1 and np.any(np.diff(eps) >= 0):
        raise ValueError("epsilons must be strictly decreasing")

    def branch(scale_d: bool):
        r21 = np.empty(len(eps), dtype=complex)
        r31 = np.empty(len(eps), dtype=complex)
        for k, e in enumerate(eps):
            d = config.drive_d
            s = config.signal_s
            cfg = DriveConfiguration(
                drive_d=DriveField(e * d.magnitude, d.phase) if scale_d else DriveField.zero(),
                control_c=config.control_c,
                signal_s=DriveField.zero() if scale_d else DriveField(e * s.magnitude, s.phase),
                delta_d=config.delta_d,
            )
            rho = steady_state(build_liouvillian(build_hamiltonian(cfg), rates))
            r21[k] = rho.coherence(2, 1)
            r31[k] = rho.coherence(3, 1)
        return r21, r31

    if config.drive_d.magnitude == 0 and config.signal_s.magnitude == 0:
        zero = complex(0.0)
        return CoherenceSet(zero, zero, zero, zero)

    rho21_1 = rho31_2 = complex(0.0)
    rho31_1 = rho21_2 = complex(0.0)
    if config.drive_d.magnitude > 0:
        r21, r31 = branch(scale_d=True)
        rho21_1 = _fit_odd_leading(eps, r21)
        rho31_2 = _fit_odd_leading(eps, r31)
    if config.signal_s.magnitude > 0:
        r21, r31 = branch(scale_d=False)
        rho21_2 = _fit_odd_leading(eps, r21)
        rho31_1 = _fit_odd_leading(eps, r31)
    return CoherenceSet(rho21_1, rho31_1, rho21_2, rho31_2)
