"""Closed-form perturbative response of the driven three-level medium.

First- and second-order steady-state coherences of the 2-1 and 3-1
transitions, with the control field resummed to all orders through the
shared denominator xi. Valid for weak drive and signal fields on top of
an undepleted ground state.
"""

from __future__ import annotations

from typing import Optional

from .lindblad import CoherenceSet, DriveConfiguration, EffectiveLinewidths


def xi(
    linewidths: EffectiveLinewidths, delta_d: float, omega_c_magnitude: float
) -> complex:
    """Response denominator (Gamma21 + i*Dd)(Gamma31 + i*Dd) + |Omega_c|^2/4."""
    return (linewidths.Gamma21 + 1j * delta_d) * (
        linewidths.Gamma31 + 1j * delta_d
    ) + 0.25 * omega_c_magnitude**2


def first_order_coherences(
    config: DriveConfiguration, linewidths: EffectiveLinewidths
):
    """Linear-response coherences (rho21_1, rho31_1).

    rho21_1 = i*(Od + Otd)*(Gamma31 + i*Dd) / (2 xi)
    rho31_1 = i*(Os + Ots)*(Gamma21 + i*Dd) / (2 xi)
    """
    x = xi(linewidths, config.delta_d, config.control_c.magnitude)
    a_d = config.drive_d.amplitude + config.generated_td.amplitude
    a_s = config.signal_s.amplitude + config.generated_ts.amplitude
    rho21_1 = 1j * a_d * (linewidths.Gamma31 + 1j * config.delta_d) / (2.0 * x)
    rho31_1 = 1j * a_s * (linewidths.Gamma21 + 1j * config.delta_d) / (2.0 * x)
    return rho21_1, rho31_1


def second_order_coherences(
    config: DriveConfiguration, linewidths: EffectiveLinewidths
):
    """Three-wave-mixing coherences (rho21_2, rho31_2).

    rho21_2 = -Oc^* (Os + Ots) / (4 xi)   (difference-frequency pathway)
    rho31_2 = -Oc   (Od + Otd) / (4 xi)   (sum-frequency pathway)
    """
    x = xi(linewidths, config.delta_d, config.control_c.magnitude)
    a_c = config.control_c.amplitude
    a_d = config.drive_d.amplitude + config.generated_td.amplitude
    a_s = config.signal_s.amplitude + config.generated_ts.amplitude
    rho21_2 = -a_c.conjugate() * a_s / (4.0 * x)
    rho31_2 = -a_c * a_d / (4.0 * x)
    return rho21_2, rho31_2


def coherence_set(
    config: DriveConfiguration, linewidths: EffectiveLinewidths
) -> CoherenceSet:
    """All four order-resolved coherences as one record."""
    rho21_1, rho31_1 = first_order_coherences(config, linewidths)
    rho21_2, rho31_2 = second_order_coherences(config, linewidths)
    return CoherenceSet(rho21_1, rho31_1, rho21_2, rho31_2)


def perturbativity_warning(config: DriveConfiguration) -> Optional[str]:
    """Soft validity check: weak drives should satisfy |O| <= 0.1 |Oc|.

    Returns a warning string when violated, None otherwise; nothing is
    enforced.
    """
    bound = 0.1 * config.control_c.magnitude
    weak = {
        "drive_d": config.drive_d.magnitude,
        "signal_s": config.signal_s.magnitude,
    }
    offenders = [name for name, mag in weak.items() if mag > bound]
    if offenders:
        return (
            f"{', '.join(offenders)} exceed(s) 0.1*|Omega_c| = {bound:.3g}; "
            "perturbative closed forms may be inaccurate"
        )
    return None
