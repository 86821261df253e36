"""Rendering of sweep results as matplotlib figures.

Figures show, per channel, the renormalized total output intensity, the
incoherent sum of the incident and generated intensities, and the
interference term, all versus the driving detuning. Purely a
presentation layer over the CSV rows.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .sweep import SweepRow


def _series(rows: Sequence[SweepRow], phi: float, channel: str):
    sel = [r for r in rows if r.phi == phi]
    x = [r.delta_d for r in sel]
    if channel == "s":
        tot = [r.i_s_tot for r in sel]
        inc_gen = [r.i_s_inc + r.i_s_gen for r in sel]
        interf = [r.i_s_interf for r in sel]
        gen = [r.i_s_gen for r in sel]
    else:
        tot = [r.i_d_tot for r in sel]
        inc_gen = [r.i_d_inc + r.i_d_gen for r in sel]
        interf = [r.i_d_interf for r in sel]
        gen = [r.i_d_gen for r in sel]
    return x, tot, inc_gen, interf, gen


def render_sweep_figure(
    rows: Sequence[SweepRow],
    path,
    channel: str = "s",
    title: str = "",
    show_generated_inset: bool = False,
) -> None:
    """Write a PNG of the intensity decomposition versus detuning.

    One panel per relative-phase value present in the rows. channel
    selects which output ('s' or 'd') is plotted; 'both' draws s.
    """
    if channel == "both":
        channel = "s"
    phis = sorted({r.phi for r in rows})
    fig, axes = plt.subplots(
        1, len(phis), figsize=(5.2 * len(phis), 4.0), squeeze=False, sharey=True
    )
    label = channel
    for ax, phi in zip(axes[0], phis):
        x, tot, inc_gen, interf, gen = _series(rows, phi, channel)
        ax.plot(x, tot, "b--", label=rf"$|E_{{{label}}}^{{tot}}/E_{{{label}0}}|^2$")
        ax.plot(x, inc_gen, "r-", label="incident + generated")
        ax.plot(x, interf, "k-.", label="interference")
        ax.axhline(1.0, color="gray", lw=0.5)
        ax.set_xlabel(r"$\Delta_d$ ($\gamma_{12}$ units)")
        ax.set_title(rf"$\phi = {phi / 3.141592653589793:.2f}\pi$")
        ax.legend(fontsize=8)
        if show_generated_inset:
            inset = ax.inset_axes([0.62, 0.62, 0.34, 0.3])
            inset.plot(x, gen, "g-")
            inset.set_title("generated", fontsize=7)
            inset.tick_params(labelsize=6)
    axes[0][0].set_ylabel("renormalized intensity")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
