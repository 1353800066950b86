from __future__ import annotations

from typing import Sequence

from matplotlib.figure import Figure  # type: ignore

from .curves import SeparabilityCurve
from .fitting import LinearFit

COLOURS = ("tab:red", "tab:blue", "tab:green", "tab:purple")


def curve_label(curve: SeparabilityCurve, fallback: str) -> str:
    return curve.ensemble.name.lower() if curve.ensemble else fallback


def plot_curves(
    curves: Sequence[SeparabilityCurve],
    path: str,
    *,
    labels: Sequence[str] | None = None,
    derivative: bool = False,
    offsets: Sequence[float] | None = None,
    window: tuple[float, float] | None = None,
    overlay_scale: float = 1.0,
    fits: Sequence[LinearFit] = (),
) -> None:
    """Writes a static SVG line chart of one or more curves.

    Args:
      curves (Sequence[SeparabilityCurve]):
        The curves. The first is the base curve; the rest are overlays.

      path (str):
        The output file.

      labels (Sequence[str] | None, optional):
        Legend entries. Defaults to the curves' ensemble names.

      derivative (bool, optional):
        Plot dσ̂/dC instead of σ̂. Defaults to False.

      offsets (Sequence[float] | None, optional):
        Vertical offsets per curve, used to separate derivative traces. Defaults to None.

      window (tuple[float, float] | None, optional):
        Restricts the C axis. Defaults to None.

      overlay_scale (float, optional):
        Multiplies every overlay curve. Defaults to 1.0.

      fits (Sequence[LinearFit], optional):
        Segment fits drawn over the base curve. Defaults to ().
    """
    figure = Figure(figsize=(8, 5))
    ax = figure.subplots()

    for i, curve in enumerate(curves):
        shown = curve.window(*window) if window else curve
        values = shown.derivative() if derivative else shown.sigma
        if i > 0:
            values = values * overlay_scale
        if offsets is not None and i < len(offsets):
            values = values + offsets[i]

        label = labels[i] if labels and i < len(labels) else curve_label(curve, f"curve {i + 1}")
        if i > 0 and overlay_scale != 1.0:
            label += f" (x{overlay_scale:g})"
        ax.plot(shown.c, values, color=COLOURS[i % len(COLOURS)], linewidth=0.8, label=label)

    for fit in fits:
        xs = [fit.a, fit.b]
        ax.plot(xs, fit.predict(xs), color="black", linestyle="--", linewidth=0.8)

    ax.set_xlabel("C")
    ax.set_ylabel("dσ/dC" if derivative else "σ(C)")
    if window:
        ax.set_xlim(*window)
    ax.grid(alpha=0.3)
    ax.legend()

    figure.savefig(path, format="svg", bbox_inches="tight")
