"""Preset datasets for the figure panels.

Each preset bakes in the caption parameters (``Omega = omega = 1``) plus the
documented choices the captions leave open: ``omega_c = 1``, the N list
``(4, 10, 40, 100)`` for finite-size panels, ``g0/omega = 0.249`` for the
``alpha = 0`` finite-size panels, and the axis ranges below.  Bump
``PRESET_VERSION`` whenever a table entry changes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .ed import EDConfig
from .model import ModelParams
from .sweep import (
    AxisSpec,
    SweepResult,
    extract_contour,
    render_manifest,
    run_sweep,
    sweep_metadata,
    write_manifest,
    write_table,
)

PRESET_VERSION = "1"
DEFAULT_N_LIST = (4, 10, 40, 100)

# alpha = 0 branch: critical point lowered from chi = 1 to sqrt(1 - 4 g0)
IGNORE_A2 = dict(Omega=1.0, omega=1.0, alpha=0.0, g0=0.249)
# alpha = 2 branch: critical point appears at sqrt(4 g0 - 1), stable above sqrt((4 g0 - 1)/2)
WITH_A2 = dict(Omega=1.0, omega=1.0, alpha=2.0, g0=0.251)

# Superradiant probe for the finite-size convergence check on fig5a.
FIG5A_PROBE_CHI = 0.055
CONTOUR_LEVEL_PSI = 1e-6


@dataclass(frozen=True)
class Series:
    label: str
    base: ModelParams
    axes: tuple
    backend: str = "analytic"
    n_list: tuple = ()


@dataclass(frozen=True)
class FigurePreset:
    name: str
    description: str
    series: tuple
    contours: tuple = ()  # (field, level) pairs for 2-D series


def _chi(start, stop, count):
    return AxisSpec("chi", start, stop, count)


def _params(template, n):
    return ModelParams(n=n, **template)


FIGURES = {
    "fig2a": FigurePreset(
        "fig2a", "excitation energies and E_g/N vs chi, alpha=0, g0=0.249, n=1",
        (Series("n1", _params(IGNORE_A2, 1), (_chi(0.001, 0.2, 400),)),),
    ),
    "fig2b": FigurePreset(
        "fig2b", "excitation energies and E_g/N vs chi, alpha=0, g0=0.249, n=0",
        (Series("n0", _params(IGNORE_A2, 0), (_chi(0.001, 1.5, 400),)),),
    ),
    "fig2c": FigurePreset(
        "fig2c", "excitation energies and E_g/N vs chi, alpha=2, g0=0.251, n=1",
        (Series("n1", _params(WITH_A2, 1), (_chi(0.02, 0.2, 400),)),),
    ),
    "fig2d": FigurePreset(
        "fig2d", "excitation energies and E_g/N vs chi, alpha=2, g0=0.251, n=0",
        (Series("n0", _params(WITH_A2, 0), (_chi(0.001, 1.5, 400),)),),
    ),
    "fig3a": FigurePreset(
        "fig3a", "position spread vs chi, alpha=0 (n=1 main, n=0 insert)",
        (
            Series("n1", _params(IGNORE_A2, 1), (_chi(0.001, 0.2, 400),)),
            Series("n0", _params(IGNORE_A2, 0), (_chi(0.001, 1.5, 400),)),
        ),
    ),
    "fig3b": FigurePreset(
        "fig3b", "position spread vs chi, alpha=2 (n=1 main, n=0 insert)",
        (
            Series("n1", _params(WITH_A2, 1), (_chi(0.03, 0.2, 400),)),
            Series("n0", _params(WITH_A2, 0), (_chi(0.001, 1.5, 400),)),
        ),
    ),
    "fig3c": FigurePreset(
        "fig3c", "dressed coupling chi_n vs chi, alpha=2 (n=1 main, n=0 insert)",
        (
            Series("n1", _params(WITH_A2, 1), (_chi(0.03, 0.2, 400),)),
            Series("n0", _params(WITH_A2, 0), (_chi(0.001, 1.5, 400),)),
        ),
    ),
    "fig4a": FigurePreset(
        "fig4a", "order parameter over chi x g0, n=1, alpha=2",
        (Series("n1", _params(WITH_A2, 1),
                (_chi(0.03, 0.12, 121), AxisSpec("g0", 0.24, 0.27, 121))),),
        contours=(("psi_q", CONTOUR_LEVEL_PSI), ("s", 0.0)),
    ),
    "fig4b": FigurePreset(
        "fig4b", "order parameter over chi x g0, n=1, alpha=0",
        (Series("n1", _params(IGNORE_A2, 1),
                (_chi(0.01, 0.3, 121), AxisSpec("g0", 0.2, 0.26, 121))),),
        contours=(("psi_q", CONTOUR_LEVEL_PSI), ("s", 0.0)),
    ),
    "fig4c": FigurePreset(
        "fig4c", "order parameter over chi x g0, n=0, alpha=2",
        (Series("n0", _params(WITH_A2, 0),
                (_chi(0.03, 0.12, 121), AxisSpec("g0", 0.24, 0.27, 121))),),
        contours=(("psi_q", CONTOUR_LEVEL_PSI), ("s", 0.0)),
    ),
    "fig5a": FigurePreset(
        "fig5a", "finite-N order parameter vs chi, alpha=2, g0=0.251 (n=1 main, n=0 insert)",
        (
            Series("n1", _params(WITH_A2, 1), (_chi(0.05, 0.08, 16),), "ed", DEFAULT_N_LIST),
            Series("n0", _params(WITH_A2, 0), (_chi(0.05, 0.08, 16),), "ed", DEFAULT_N_LIST),
        ),
    ),
    "fig5b": FigurePreset(
        "fig5b", "finite-N order parameter vs chi, alpha=0, g0=0.249, n=1",
        (Series("n1", _params(IGNORE_A2, 1), (_chi(0.02, 0.12, 21),), "ed", DEFAULT_N_LIST),),
    ),
    "fig5c": FigurePreset(
        "fig5c", "finite-N order parameter vs chi, alpha=0, n=0",
        (Series("n0", _params(IGNORE_A2, 0), (_chi(0.5, 2.0, 16),), "ed", DEFAULT_N_LIST),),
    ),
}

FIGURE_NAMES = tuple(FIGURES)


def run_ed_study(base: ModelParams, chi_axis: AxisSpec, n_list, cfg: EDConfig = EDConfig(),
                 workers: int = 1) -> dict:
    """One ED sweep over ``chi`` per spin count; returns ``{N: SweepResult}``."""
    return {
        int(N): run_sweep(replace(base, N=int(N)), (chi_axis,), cfg, workers)
        for N in n_list
    }


def write_ed_study(study: dict, out_dir, prefix: str = "ed") -> dict:
    """Write ``<prefix>_N<N>.csv`` per spin count and return manifest entries."""
    out_dir = Path(out_dir)
    entries = []
    for N, result in study.items():
        name = f"{prefix}_N{N}.csv"
        write_table(result, out_dir / name)
        meta = sweep_metadata(result)
        meta["file"] = name
        meta["all_converged"] = all(r["status"] in ("ok", "unstable") for r in result.records)
        entries.append(meta)
    return {"studies": entries}


def _contour_payload(result: SweepResult, contours) -> dict:
    payload = {}
    for field, level in contours:
        lines = extract_contour(result, field, level)
        payload[f"{field}@{level!r}"] = [[[float(a), float(b)] for a, b in line] for line in lines]
    return payload


def build_figure(name: str, out_dir, workers: int = 1) -> Path:
    """Compute and write the dataset of one preset; returns the manifest path."""
    if name not in FIGURES:
        raise KeyError(f"unknown figure {name!r}; choose from {', '.join(FIGURE_NAMES)}")
    preset = FIGURES[name]
    out_dir = Path(out_dir)
    series_meta = []
    for series in preset.series:
        if series.backend == "ed":
            study = run_ed_study(series.base, series.axes[0], series.n_list, EDConfig(), workers)
            meta = write_ed_study(study, out_dir, prefix=f"{name}_{series.label}")
            meta["label"] = series.label
        else:
            result = run_sweep(series.base, series.axes, "analytic", workers)
            file = f"{name}_{series.label}.csv"
            write_table(result, out_dir / file)
            meta = sweep_metadata(result)
            meta["file"] = file
            meta["label"] = series.label
            if preset.contours:
                contour_file = f"{name}_{series.label}_contours.json"
                payload = _contour_payload(result, preset.contours)
                (out_dir / contour_file).write_text(render_manifest(payload))
                meta["contours"] = contour_file
        series_meta.append(meta)
    manifest = {
        "tool": "hybrid_dicke",
        "version": __version__,
        "figure": name,
        "preset_version": PRESET_VERSION,
        "description": preset.description,
        "series": series_meta,
    }
    path = out_dir / "manifest.json"
    write_manifest(manifest, path)
    return path
