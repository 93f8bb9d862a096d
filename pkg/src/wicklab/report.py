"""Machine-readable outputs and companion figures for sweep results.

Each run writes  <out_dir>/<scenario>.csv  with the fixed header
h,t,metric,value,wall_time_s;  a JSON summary with slope fits, guard
values, the config hash, and pass/fail verdicts; and (unless disabled)
PNG figures next to the CSV.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .sweeps import SweepResult

CSV_HEADER = "h,t,metric,value,wall_time_s"


def write_csv(result: SweepResult, path: Path) -> None:
    lines = [CSV_HEADER]
    for r in result.rows:
        lines.append(f"{r.h:.12g},{r.t:.12g},{r.metric},{r.value:.12g},{r.wall_time_s:.6g}")
    path.write_text("\n".join(lines) + "\n")


def write_summary(result: SweepResult, path: Path) -> None:
    path.write_text(json.dumps(result.summary_dict(), indent=2, sort_keys=True,
                               default=float) + "\n")


def _rows(result, metric):
    return [r for r in result.rows if r.metric == metric]


def _loglog_fit_panel(ax, pts, fit, label):
    hs = np.array([p[0] for p in pts])
    vals = np.array([p[1] for p in pts])
    ax.loglog(hs, vals, "o", label=label)
    if fit is not None:
        ref = np.exp(fit.intercept) * hs ** fit.slope
        ax.loglog(hs, ref, "-", alpha=0.7,
                  label=f"slope {fit.slope:.3f} (r$^2$={fit.r2:.3f})")
    ax.set_xlabel("h")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)


def render_figures(result: SweepResult, out_dir: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    scen = result.scenario

    def save(fig, name):
        p = out_dir / f"{scen}_{name}.png"
        fig.tight_layout()
        fig.savefig(p, dpi=150)
        plt.close(fig)
        written.append(p)

    if scen in ("ehrenfest", "tdhf_vlasov"):
        metric = "sup_error" if scen == "ehrenfest" else "l1_distance"
        t_max = result.config["t_max"]
        pts = [(r.h, r.value) for r in _rows(result, metric)
               if abs(r.t - t_max) < 1e-12 and r.value > 0]
        key = f"{metric}_at_t_max" if scen == "ehrenfest" else "l1_distance_at_t_max"
        fit = result.fits.get("sup_error_at_t_max" if scen == "ehrenfest" else key)
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        _loglog_fit_panel(ax, pts, fit, f"{metric} at t={t_max}")
        ax.set_ylabel(metric)
        save(fig, "rate")
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        for h in result.config["h_list"]:
            series = [(r.t, r.value) for r in _rows(result, metric) if r.h == h]
            series.sort()
            ax.plot([s[0] for s in series], [s[1] for s in series], "o-",
                    label=f"h={h}")
        ax.set_xlabel("t")
        ax.set_ylabel(metric)
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        save(fig, "vs_time")
    elif scen == "ehrenfest_time":
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        series = sorted((r.t, r.value) for r in _rows(result, "l1_distance"))
        ax.plot([s[0] for s in series], [s[1] for s in series], "o-")
        ax.axhline(2.0, color="k", ls="--", alpha=0.5)
        ax.axhline(1.5, color="r", ls=":", alpha=0.5)
        ax.set_xlabel("t")
        ax.set_ylabel("L1 distance")
        ax.grid(alpha=0.3)
        save(fig, "distance")
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        for metric, style in (("marginal_lower_bound", "o-"), ("marginal_oracle", "s--")):
            series = sorted((r.t, r.value) for r in _rows(result, metric))
            ax.plot([s[0] for s in series], [s[1] for s in series], style,
                    label=metric)
        ax.set_xlabel("t")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        save(fig, "marginals")
    elif scen == "counterexample":
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        pts = sorted((r.t, r.value) for r in _rows(result, "factor_trace_norm"))
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], "o-")
        ax.set_xlabel("lambda")
        ax.set_ylabel("factor trace norm")
        ax.grid(True, which="both", alpha=0.3)
        save(fig, "factor_norms")
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        p1 = sorted((r.t, r.value) for r in _rows(result, "symbol_ball_mass"))
        p2 = sorted((r.t, r.value) for r in _rows(result, "wick_ball_mass"))
        ax.semilogx([p[0] for p in p1], [p[1] for p in p1], "o-", label="|symbol| mass")
        ax.semilogx([p[0] for p in p2], [p[1] for p in p2], "s--", label="|Wick| mass")
        ax.set_xlabel("R")
        ax.set_ylabel("ball mass")
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
        save(fig, "ball_masses")
    elif scen == "composition":
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        for m in result.config["orders"]:
            pts = [(r.h, r.value) for r in _rows(result, "remainder_l1")
                   if r.t == float(m)]
            fit = result.fits.get(f"remainder_slope_m{m}")
            _loglog_fit_panel(ax, pts, fit, f"m={m}")
        ax.set_ylabel("normalized L1 remainder")
        save(fig, "remainders")
    return written


def write_outputs(result: SweepResult, out_dir: str | Path,
                  figures: bool = True) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{result.scenario}.csv"
    json_path = out / f"{result.scenario}_summary.json"
    write_csv(result, csv_path)
    write_summary(result, json_path)
    figs = render_figures(result, out) if figures else []
    return {"csv": csv_path, "summary": json_path, "figures": figs}
