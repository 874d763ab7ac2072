"""Matplotlib figure rendering for the CLI report paths.

Figures are written next to the delimited output files; everything uses
the Agg backend so the CLI stays headless.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
}


def _styled():
    return plt.rc_context(_STYLE)


def count_figure(table, path) -> None:
    """Log-log growth of the counts against the height bound."""
    Bs = [r.B for r in table.rows]
    weak = [r.projective_weak for r in table.rows]
    camp = [r.projective_campana for r in table.rows]
    m = int(table.metadata.get("m", 2))
    with _styled():
        fig, ax = plt.subplots()
        ax.loglog(Bs, weak, "o-", label="weak")
        if all(c is not None for c in camp):
            ax.loglog(Bs, camp, "s-", label="strict")
        if weak[-1] > 0:
            ref = [weak[-1] * (B / Bs[-1]) ** (1.0 / m) for B in Bs]
            ax.loglog(Bs, ref, "k--", lw=0.8, label=f"slope 1/{m}")
        ax.set_xlabel("height bound B")
        ax.set_ylabel("points counted")
        ax.set_title(
            f"{table.metadata.get('field', '?')}  m={m}"
        )
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def fit_figure(report, table, kind, path) -> None:
    """Counts with the fitted slope plus the normalised ratio panel."""
    Bs = [B for B, _ in report.ratios]
    rs = [r for _, r in report.ratios]
    counts = {
        "weak": [r.projective_weak for r in table.rows],
        "campana": [r.projective_campana for r in table.rows],
        "mfull": [r.vector_mfull for r in table.rows],
    }[kind]
    allB = [r.B for r in table.rows]
    with _styled():
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.2))
        ax1.loglog(allB, counts, "o", label=kind)
        anchor_B, anchor_N = Bs[-1], rs[-1] * Bs[-1] ** (1 / report.m) * math.log(
            Bs[-1]
        ) ** (report.b - 1)
        fitted = [
            anchor_N * (B / anchor_B) ** report.slope_est for B in Bs
        ]
        ax1.loglog(Bs, fitted, "k--", lw=0.8,
                   label=f"slope {report.slope_est:.3f}")
        ax1.set_xlabel("B")
        ax1.set_ylabel("N(B)")
        ax1.legend()
        ax2.semilogx(Bs, rs, "o-")
        ax2.set_xlabel("B")
        ax2.set_ylabel(f"N / (B^(1/{report.m}) log(B)^{report.b - 1})")
        ax2.set_title(f"stability {report.stability:.3f}")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def series_figure(coeff_rows, vanish_max, m, path) -> None:
    """Stem plot of quotient coefficient magnitudes."""
    ns = [n for n, _, _ in coeff_rows]
    mags = [abs(complex(re, im)) for _, re, im in coeff_rows]
    with _styled():
        fig, ax = plt.subplots()
        ax.semilogy(ns, [max(v, 1e-18) for v in mags], "o-")
        ax.axvspan(0.5, m + 0.5, color="tab:green", alpha=0.15,
                   label=f"must vanish (max {vanish_max:.1e})")
        ax.set_xlabel("coefficient index n")
        ax.set_ylabel("|quotient coefficient|")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def constant_figure(trace, path) -> None:
    """Cumulative Euler product against the prime cutoff."""
    ps = [p for p, _ in trace]
    vals = [v for _, v in trace]
    with _styled():
        fig, ax = plt.subplots()
        ax.semilogx(ps, vals, "-")
        ax.set_xlabel("prime cutoff")
        ax.set_ylabel("truncated Euler product")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
