"""
SVG renders of the emitted tables. Figures are a convenience on top of the
CSV outputs and read only the columns written there.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed ids and no timestamp: identical inputs give identical files
matplotlib.rcParams["svg.hashsalt"] = "foodgap"
SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig, fname):
    fig.tight_layout()
    fig.savefig(fname, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return fname


def plot_income_decomposition(decomposition, fname):
    """stacked per-decile bars of the labor and capital income terms"""
    fig, ax = plt.subplots(figsize=(7.5, 4.2))
    x = decomposition["decile"].values
    bottom_pos = np.zeros(x.shape[0])
    bottom_neg = np.zeros(x.shape[0])
    for col, label in (
        ("labor_total", "labor income"),
        ("capital_rate", "capital income: rate"),
        ("capital_stock", "capital income: holdings"),
    ):
        v = decomposition[col].values
        base = np.where(v >= 0.0, bottom_pos, bottom_neg)
        ax.bar(x, v, bottom=base, label=label)
        bottom_pos += np.where(v >= 0.0, v, 0.0)
        bottom_neg += np.where(v < 0.0, v, 0.0)
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xlabel("expenditure decile")
    ax.set_ylabel("income change (model units)")
    ax.set_xticks(x)
    ax.legend(frameon=False)
    return _save(fig, fname)


def plot_welfare(deciles, fname):
    """welfare change per decile relative to base expenditures"""
    frame = deciles.frame
    fig, ax = plt.subplots(figsize=(7.5, 4.2))
    x = frame["decile"].values
    ax.plot(x, 100.0 * frame["cev_pe_rel"], marker="o", label="partial equilibrium")
    ax.plot(x, 100.0 * frame["cev_ge_rel"], marker="s", label="general equilibrium")
    ax.plot(x, 100.0 * frame["engel"], ls="--", label="food-share approximation")
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xlabel("expenditure decile")
    ax.set_ylabel("welfare change (% of expenditures)")
    ax.set_xticks(x)
    ax.legend(frameon=False)
    return _save(fig, fname)


def plot_food_share_curve(curve, fname):
    fig, ax = plt.subplots(figsize=(7.5, 4.2))
    x = curve["normalized_expenditure"].values
    ax.plot(x, curve["food_share_base"], label="base")
    ax.plot(x, curve["food_share_alt"], label="with damages")
    ax.set_xlabel("expenditures / mean base expenditures")
    ax.set_ylabel("food expenditure share")
    ax.legend(frameon=False)
    return _save(fig, fname)


def plot_sweep(panel, fname):
    """one panel per indicator change, one line per allocation"""
    indicators = [
        ("d_wealth_gini", "wealth Gini"),
        ("d_expenditure_8020", "80-20 ratio, expenditures"),
        ("d_wealthless_share", "wealthless share"),
    ]
    fig, axes = plt.subplots(1, len(indicators), figsize=(12.0, 3.8))
    for ax, (col, title) in zip(axes, indicators):
        for allocation, rows in panel.groupby("allocation", sort=False):
            ax.plot(100.0 * rows["loss"], rows[col], marker="o", label=allocation)
        ax.axhline(0.0, color="black", lw=0.8)
        ax.set_title(title)
        ax.set_xlabel("productivity loss (%)")
    axes[0].legend(frameon=False)
    return _save(fig, fname)


def plot_apg(response, fname):
    fig, ax = plt.subplots(figsize=(7.5, 4.2))
    ax.plot(response["ag_share"], response["g_apg"], marker="o")
    ax.set_xlabel("share of the loss borne by agriculture")
    ax.set_ylabel("agricultural productivity gap")
    return _save(fig, fname)
