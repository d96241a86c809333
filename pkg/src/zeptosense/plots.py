"""Minimal SVG line charts of experiment tables (needs matplotlib)."""
import os

import numpy as np

AXES = {
    "trap": ("d_m", "omega_rad_s", None, False),
    "scaling": ("N", "F_Q_m2", None, True),
    "evolve": ("t_omega", "qfi_omega", None, False),
    "decohere": ("t_omega", "qfi_omega", "gamma_over_omega", False),
    "decohere_alpha": ("alpha", "qfi_omega", None, False),
    "cfi": ("t_omega", "f_classical", "theta_rad", False),
}


def plot_tables(command, tables, out_dir):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    for tab in tables:
        if tab.name not in AXES:
            continue
        xk, yk, group, loglog = AXES[tab.name]
        fig, ax = plt.subplots(figsize=(5, 3.5))
        x, y = tab.column(xk), tab.column(yk)
        if group is None:
            ax.plot(x, y, lw=1.2)
        else:
            g = tab.column(group)
            for val in np.unique(g):
                sel = g == val
                ax.plot(x[sel], y[sel], lw=1.2, label=f"{group}={val:.3g}")
            ax.legend(fontsize=7)
        if tab.name == "cfi":
            t0 = tab.column("theta_rad")[0]
            sel = tab.column("theta_rad") == t0
            ax.plot(x[sel], tab.column("f_quantum")[sel], "k--", lw=1, label="QFI")
        if loglog:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(xk)
        ax.set_ylabel(yk)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{tab.name}.svg")
        fig.savefig(path)
        plt.close(fig)
        paths.append(path)
    return paths
