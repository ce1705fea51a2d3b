//! Optional inspection script written next to the CSV traces.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;

pub const PLOT_FILE: &str = "plot.py";

const SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plots the traces in this directory. Needs pandas and matplotlib."""
import os
import sys

import matplotlib.pyplot as plt
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__))

sol = pd.read_csv(os.path.join(here, "solution.csv"))
norms = pd.read_csv(os.path.join(here, "norms.csv"))

fig, axes = plt.subplots(2, 2, figsize=(11, 8))
for t, snap in sol.groupby("t"):
    axes[0, 0].plot(snap["x"], snap["theta"], label=f"t={t:.3g}")
    axes[0, 1].plot(snap["x"], snap["phi"], label=f"t={t:.3g}")
axes[0, 0].set_title("theta")
axes[0, 1].set_title("phi")
axes[0, 0].legend(fontsize="x-small")
for col in ["l2_theta", "l2_phi"]:
    axes[1, 0].plot(norms["t"], norms[col], label=col)
for col in ["b21_theta_t", "b21_phi_t"]:
    axes[1, 1].plot(norms["t"], norms[col], label=col)
axes[1, 0].legend()
axes[1, 1].legend()
fig.tight_layout()
out = os.path.join(here, "traces.png")
fig.savefig(out, dpi=120)
print(out, file=sys.stderr)
"#;

pub fn write_plot_script(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(PLOT_FILE);
    fs::write(&path, SCRIPT)?;
    Ok(path)
}
