"""Every bundled primary recipe must render to an image without error."""

import subprocess
import sys

import pytest

from sshqed_plots.render import main as render_main

# (preset, subcommand, overrides, main table, figure kind)
PRESET_RUNS = [
    ("fig2b", "spectrum", [], "spectrum", "spectrum"),
    ("fig3", "boundstate", [], "amplitudes", "boundstate"),
    ("fig3b", "evolve", [], "populations", "evolve"),
    ("fig3cd", "transfer", [], "populations", "transfer"),
    ("fig4", "markov-scan", ["waveguide.delta=0.2"], "markovscan", "markov-scan"),
    ("fig5", "photon-map", ["waveguide.delta=0.2"], "photonmap", "photon-map"),
    ("fig6", "markov-scan", ["waveguide.delta=0.2"], "markovscan", "markov-scan"),
    ("fig7", "transfer", ["waveguide.delta=0.2", "atoms.0.detuning=1.6",
                          "atoms.1.detuning=1.6"], "populations", "transfer"),
]


@pytest.mark.parametrize("preset,subcommand,overrides,table,kind",
                         PRESET_RUNS, ids=[r[0] for r in PRESET_RUNS])
def test_preset_renders(tmp_path, preset, subcommand, overrides, table, kind):
    out = tmp_path / preset
    cmd = [sys.executable, "-m", "sshqed.cli", subcommand,
           "--config", f"preset:{preset}", "--out", str(out)]
    for item in overrides:
        cmd += ["--set", item]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    csv_path = f"{out}_{table}.csv"
    png1 = tmp_path / f"{preset}_1.png"
    png2 = tmp_path / f"{preset}_2.png"
    assert render_main([kind, csv_path, "-o", str(png1)]) == 0
    assert render_main([kind, csv_path, "-o", str(png2)]) == 0
    b1 = png1.read_bytes()
    assert b1 and b1 == png2.read_bytes()
