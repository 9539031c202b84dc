"""Power-law scaling of the transfer defect and the command line.

The defect 1 - n3 oscillates with the pulse area.  Its upper envelope,
taken at the worst phase of the cosine term, falls as a power of the
adiabaticity parameter epsilon = 1/(Omega tau).
"""
# %%
import subprocess
import sys
import tempfile
from pathlib import Path

from stirap import PulseConfig, fit_scaling, phase_envelope

# %%
for n in (1, 2):
    anchors = (10.0, 20.0, 40.0, 80.0, 160.0, 320.0)
    pairs = [(1.0 / w, 1.0 - phase_envelope(PulseConfig(n=n, omega_p0=w, omega_s0=w), n)) for w in anchors]
    fit = fit_scaling(pairs, envelope="given")
    tail = fit_scaling(pairs[2:], envelope="given")
    print(f"n={n}: slope {fit.slope:.3f} over Omega0*tau 10..320, {tail.slope:.3f} over 40..320")

# %% [markdown]
# The same analysis from the shell: a small sweep, then a fit.

# %%
with tempfile.TemporaryDirectory() as tmp:
    spec = Path(tmp) / "locked.txt"
    spec.write_text("name = locked\nn = 1\naxis = both-locked\nrange = 20:80:7\nmethods = ode, analytic1\n")
    out = Path(tmp) / "locked.csv"
    for args in (["sweep", "--spec", str(spec), "--out", str(out)],
                 ["fit", "--input", str(out), "--family", "ratio=1"],
                 ["rerun", str(out) + ".manifest.json", "--verify"]):
        proc = subprocess.run([sys.executable, "-m", "stirap", *args], capture_output=True, text=True)
        print("$ stirap", " ".join(args[:1]), "->", proc.returncode)
        print(proc.stdout.strip())
