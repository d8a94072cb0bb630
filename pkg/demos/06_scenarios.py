"""
Declarative scenarios
=====================

Each TOML file in ``configs/`` describes a whole experiment. The same
files work with the ``sim`` command::

    sim validate demos/configs/detuning_scan.toml
    sim run demos/configs/detuning_scan.toml --out out/detuning --no-noise
"""
import os
import tempfile

from cqedsim.scenarios import run_scenario, validate_config

here = os.path.dirname(os.path.abspath(__file__))
out = tempfile.mkdtemp(prefix="cqedsim-")

for name in ("detuning_scan", "transverse_scan", "power_scan"):
    with open(os.path.join(here, "configs", f"{name}.toml")) as fh:
        cfg = validate_config(fh.read(), output_dir=os.path.join(out, name))
    report = run_scenario(cfg)
    print(f"== {name} (digest {cfg.digest[:12]}) passed={report.passed}")
    for metric in report.metrics[:6]:
        print(f"   {metric.name} = {metric.value}")

# %%
# Switching noise off gives the closed-form answer.
report = run_scenario({"scenario": "detuning_scan", "noise": False},
                      output_dir=os.path.join(out, "clean"))
print("noise-free HWHM:", report.metric("fit_hwhm"), "MHz")
print("outputs in", out)
