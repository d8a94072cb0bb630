"""Scenario reports and CSV artifact writing."""
import csv
import math
import os

import numpy as np
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


def fmt_number(value):
    """Stable text form of a metric; identical floats always print identically."""
    if value is None:
        return "none"
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def write_csv(path, header, rows, comments=()):
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt_number(v) for v in row])


@dataclass
class Metric:
    name: str
    value: Optional[float]
    uncertainty: Optional[float] = None
    unit: str = ""


@dataclass
class ScenarioReport:
    scenario: str
    digest: str
    seed: int
    noise: bool
    metrics: List[Metric] = field(default_factory=list)
    artifacts: List[str] = field(default_factory=list)
    flags: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    provenance: List[Tuple[str, str, str]] = field(default_factory=list)
    output_dir: str = ""

    def add(self, name, value, uncertainty=None, unit=""):
        self.metrics.append(Metric(name, value, uncertainty, unit))

    def metric(self, name):
        for m in self.metrics:
            if m.name == name:
                return m.value
        raise KeyError(name)

    @property
    def values(self):
        return {m.name: m.value for m in self.metrics}

    @property
    def passed(self):
        return all(self.flags.values())

    def path(self, artifact, ext="csv"):
        return os.path.join(self.output_dir, f"{self.scenario}_{artifact}.{ext}")

    def register(self, path):
        self.artifacts.append(path)
        return path

    def check_expectations(self, expectations):
        values = self.values
        for name, bounds in expectations.items():
            value = values.get(name)
            ok = value is not None and not (isinstance(value, float) and math.isnan(value))
            if ok and "min" in bounds:
                ok = value >= bounds["min"]
            if ok and "max" in bounds:
                ok = value <= bounds["max"]
            self.flags[name] = bool(ok)

    def write(self):
        """Emit metrics/parameters CSVs and ``report.txt``; returns the report path."""
        metrics_path = self.register(self.path("metrics"))
        write_csv(metrics_path, ["name", "value", "uncertainty", "unit"],
                  [(m.name, m.value, m.uncertainty, m.unit) for m in self.metrics])
        params_path = self.register(self.path("parameters"))
        write_csv(params_path, ["key", "value", "source"],
                  [("seed", str(self.seed), "run"),
                   ("noise", str(self.noise).lower(), "run"),
                   ("digest", self.digest, "run")] + list(self.provenance))
        if self.flags:
            flags_path = self.register(self.path("expectations"))
            write_csv(flags_path, ["metric", "passed"],
                      [(k, "pass" if v else "fail") for k, v in self.flags.items()])
        report_path = os.path.join(self.output_dir, "report.txt")
        self.artifacts.append(report_path)
        with open(report_path, "w", newline="\n") as fh:
            fh.write(self.to_text())
        return report_path

    def to_text(self):
        lines = [f"scenario = {self.scenario}", f"digest = {self.digest}",
                 f"seed = {self.seed}", f"noise = {str(self.noise).lower()}", "",
                 "[metrics]"]
        for m in self.metrics:
            text = f"{m.name} = {fmt_number(m.value)}"
            if m.uncertainty is not None:
                text += f" +/- {fmt_number(m.uncertainty)}"
            if m.unit:
                text += f" {m.unit}"
            lines.append(text)
        if self.flags:
            lines += ["", "[expectations]"]
            lines += [f"{k} = {'pass' if v else 'fail'}" for k, v in self.flags.items()]
        if self.notes:
            lines += ["", "[notes]"] + [f"- {n}" for n in self.notes]
        lines += ["", "[defaults]"]
        lines += [f"{k} = {v} ({src})" for k, v, src in self.provenance]
        lines += ["", "[artifacts]"]
        lines += [os.path.basename(p) for p in self.artifacts]
        return "\n".join(lines) + "\n"
