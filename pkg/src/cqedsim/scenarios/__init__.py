"""Scenario configs, runners and reports."""
from .config import (DEFAULT_REPETITIONS, SCENARIOS, ScenarioConfig,
                     calibrate_signal_reduction, load_config_text, validate_config)
from .report import Metric, ScenarioReport
from .runner import SCENARIO_DESCRIPTIONS, run_scenario

__all__ = ["DEFAULT_REPETITIONS", "SCENARIOS", "SCENARIO_DESCRIPTIONS", "Metric",
           "ScenarioConfig", "ScenarioReport", "calibrate_signal_reduction",
           "load_config_text", "run_scenario", "validate_config"]
