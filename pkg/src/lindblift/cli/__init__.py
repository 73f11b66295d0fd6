from .main import main
from .runner import RunReport, compare, format_csv, run
from .scenario import Scenario, ScenarioError, parse_matrix_literal, parse_scenario

__all__ = [
    "main",
    "run",
    "compare",
    "format_csv",
    "RunReport",
    "Scenario",
    "ScenarioError",
    "parse_scenario",
    "parse_matrix_literal",
]
