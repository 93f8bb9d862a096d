"""Experiment runners: one module per scenario, dispatched by name."""

from . import composition, counterexample_run, ehrenfest, ehrenfest_time, tdhf_vlasov

RUNNERS = {
    "ehrenfest": ehrenfest.run,
    "tdhf_vlasov": tdhf_vlasov.run,
    "ehrenfest_time": ehrenfest_time.run,
    "counterexample": counterexample_run.run,
    "composition": composition.run,
}


def run_scenario(cfg: dict):
    from ..config import validate_config

    validate_config(cfg)
    return RUNNERS[cfg["scenario"]](cfg)
