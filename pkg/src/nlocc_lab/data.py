"""Paths to the bundled example states and protocols."""

from importlib.resources import files


def state_path(name: str) -> str:
    return str(files("nlocc_lab").joinpath(f"data/states/{name}.json"))


def protocol_path(name: str) -> str:
    return str(files("nlocc_lab").joinpath(f"data/protocols/{name}.json"))


BUNDLED_STATES = ("bell", "zero_zero", "max_mixed", "qubit_09")
BUNDLED_PROTOCOLS = ("identity", "dephase_send", "add_discard", "dephase_both", "three_step")
