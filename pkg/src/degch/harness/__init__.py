"""Configuration, persistence and the command-line interface."""
from .config import (OUTPUT_ROOT_ENV, InitialCondition, OutputConfig, RunConfig, params_digest,
                     parse_config, parse_config_text)
from .initial import build_initial
from .snapshot import Snapshot, load_snapshot, read_snapshot, write_snapshot

__all__ = [
    "OUTPUT_ROOT_ENV", "InitialCondition", "OutputConfig", "RunConfig", "params_digest",
    "parse_config", "parse_config_text", "build_initial", "Snapshot", "load_snapshot",
    "read_snapshot", "write_snapshot", "cli_dispatch",
]


def cli_dispatch(argv=None):
    from .cli import cli_dispatch as _dispatch
    return _dispatch(argv)
