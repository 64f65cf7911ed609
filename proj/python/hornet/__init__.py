"""HORNET onion routing from Python.

Byte-level primitives map one to one onto the C++ library. The simulator
entry points accept and return plain Python objects instead of JSON text.
"""

from __future__ import annotations

import json
import os
from typing import Any, Mapping, NamedTuple, Optional, Union

from ._hornet import (
    AHDR_SIZE,
    DATA_HEADER_SIZE,
    KEY_SIZE,
    MAX_HOPS,
    NESTED_AHDR_SIZE,
    SETUP_PACKET_SIZE,
    HornetError,
    add_layer,
    create_ahdr,
    derive_subkey,
    fs_create,
    fs_open,
    hash_to_key,
    mac,
    packet_info,
    prg,
    proc_ahdr,
    prp,
    remove_layer,
    stream_xcrypt,
)
from . import _hornet

__all__ = [
    "AHDR_SIZE", "DATA_HEADER_SIZE", "KEY_SIZE", "MAX_HOPS", "NESTED_AHDR_SIZE",
    "SETUP_PACKET_SIZE", "HornetError", "AnonymitySet", "add_layer", "anonymity_set",
    "bench", "create_ahdr", "derive_subkey", "fs_create", "fs_open", "hash_to_key", "mac",
    "packet_info", "prg", "proc_ahdr", "prp", "remove_layer", "run_scenario", "stream_xcrypt",
]


class AnonymitySet(NamedTuple):
    weight: int
    members: list


def run_scenario(scenario: Union[str, os.PathLike, Mapping[str, Any]],
                 seed: Optional[int] = None) -> dict:
    """Run a scenario given as a file path or an already parsed mapping.

    Relative topology references resolve against the scenario's directory,
    or the working directory for mappings. Returns the transcript report.
    """
    if isinstance(scenario, Mapping):
        text, base = json.dumps(scenario), "."
    else:
        path = os.fspath(scenario)
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        base = os.path.dirname(os.path.abspath(path))
    return json.loads(_hornet._run_scenario(text, base, seed))


def anonymity_set(topology: Mapping[str, Any], adversary: str, ingress: str,
                  distance: Optional[int] = None, brute_force: bool = False) -> AnonymitySet:
    weight, members = _hornet._anonymity_set(json.dumps(topology), adversary, ingress,
                                             distance, brute_force)
    return AnonymitySet(weight, members)


def bench(hops: int = 7, payload: int = 512, data_iterations: int = 10000,
          setup_iterations: int = 200, seed: int = 1) -> dict:
    return json.loads(_hornet._bench(hops, payload, data_iterations, setup_iterations, seed))
