"""
Counter-based random substreams keyed by (seed, scenario, replica)
"""

import zlib

import numpy as np


def substream(seed: int, scenario_id: int = 0, replica: int = 0, stream: int = 0) -> np.random.Generator:
    """Independent Philox generator for one replica.

    The key depends only on its arguments, so replicas can run in any order.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, int(scenario_id), int(replica), int(stream)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def scenario_key(name: str) -> int:
    """Stable integer id for a scenario name"""
    return zlib.crc32(name.encode("utf-8"))
