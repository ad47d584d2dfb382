from typing import NamedTuple

import numpy as np


class RngStreams(NamedTuple):
    deployment: np.random.Generator
    election: np.random.Generator
    failure: np.random.Generator


def rng_streams(seed: int) -> RngStreams:
    """Independent generators for deployment, election and failures.

    Protocol choice never touches the deployment stream, so two protocols
    run with one seed see the same node layout.
    """
    children = np.random.SeedSequence(seed).spawn(3)
    return RngStreams(*(np.random.default_rng(child) for child in children))
