"""This module has helpers shared by the tests: a scratch directory with given files, and seeded random histories.
"""

import contextlib
import os
import pathlib
import tempfile
from typing import *

import numpy as np

from essn_verify.history.type import MVSchedule
from essn_verify.workload.generator import generate_si_history


@contextlib.contextmanager
def load_files(files: Dict[str, bytes]) -> Iterator[pathlib.Path]:
    """load_files yields a temporary directory holding the given files. The names are plain file names, not paths.
    """

    with tempfile.TemporaryDirectory() as name:
        root = pathlib.Path(name).resolve()
        for filename, content in files.items():
            assert pathlib.Path(filename).name == filename, filename
            (root / filename).write_bytes(content)
        yield root


@contextlib.contextmanager
def chdir(path: pathlib.Path) -> Iterator[None]:
    previous = pathlib.Path.cwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(previous)


def random_si_histories(seed: int, count: int, *, max_txns: int = 8, max_keys: int = 6) -> Iterator[MVSchedule]:
    """random_si_histories yields count snapshot-isolation histories with 2..max_txns transactions over 1..max_keys keys.
    """

    rng = np.random.default_rng(seed)
    for _ in range(count):
        n_txns = int(rng.integers(2, max_txns + 1))
        n_keys = int(rng.integers(1, max_keys + 1))
        yield generate_si_history(rng, n_txns, n_keys)
