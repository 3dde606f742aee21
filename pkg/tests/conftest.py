import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from shillscan import filter_sparse_items, load_dataset, make_synthetic_dataset

MOVIELENS_CANDIDATES = (
    os.environ.get("MOVIELENS_100K", ""),
    os.path.join(os.path.dirname(__file__), "..", "data", "u.data"),
)


def _find_movielens() -> str | None:
    for path in MOVIELENS_CANDIDATES:
        if path and os.path.exists(path):
            return path
    return None


@pytest.fixture(scope="session")
def movielens_path():
    return _find_movielens()


@pytest.fixture(scope="session")
def eval_dataset(movielens_path):
    """Filtered evaluation dataset: the real log when available, the
    synthetic stand-in otherwise."""
    if movielens_path:
        raw = load_dataset(movielens_path, fmt="udata")
    else:
        raw = make_synthetic_dataset()
    return filter_sparse_items(raw, 10)


@pytest.fixture(scope="session")
def small_dataset():
    """Small, fast dataset for CLI and plumbing tests."""
    raw = make_synthetic_dataset(seed=5, n_users=60, n_items=80, n_ratings=3000)
    return filter_sparse_items(raw, 10)
