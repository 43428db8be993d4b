import warnings

import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: end-to-end acceptance criteria (slow)"
    )
