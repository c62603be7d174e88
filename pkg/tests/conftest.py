import os

import numpy as np
import pytest

from core.series import TimeSeries


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def white_noise(rng):
    return TimeSeries(1850, rng.standard_normal(300), "noise")


@pytest.fixture
def write_csv(tmp_path):
    """Write `text` to tmp_path/name and return the path as a string."""

    def _write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


def real_data_paths():
    cru, proxies = os.getenv("RECON_CRU_CSV"), os.getenv("RECON_PROXY_CSV")
    if not cru or not proxies or not (os.path.exists(cru) and os.path.exists(proxies)):
        return None
    return cru, proxies
