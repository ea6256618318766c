from __future__ import annotations

import pytest

from pseudotri import examples as ex
from pseudotri.cpt import CptLabelling


@pytest.fixture
def k3():
    return ex.triangle()


@pytest.fixture
def k3_cpt(k3) -> CptLabelling:
    return ex.triangle_cpt()


@pytest.fixture
def mercedes():
    return ex.mercedes()


@pytest.fixture
def mercedes_cpt():
    return ex.mercedes_cpt()
