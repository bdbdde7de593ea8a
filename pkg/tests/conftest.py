"""Shared fixtures; the brute-force oracles live in oracles.py."""

import pytest


@pytest.fixture(params=["c", "py"])
def backend(request):
    from stepplace.stepfield import HAVE_C_CORE

    if request.param == "c" and not HAVE_C_CORE:
        pytest.skip("C field core not built")
    return request.param
