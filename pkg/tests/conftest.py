import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from hilbert_ot import _kernels


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    """Run a test once per available kernel backend."""
    return request.param
