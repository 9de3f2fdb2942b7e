import os
import subprocess
import sys

import numpy as np
import pytest

from feigel import _core, _kernels_py
from feigel import vacuum as V
from feigel.material import MaterialParams

BACKENDS = sorted(_core.available_backends())


@pytest.mark.parametrize("name", BACKENDS)
def test_backend_result(name):
    m = MaterialParams.from_couplings(chi_zy=1e-3)
    res = V.vacuum_momentum(m, 1.0, backend=name)
    assert res.backend == name
    assert res.coeff_zy == pytest.approx(V.closed_form_coefficient(m, 1.0), rel=1e-9)


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
def test_backends_agree():
    k = _core.get_backend("cython")
    for theta in (0.0, 0.4, 1.2, np.pi / 2):
        for kap in (0.0, 1e-3, 0.7, 12.0):
            np.testing.assert_allclose(k.polar_channels(kap, theta, 1.3),
                                       _kernels_py.polar_channels(kap, theta, 1.3), rtol=1e-14, atol=1e-300)
    a = k.polar_integral(0.8, 50.0, 1e-9, 1e-14, 2000)
    b = _kernels_py.polar_integral(0.8, 50.0, 1e-9, 1e-14, 2000)
    assert a[1] == pytest.approx(b[1], rel=1e-12)
    assert a[3] == b[3] and a[4] == b[4]


@pytest.mark.parametrize("name", BACKENDS)
def test_bit_stable(name):
    k = _core.get_backend(name)
    assert k.polar_integral(1.0, 40.0, 1e-9, 1e-14, 2000) == k.polar_integral(1.0, 40.0, 1e-9, 1e-14, 2000)


@pytest.mark.parametrize("name", BACKENDS)
def test_budget_exhaustion_flagged(name):
    out = _core.get_backend(name).polar_integral(1.0, 40.0, 1e-15, 1e-30, 3)
    assert out[4] is False


def test_unknown_backend():
    with pytest.raises(ValueError):
        _core.get_backend("fortran")


def test_env_forces_fallback():
    env = dict(os.environ, FEIGEL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import feigel; print(feigel.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_benchmark_script(capsys):
    import runpy
    from pathlib import Path
    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    runpy.run_path(str(script), run_name="bench")["main"](["--repeat", "1"])
    out = capsys.readouterr().out
    assert all(name in out for name in BACKENDS)
