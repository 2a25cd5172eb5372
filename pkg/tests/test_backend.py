import os
import subprocess
import sys
from pathlib import Path

import pytest

from cfrplus import _backend

ROOT = Path(__file__).resolve().parents[1]


def backend_in_subprocess(value):
    env = dict(os.environ, CFRPLUS_BACKEND=value)
    return subprocess.run([sys.executable, "-c", "import cfrplus; print(cfrplus.backend)"],
                          capture_output=True, text=True, env=env)


def test_forced_python():
    proc = backend_in_subprocess("python")
    assert proc.returncode == 0 and proc.stdout.strip() == "python"


def test_invalid_choice():
    proc = backend_in_subprocess("fortran")
    assert proc.returncode != 0 and "CFRPLUS_BACKEND" in proc.stderr


@pytest.mark.skipif("compiled" not in _backend.BACKENDS, reason="compiled kernel not built")
def test_compiled_is_default():
    proc = backend_in_subprocess("auto")
    assert proc.stdout.strip() == "compiled"


def test_benchmark_script_runs():
    proc = subprocess.run([sys.executable, str(ROOT / "benchmarks" / "bench_kernels.py"),
                           "--decks", "3", "--iterations", "2", "--repeat", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "us/iteration" in proc.stdout
