import os
import random
import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def cpf_bin():
    path = os.environ.get("CPF_BIN")
    if not path or not os.path.exists(path):
        pytest.skip("CPF_BIN not set (build the cpf binary first)")
    return path


@pytest.fixture(scope="session")
def cpf_module():
    for var in ("CPF_PYMODULE_DIR", "CPF_PYPKG_DIR"):
        d = os.environ.get(var)
        if d and d not in sys.path:
            sys.path.insert(0, d)
    cpf = pytest.importorskip("cpf")
    return cpf


@pytest.fixture()
def demo_csv(tmp_path):
    """Two well-separated gaussian blobs with one informative categorical
    column, a truth column, and one row with a missing value."""
    rng = random.Random(42)
    lines = ["x0,x1,color,cls"]
    for _ in range(120):
        lines.append(f"{rng.gauss(0, 0.5):.6f},{rng.gauss(0, 0.5):.6f},red,a")
    for _ in range(80):
        lines.append(f"{rng.gauss(8, 0.6):.6f},{rng.gauss(8, 0.6):.6f},blue,b")
    lines.append("0.1,,red,a")  # missing cell: row must be dropped
    path = tmp_path / "demo.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


def run_cli(cpf_bin, *args):
    return subprocess.run([cpf_bin, *args], capture_output=True, text=True)
