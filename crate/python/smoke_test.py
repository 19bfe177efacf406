"""Smoke test for the phasekit Python extension.

Builds the extension with cargo (release, extension-module feature) unless
PHASEKIT_SO points at an already built library, copies it next to a temporary
package path as ``phasekit.so`` and exercises the bindings.

    python3 python/smoke_test.py
"""

import json
import math
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_library() -> Path:
    explicit = os.environ.get("PHASEKIT_SO")
    if explicit:
        return Path(explicit)
    subprocess.run(
        ["cargo", "build", "--release", "-p", "phasekit-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    for name in ("libphasekit_py.so", "libphasekit_py.dylib", "phasekit_py.dll"):
        candidate = ROOT / "target" / "release" / name
        if candidate.exists():
            return candidate
    sys.exit("built library not found under target/release")


def import_phasekit(lib: Path):
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    tmp = Path(tempfile.mkdtemp(prefix="phasekit-smoke-"))
    shutil.copy(lib, tmp / f"phasekit{suffix}")
    sys.path.insert(0, str(tmp))
    import phasekit

    return phasekit


def main() -> int:
    pk = import_phasekit(locate_library())
    print(f"phasekit {pk.__version__}")

    a = pk.build_abs_phase("plus", 32)
    assert a.dim == 32 and a.hermitian_residual() == 0.0
    ev = a.eigenvalues()
    assert ev == sorted(ev) and -1e-9 <= ev[0] and ev[-1] <= math.pi + 1e-9
    assert abs(a.get(0, 1).real + 2 * math.sqrt(2) / math.pi) < 1e-15

    c = pk.build_cos_phase("plus", 4)
    assert abs(c.get(0, 1).real - math.sqrt(2) / 2) < 1e-15
    assert pk.build_cos_phase("minus", 2).get(0, 1) == 0

    ident = pk.build_function_of_phase([1.0], "plus", 5)
    assert max(abs(ident.get(i, i) - 1) for i in range(5)) < 1e-12

    comm = pk.cs_commutator(16)
    assert abs(comm.get(0, 0) - 0.5j) < 1e-14 and abs(comm.get(15, 15) + 0.5j) < 1e-14

    assert pk.rotator_identity_residual(50) <= 1e-12
    t0 = pk.theta_matrix(10)
    t1 = pk.theta_matrix(10, alpha=0.4)
    assert max(abs(x - y) for r0, r1 in zip(t0.entries(), t1.entries()) for x, y in zip(r0, r1)) < 1e-12

    assert abs(pk.fourier_abs(1.0) - 1.0) < 1e-3
    d100 = abs(pk.expect_abs_phase(100.0, 1.0) - 1.0)
    d400 = abs(pk.expect_abs_phase(400.0, 1.0) - 1.0)
    assert d100 < 1e-12 and d400 < 1e-12
    assert pk.minimal_dim(400.0) > 400

    scan = pk.coherent_scan([0.5, 1.0], [16.0, 64.0], sector="minus")
    assert len(scan) == 4 and scan.columns[0] == "theta"
    assert scan.column("theta") == [0.5, 0.5, 1.0, 1.0]
    json.loads(scan.to_json())

    try:
        pk.expect_abs_phase(400.0, 1.0, dim=300)
    except RuntimeError as e:
        assert "minimal admissible dim" in str(e)
    else:
        raise AssertionError("truncation error not raised")
    try:
        pk.build_abs_phase("sideways", 4)
    except ValueError:
        pass
    else:
        raise AssertionError("bad sector accepted")

    for name in ("rotator", "boundary", "commutators"):
        report = pk.run_check(name)
        print(f"check {name}: {'pass' if report.passed else 'FAIL'} ({len(report.table)} rows)")
        assert report.passed, report.failures
    report = pk.run_check("oracle", max_index=8)
    assert report.passed, report.failures
    strict = pk.run_check("boundary", tolerances={"boundary_residual": 1e-30})
    assert not strict.passed and strict.failures

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
