"""Smoke test for the Python extension.

Build first:
    cargo build -p lefschetz-py --features extension-module --release
then run:
    python3 python/smoke_test.py [path/to/liblefschetz.so]
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load(lib_path):
    tmp = Path(tempfile.mkdtemp())
    shutil.copy(lib_path, tmp / "lefschetz.so")
    sys.path.insert(0, str(tmp))
    import lefschetz

    return lefschetz


def main():
    lib = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "target" / "release" / "liblefschetz.so"
    if not lib.exists():
        sys.exit(f"{lib} not found; build the extension first")
    lf = load(lib)

    report = lf.verify_psi(2)
    assert report["exit_code"] == 0, report
    psi, product = lf.psi_matrices(2)
    assert psi == product and len(psi) == 10

    rep, cert = lf.auroux(2)
    assert rep["exit_code"] == 0 and cert is not None
    rep, cert = lf.auroux(2, without_sigma=True)
    assert cert is None
    missing = [c for c in rep["checks"] if c["name"] == "hypothesis"][0]["details"]["missing_cores"]
    assert missing == ["σ"], missing

    inv = lf.surface_invariants(14, 8, 6)
    assert (inv["chi"], inv["K2"], inv["divisibility"]) == (412, 2016, 2), inv
    assert lf.deformation_dimension(14, 8, 6) == 913
    assert len(lf.family_enumerate(14, 8, 6, 2)) == 2
    try:
        lf.family_enumerate(14, 8, 6, 3)
    except ValueError:
        pass
    else:
        raise AssertionError("odd k accepted")

    assert lf.braid_equal(3, [1, 2, 1], [2, 1, 2])
    assert not lf.braid_equal(2, [1], [-1])
    assert lf.manfredini(6, 3)["exit_code"] == 0

    config = json.loads(lf.export("config", 2))
    assert len(config["crossings"]) == 12
    assert lf.export("config", 2, "dot").startswith("graph")
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
