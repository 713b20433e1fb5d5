"""Smoke test for the pykfib extension.

Uses an installed `pykfib` if there is one, otherwise loads the shared
library from target/release (build it with
`cargo build --release -p pykfib --features extension-module`).
"""

import importlib.util
import os
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        import pykfib

        return pykfib
    except ImportError:
        pass
    lib = Path(os.environ.get("PYKFIB_LIB", ROOT / "target" / "release" / "libpykfib.so"))
    if not lib.exists():
        sys.exit(f"pykfib not installed and {lib} missing")
    tmp = Path(tempfile.mkdtemp())
    dest = tmp / "pykfib.so"
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("pykfib", dest)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    k = load()

    assert k.dominant_root(2, 20).startswith("1.61803398874989484820")
    assert k.kfib(2, 10) == 55
    assert k.kfib(5, 15) == 6930
    assert k.balancing(6) == 6930
    assert k.lucas_balancing(1) == 3
    assert all(8 * k.balancing(l) ** 2 + 1 == k.lucas_balancing(l) ** 2 for l in range(100))

    terms = k.cf("log2/log(gamma)", count=30)
    assert [a for a, _, _ in terms[:12]] == [0, 2, 1, 1, 5, 3, 2, 1, 22, 1, 5, 38]
    assert k.cf("7/3", count=5) == [(2, 2, 1), (3, 7, 3)]

    out = k.reduce("sqrt2", "1/3", "10", "2", "1000")
    assert out.reduced and out.w_bound is not None, out
    assert out.method in ("dujella_petho", "legendre")

    assert k.derive_n_bound("B", 5) > 0

    sols = k.brute_force_box("B", 3, 10, 40, 40)
    assert len(sols) == 8 * 3 + 2, len(sols)
    big = [s for s in sols if s.value == 6930]
    assert [(s.l, s.k, s.n, s.m) for s in big] == [(6, 5, 15, 1), (6, 5, 15, 2)]
    assert all(s.certify() for s in sols)
    assert repr(big[0]) == "B_6 = F_1^(5) F_15^(5)"

    small = k.campaign_small("C", list(range(2, 8)))
    assert small["passed"], small

    code, manifest = k.verify(smoke=True)
    assert code == 0, manifest["verdict"]
    assert manifest["verdict"] == "PASS"

    print("pykfib smoke test: ok")


if __name__ == "__main__":
    main()
