"""Smoke test for the `wonderful` extension module.

Uses an installed module when available (``maturin develop -m crates/py/Cargo.toml
--features extension-module``); otherwise loads ``target/release/libwonderful.so``
built with ``cargo build --release -p wonderful-py --features extension-module``.
"""

import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path


def load():
    try:
        import wonderful
        return wonderful
    except ImportError:
        pass
    root = Path(__file__).resolve().parent.parent
    for name in ("libwonderful.so", "libwonderful.dylib"):
        lib = root / "target" / "release" / name
        if lib.exists():
            tmp = Path(tempfile.mkdtemp())
            shutil.copy(lib, tmp / "wonderful.so")
            sys.path.insert(0, str(tmp))
            import wonderful
            return wonderful
    sys.exit("wonderful extension not found; build it first")


def main():
    w = load()

    r = w.betti("T", 2, weights=[1, 1, 1])
    assert r["poincare"] == [1, 4, 4, 1], r
    assert r["euler"] == 10
    assert [c["codim"] for c in r["centers"]] == [2, 2, 2]

    assert w.betti("T", 1, n=5)["poincare"] == [1, 16, 16, 1]
    assert w.betti("T", 1, n=6)["poincare"] == [1, 42, 127, 42, 1]
    p25 = w.betti("P", 2, n=5)
    assert p25["poincare"] == [1, 5, 1] and len(p25["centers"]) == 3
    rel = w.betti("P", 2, n=6, relative=[3, 4])
    assert rel["poincare"] == w.betti("P", 2, n=6)["poincare"]

    assert w.check_weights("P", 2, [1] * 5)["accepted"]
    assert not w.check_weights("T", 1, [Fraction(1, 5)] * 3)["accepted"]
    assert w.check_weights("T", 1, ["1/2+e", "1/2"], epsilon="1/100")["accepted"]

    assert w.euler_oracle(2, 3) == 10 and w.euler_oracle(2, 4) == 84
    assert w.divisor("T", 1, [1, 2], n=5) == [1, 5, 1]
    assert w.twist("T", 1, [1, 2], n=5) == 6
    assert w.sha_dimensions(7, 2) == (4, 4, True)

    gw = w.git_weights(2, 5)
    assert gw["entries"] == ["8/9", "8/9", "5/9", "1/3", "1/3"]
    stable = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 3]]
    rep = w.is_stable(stable)
    assert rep["stability"]["stable"] and rep["conditions"]["holds"]
    tail = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 1], [0, 0, 1]]
    rep = w.is_stable(tail)
    assert rep["stability"]["witness"] == {"points": [3, 4, 5], "span_dim": 0, "weight": "11/9"}
    try:
        w.normalize(tail)
        raise AssertionError("unstable configuration normalized")
    except w.DomainRejected:
        pass
    q = w.normalize(stable)
    assert q == [["1", "1/3"], ["1", "2/3"]], q
    assert w.classify(q, [1, 1, 1, Fraction(1, 3), Fraction(1, 3)]) == []

    tree = {
        "kind": "rooted",
        "d": 2,
        "weights": ["1", "1/3+e", "1/3+e", "1", "1", "1"],
        "collection": [[1, 2, 3], [4, 5], [1, 2, 3, 4, 5]],
        "screens": {
            "[1,2,3]": {"1": [0, 0], "2": [1, 0], "3": [0, 1]},
            "[4,5]": {"4": [0, 0], "5": [1, 1]},
            "[1,2,3,4,5]": {"[1,2,3]": [0, 0], "[4,5]": [2, -1]},
        },
        "root": {"[1,2,3,4,5]": [0, 0], "6": [1, 0]},
    }
    assert w.tree_validate(tree)["accepted"]
    mid = w.tree_reduce(tree, ["1/5+e"] * 5 + ["1"])
    assert mid["collection"] == [[1, 2, 3, 4, 5]]
    last = w.tree_reduce(mid, ["1/6+e"] * 6)
    assert last["collection"] == []
    canon = w.tree_canonicalize(tree)
    assert w.tree_canonicalize(canon) == canon
    assert w.tree_forget(tree, [1, 4, 6])["collection"] == [[1, 2]]
    assert len(w.tree_profile(tree, 5)) == 6

    assert len(w.lm_rays("T", 2, 3)) == 6
    fan = w.build_fan("P", 2, 5)
    assert len(fan["max_cones"]) == 6
    assert w.check_fan(fan, seed=3) == {"smooth": True, "complete": True}
    assert w.h_polynomial(fan) == [1, 4, 1]

    try:
        w.betti("T", 2)
        raise AssertionError("missing n accepted")
    except ValueError:
        pass

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
