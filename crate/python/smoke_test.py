#!/usr/bin/env python3
"""Smoke test for the dickson_py extension module.

Build the module first, then run this script from the repository root:

    cargo build -p dickson-py
    python3 python/smoke_test.py
"""

import shutil
import sys
import tempfile
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "debug" / "libdickson_py.so",
        root / "target" / "release" / "libdickson_py.so",
        root / "target" / "debug" / "libdickson_py.dylib",
        root / "target" / "release" / "libdickson_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p dickson-py")
    staging = Path(tempfile.mkdtemp(prefix="dickson_py_"))
    shutil.copy2(built, staging / "dickson_py.so")
    sys.path.insert(0, str(staging))
    import dickson_py

    return dickson_py


def main():
    dk = load_module()
    failures = []

    def check(name, cond):
        status = "ok" if cond else "FAIL"
        print(f"  {name}: {status}")
        if not cond:
            failures.append(name)

    print("witness extraction")
    w = dk.witness(["dec(5)"], 2)
    check("base witness indices", w["indices"] == [5, 6])
    check("base witness bound", w["bound"] == 6)

    verdict = dk.certify(["dec(5)"], w)
    check("certificate round trip", verdict["pass"] is True)

    w2 = dk.witness(["dec(2)", "affine(1,0)"], 2)
    check("two-sequence pair", len(w2["indices"]) == 2)
    check("pair within bound", w2["indices"][1] <= w2["bound"])

    print("sequences and callables")
    s = dk.Sequence("prefix(3,1,4);const(0)")
    check("sequence eval", s.eval(2) == 4 and s.eval(9) == 0)
    sq = dk.Sequence.from_callable(lambda n: n * n)
    check("callable sequence", sq.eval(7) == 49)
    w3 = dk.witness([sq], 2)
    check("callable witness", w3["indices"] == [0, 1])

    print("gap pairs and oracle")
    g = dk.gap_pair("prefix(1,0,0,0);const(0)", 3)
    check("gap index", g["index"] == 1 and g["bound"] == 1)
    rep = dk.oracle_report(["dec(4)"], 2)
    check("oracle tightness", rep["tight"] is True and rep["min_last_index"] == 5)

    print("pigeonhole")
    run = dk.pigeonhole_run("periodic(0,1)", 3)
    check("mono run length", len(run["indices"]) == 3)
    scan = dk.mono_run("periodic(0,1,2)", 3, 3)
    check("counting window", scan["window"] == 7)

    print("refuters")
    chain = dk.incomparable_chain("f2: i+j", 3, 0)
    check("chain length", len(chain["points"]) == 3)
    triple = dk.incomparable_triples("f3: i+j+k", "f3: max(i,max(j,k))")
    check("triple clauses", triple["f1"][0] <= triple["f1"][1] and triple["f2"][0] <= triple["f2"][1])
    lex = dk.lex_refute("f2: 2^i * 3^j")
    check("lex violation present", lex["reason"] in ("strict-increase", "order-collapse"))
    asc = dk.bounded_ascent_refute(3, [0, 1, 2, 3])
    check("ascent violation position", asc["position"] == 3)

    print("counterexample family")
    fam = dk.counterexample_check(10)
    check("family refuted", fam["all_refuted"] is True and fam["pairs_checked"] == 55)

    print("budget honesty")
    try:
        dk.witness(["affine(2,1)", "affine(3,2)", "affine(2,5)", "affine(1,1)"], 4, budget=50_000)
        check("budget error raised", False)
    except dk.BudgetExhausted:
        check("budget error raised", True)

    if failures:
        sys.exit(f"{len(failures)} check(s) failed: {', '.join(failures)}")
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
