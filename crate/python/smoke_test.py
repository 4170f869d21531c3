"""Smoke test for the invgen extension module."""
import json
import pathlib

import invgen

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


def main():
    prog = invgen.Loop.parse((CORPUS / "euclidex.loop").read_text())
    assert prog.branches == 2 and len(prog.variables) == 6
    inv = prog.invariants()
    assert inv.iterations == 3
    assert prog.oracle_violations(inv.ideal, trials=50) == 0

    inst = inv.ideal.instantiate(
        {"a": "x", "b": "y", "p": "1", "q": "0", "r": "0", "s": "1"}, params=["x", "y"]
    )
    assert inst.contains("1 + q*r - p*s", params=["x", "y"])
    assert inst.contains("b*p - a*q - y", params=["x", "y"])

    factexp = invgen.Loop.parse((CORPUS / "factexp.loop").read_text())
    fix = factexp.invariants()
    unrolled = factexp.invariants(algorithm="unrolled")
    assert fix.ideal.equals(unrolled.ideal)
    assert fix.ideal.equals(invgen.Ideal(["b*c*a_0 - a*b_0*c_0"]))

    assert invgen.dependency_ideal(["2", "-2"]) == ["y1_0^2 - y0_0^2"]

    report = json.loads(invgen.run(str(CORPUS / "fermat.loop"), oracle=20))
    assert report["iterations"] == 2 and report["oracle"]["violations"] == []

    try:
        invgen.Loop.parse("while do a := end")
    except invgen.ParseError as e:
        assert "1:15" in str(e)
    else:
        raise AssertionError("parse error expected")

    print("invgen smoke test passed")


if __name__ == "__main__":
    main()
