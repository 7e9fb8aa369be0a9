#!/usr/bin/env python3
"""Smoke test for the hyptype_py extension module.

Build the module first, then run this script:

    cargo build -p hyptype-py
    python3 python/smoke_test.py
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    built = ROOT / "target" / "debug" / "libhyptype_py.so"
    if not built.exists():
        sys.exit(f"{built} not found; run `cargo build -p hyptype-py` first")
    stage = Path(tempfile.mkdtemp(prefix="hyptype-py-"))
    shutil.copy2(built, stage / "hyptype_py.so")
    sys.path.insert(0, str(stage))
    import hyptype_py

    return hyptype_py


def fixture(name):
    return (ROOT / "crates" / "hyptype" / "tests" / "fixtures" / name).read_text()


def main():
    hyptype_py = load_module()
    Curve = hyptype_py.Curve

    theta = Curve(fixture("theta.json"))
    assert repr(theta) == "Curve(genus=2, vertices=2, edges=3)", repr(theta)
    assert theta.genus == 2 and theta.betti1 == 2 and theta.total_weight == 0
    assert theta.is_stable() and theta.d_invariant() == 0
    assert theta.hyperelliptic_type() is True
    assert theta.is_hyperelliptic() is True
    assert theta.strongly_hyperelliptic() is True
    assert theta.jacobian_determinant() == "3"
    gram = json.loads(theta.jacobian_gram())
    assert gram["size"] == 2 and gram["rank"] == 2

    cert = json.loads(theta.hyperelliptic_certificate())
    assert cert["verdict"] is True and cert["involution"] is not None

    k4 = Curve(fixture("k4.json"))
    assert k4.hyperelliptic_type() is False
    cert = json.loads(k4.hyperelliptic_certificate())
    assert cert["pattern"] == "k4"
    assert set(cert["minor"]["branch_sets"]) == {"v0", "v1", "v2", "v3"}
    assert k4.has_minor(theta) is True
    assert theta.has_minor(k4) is False
    model = json.loads(k4.minor_model(theta))
    assert len(model["edge_map"]) == 3

    fig1a = Curve(fixture("fig1a.json"))
    fig1b = Curve(fixture("fig1b.json"))
    assert fig1a.jacobians_isomorphic(fig1b) is True
    assert fig1a.jacobian_determinant() == fig1b.jacobian_determinant() == "4"
    theta112 = Curve(fixture("theta112.json"))
    assert theta.jacobians_isomorphic(theta112) is False

    b2 = Curve(fixture("b2.json"))
    assert b2.hyperelliptic_type() is True
    assert b2.strongly_hyperelliptic() is False
    assert b2.cross_validate() == (True, True, True)

    c5 = Curve(fixture("cycle5.json"))
    conn = c5.connectivize(level=3)
    assert conn.num_edges == 1
    doc = json.loads(conn.to_json())
    assert doc["edges"][0]["length"] == "5"

    rand = Curve.random(7, genus=3, max_edges=9)
    assert rand.genus == 3 and rand.is_stable()
    again = Curve.random(7, genus=3, max_edges=9)
    assert rand.to_json() == again.to_json()

    try:
        Curve('{"vertices": [], "edges": []}')
    except ValueError:
        pass
    else:
        raise AssertionError("empty document should be rejected")

    print("smoke test passed")


if __name__ == "__main__":
    main()
