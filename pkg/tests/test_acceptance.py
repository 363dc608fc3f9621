"""Acceptance criteria, each checked at its stated tolerance and time budget.

Every test prints (and records for the end-of-run summary) one line
``criterion N: PASS|FAIL ...``. Run directly with ``python tests/test_acceptance.py``
for the lines alone.
"""
import json
import subprocess
import sys
import time

import jsonschema
import pytest

from uniformgeom import build_chain_graph, chain_cover, components_met, net_cover
from uniformgeom.metric_core import ball_inclusion_map
from uniformgeom.spaces import REPORT_SCHEMA, orthonormal_rays, ray_tips, reciprocal_set, sqrt_interval
from uniformgeom import verification as V

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance

SEED = 20261018
TOL = 1e-9  # triangle, local identity, bounds
EXACT_TOL = 1e-12  # chain distance against path enumeration


def report(number, ok, detail):
    text = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(text)
    print(text)
    return ok


def _property(number, prop, count, budget=None, **kw):
    res = prop(SEED, count, **kw)
    ok = res.ok and res.instances == count and (budget is None or res.seconds < budget)
    timing = f"{res.seconds:.2f}s" + (f" (budget {budget:g}s)" if budget else "")
    report(number, ok, f"{res.property}: {res.instances} instances, {res.failures} failures, {timing}")
    return res, ok


def test_criterion_01_rho_triangle():
    assert V.SUITE1_INSTANCES == 200
    res, ok = _property(1, V.prop_rho_triangle, 200, budget=30.0, tol=TOL)
    assert ok, res.details[:5]


def test_criterion_02_chain_distance_oracle():
    res, ok = _property(2, V.prop_chain_distance_oracle, 100, budget=10.0, tol=EXACT_TOL)
    assert ok, res.details[:5]


def test_criterion_03_local_identity():
    res, ok = _property(3, V.prop_local_identity, 200, tol=TOL)
    assert ok, res.details[:5]


def test_criterion_04_hop_bound():
    res, ok = _property(4, V.prop_hop_bound, 200, tol=TOL)
    assert ok, res.details[:5]


def test_criterion_05_lemma_both_directions():
    fwd = V.prop_forward_bound(SEED, 200)
    rev = V.prop_reverse_cover(SEED, 100)
    ok = fwd.ok and rev.ok and fwd.instances == 200 and rev.instances == 100
    report(
        5,
        ok,
        f"forward {fwd.instances} instances / {fwd.failures} failures; "
        f"reverse {rev.instances} (B, R) cases / {rev.failures} failures",
    )
    assert ok, (fwd.details[:5], rev.details[:5])


def test_criterion_06_cover_chain():
    res, ok = _property(6, V.prop_cover_chain, 50, budget=60.0)
    assert ok, res.details[:5]


def test_criterion_07_orthonormal_rays():
    space = orthonormal_rays(8, 3)
    tips = ray_tips(8, 3)
    g = build_chain_graph(space, 0.8)
    net = net_cover(space, tips, 0.8, method="exact", graph=g).size
    chain = chain_cover(space, tips, 0.8, 3, method="exact", graph=g).size
    met = components_met(g, tips)
    ok = (net, chain, met) == (8, 1, 1)
    report(7, ok, f"net {net} (want 8), chain-3 {chain} (want 1), components met {met} (want 1)")
    assert ok


def test_criterion_08_reciprocal_profile():
    sizes = {k: net_cover(reciprocal_set(k), range(k), 0.1).size for k in (50, 200)}
    ok = sizes[50] == sizes[200]
    report(8, ok, f"greedy net size at eps 0.1: k=50 -> {sizes[50]}, k=200 -> {sizes[200]}")
    assert ok


def test_criterion_09_label_images():
    res, ok = _property(9, V.prop_label_images, 100)
    assert ok, res.details[:5]


def test_criterion_10_oscillation():
    res, ok = _property(10, V.prop_oscillation, 200, m_max=4)
    assert ok, res.details[:5]


def test_criterion_11_ball_inclusion():
    step = 0.25
    usual, root = sqrt_interval(100, step)
    pairs = ball_inclusion_map(usual, root, 0, list(range(1, 11)))
    worst = max(abs(R - r * r) for r, R in pairs)
    ok = worst <= step
    report(11, ok, f"max |R - r^2| over r=1..10 is {worst:g} (grid step {step:g})")
    assert ok


def _cli(*argv, **kw):
    return subprocess.run([sys.executable, "-m", "uniformgeom.cli", *map(str, argv)], capture_output=True, text=True, **kw)


def test_criterion_12_cli_round_trip(tmp_path):
    space = tmp_path / "rays.csv"
    tips = tmp_path / "tips.txt"
    tips.write_text("\n".join(map(str, ray_tips(8, 3))) + "\n")
    steps = [_cli("generate", "--family", "orthonormal_rays", "--params", "N=8", "steps=3", "--out", space)]
    outputs = []
    for k in range(2):
        out = tmp_path / f"report{k}.json"
        steps.append(
            _cli("analyze", "--input", space, "--subset", tips, "--eps-grid", "0.2:1.0:0.2", "--m-grid", "1,2,4,inf", "--out", out)
        )
        outputs.append(out.read_bytes() if out.exists() else b"")
    try:
        jsonschema.validate(json.loads(outputs[0]), REPORT_SCHEMA)
        valid = True
    except (ValueError, jsonschema.ValidationError):
        valid = False
    start = time.perf_counter()
    verify = _cli("verify", "--suite", "all", "--seed", SEED)
    took = time.perf_counter() - start
    codes = [p.returncode for p in steps]
    identical = outputs[0] == outputs[1] and bool(outputs[0])
    ok = codes == [0, 0, 0] and valid and identical and verify.returncode == 0
    report(
        12,
        ok,
        f"exit codes {codes}, schema-valid {valid}, byte-identical {identical}, "
        f"verify --suite all exit {verify.returncode} ({took:.1f}s)",
    )
    assert ok, verify.stdout + verify.stderr


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
