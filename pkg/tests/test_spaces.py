import io
import json
import math

import jsonschema
import numpy as np
import pytest

from uniformgeom import (
    INF,
    CSVParseError,
    DomainError,
    MetricValidationError,
    bornology_report,
    build_chain_graph,
    scale_profile,
    validate_metric,
)
from uniformgeom.metric_core import ball_inclusion_map, diameter
from uniformgeom.spaces import (
    FAMILIES,
    REPORT_SCHEMA,
    SpaceSpec,
    atsuji_pairs,
    discrete01,
    dumps_report,
    generate,
    lattice,
    load_distance_csv,
    load_points_csv,
    load_subset_file,
    orthonormal_rays,
    product_sup,
    random_cloud,
    reciprocal_set,
    report_to_dict,
    save_distance_csv,
    save_report_json,
    sqrt_interval,
)
from uniformgeom.verification import run_suite

SPECS = [
    SpaceSpec("discrete01", {"k": 4}),
    SpaceSpec("sqrt_interval", {"R": 4, "step": 0.5}),
    SpaceSpec("reciprocal_set", {"k": 10}),
    SpaceSpec("atsuji_pairs", {"k": 5}),
    SpaceSpec("orthonormal_rays", {"N": 3, "steps": 2}),
    SpaceSpec("lattice", {"dims": 2, "side": 3}),
    SpaceSpec("random_cloud", {"n": 12, "dim": 3}, seed=11),
    SpaceSpec(
        "product_sup",
        {"a": SpaceSpec("reciprocal_set", {"k": 3}), "b": {"family": "orthonormal_rays", "params": {"N": 2, "steps": 1}}},
    ),
]


def _spaces(spec):
    out = generate(spec)
    return out if isinstance(out, tuple) else (out,)


class TestGenerators:
    def test_discrete(self):
        d = np.asarray(discrete01(3).dist)
        assert np.array_equal(d, 1 - np.eye(3))

    def test_reciprocal(self):
        s = reciprocal_set(3)
        assert np.allclose(s.coords[:, 0], [1, 0.5, 1 / 3])
        assert s.d(0, 1) == 0.5

    def test_orthonormal_rays(self):
        s = orthonormal_rays(2, 2)
        assert s.n == 5
        # 0, e1/2, e1, e2/2, e2
        assert s.d(2, 4) == pytest.approx(math.sqrt(2))
        assert s.d(0, 1) == pytest.approx(0.5)
        assert s.d(1, 3) == pytest.approx(math.sqrt(2) / 2)
        assert s.d(1, 2) == pytest.approx(0.5)

    def test_orthonormal_rays_matches_coordinates(self):
        N, steps = 4, 3
        s = orthonormal_rays(N, steps)
        pts = np.zeros((1 + N * steps, N))
        for i in range(N):
            for t in range(1, steps + 1):
                pts[1 + i * steps + t - 1, i] = t / steps
        want = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
        assert np.allclose(s.dist, want, atol=1e-12)

    def test_atsuji_pairs(self):
        s = atsuji_pairs(4)
        assert np.allclose(s.coords[:, 0], [1, 1.5, 2, 2 + 1 / 3, 3, 3.25, 4, 4.2])
        # below the smallest gap inside a pair every point is alone; just above it, pairs at most
        g = build_chain_graph(s, 0.21)
        assert max(g.component_sizes()) <= 2
        assert g.component_sizes()[-1] == 2

    def test_sqrt_interval(self):
        usual, root = sqrt_interval(4, 0.25)
        assert usual.n == root.n == 17
        assert root.d(0, 16) == pytest.approx(2.0)
        assert diameter(usual, range(17)) == 4.0
        # the root metric is bounded exactly where the usual one is
        pairs = ball_inclusion_map(usual, root, 0, [0.5, 1.0, 1.5, 2.0])
        assert [R for _, R in pairs] == pytest.approx([0.25, 1.0, 2.25, 4.0])

    def test_lattice(self):
        s = lattice(2, 3)
        assert s.n == 9 and s.d(0, 8) == pytest.approx(math.sqrt(8))

    def test_product_sup(self):
        a, b = reciprocal_set(3), discrete01(2)
        p = product_sup(a, b)
        assert p.n == 6
        # carrier index i * nB + j
        assert p.d(0, 1) == 1.0
        assert p.d(0, 4) == pytest.approx(2 / 3)
        line = generate(SpaceSpec("lattice", {"dims": 1, "side": 4}))
        assert product_sup(line, b).d(0, 6) == 1.0
        assert product_sup(line, b, cap=False).d(0, 6) == 3.0

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.family)
    def test_valid_and_deterministic(self, spec):
        for first, again in zip(_spaces(spec), _spaces(spec)):
            assert validate_metric(first.dist, 1e-9).ok
            assert np.array_equal(first.dist, again.dist)

    def test_all_families_covered(self):
        assert {s.family for s in SPECS} == set(FAMILIES)

    def test_random_cloud_seed(self):
        assert not np.array_equal(random_cloud(5, 2, 1).dist, random_cloud(5, 2, 2).dist)

    @pytest.mark.parametrize(
        "spec, field",
        [
            (SpaceSpec("discrete01", {"k": 0}), "k"),
            (SpaceSpec("discrete01", {}), "k"),
            (SpaceSpec("discrete01", {"k": 2.5}), "k"),
            (SpaceSpec("sqrt_interval", {"R": -1}), "R"),
            (SpaceSpec("orthonormal_rays", {"N": 2, "steps": "a"}), "steps"),
            (SpaceSpec("lattice", {"dims": 9, "side": 2}), "dims"),
            (SpaceSpec("reciprocal_set", {"k": 3, "q": 1}), "q"),
            (SpaceSpec("product_sup", {"a": SpaceSpec("discrete01", {"k": 2})}), "b"),
            (SpaceSpec("nope", {}), "nope"),
        ],
    )
    def test_bad_params(self, spec, field):
        with pytest.raises(DomainError, match=field):
            generate(spec)

    def test_spec_dict_round_trip(self):
        spec = SPECS[-1]
        again = SpaceSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
        assert np.array_equal(generate(again).dist, generate(spec).dist)


class TestDistanceCSV:
    def test_two_points(self):
        s = load_distance_csv(io.StringIO("0,1\n1,0\n"))
        assert s.n == 2 and s.d(0, 1) == 1.0

    def test_header(self):
        s = load_distance_csv(io.StringIO("a,b\n0,2\n2,0\n"))
        assert s.labels == ("a", "b") or list(s.labels) == ["a", "b"]

    def test_asymmetric(self):
        with pytest.raises(MetricValidationError) as info:
            load_distance_csv(io.StringIO("0,1\n2,0\n"))
        assert len(info.value.report.symmetry_violations) == 1

    def test_ragged(self):
        with pytest.raises(CSVParseError) as info:
            load_distance_csv(io.StringIO("0,1\n1\n"))
        assert info.value.line == 2

    def test_bad_token(self):
        with pytest.raises(CSVParseError) as info:
            load_distance_csv(io.StringIO("0,1\n1,x\n"))
        assert (info.value.line, info.value.column) == (2, 2)

    def test_not_square(self):
        with pytest.raises(CSVParseError):
            load_distance_csv(io.StringIO("0,1,2\n1,0,1\n"))

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.family)
    def test_round_trip(self, spec, tmp_path):
        space = _spaces(spec)[0]
        path = tmp_path / "space.csv"
        save_distance_csv(space, path)
        back = load_distance_csv(path)
        assert np.max(np.abs(np.asarray(back.dist) - np.asarray(space.dist))) <= 1e-12


class TestPointsCSV:
    @pytest.mark.parametrize("metric, want", [("euclidean", 5.0), ("l1", 7.0), ("linf", 4.0)])
    def test_metrics(self, metric, want):
        s = load_points_csv(io.StringIO("0,0\n3,4\n"), metric=metric)
        assert s.d(0, 1) == want
        assert np.array_equal(s.coords, [[0, 0], [3, 4]])

    def test_ragged(self):
        with pytest.raises(CSVParseError):
            load_points_csv(io.StringIO("0,0\n3\n"))


def test_subset_file():
    assert load_subset_file(io.StringIO("3\n\n# note\n1  # tail\n")) == [3, 1]
    with pytest.raises(CSVParseError):
        load_subset_file(io.StringIO("1\nx\n"))


class TestReportJSON:
    def test_empty_report(self):
        from uniformgeom import BornologyReport

        data = json.loads(dumps_report(BornologyReport(eps_grid=[], m_grid=[])))
        assert data["subsets"] == []
        jsonschema.validate(data, REPORT_SCHEMA)

    def test_singleton_profile(self):
        prof = scale_profile(discrete01(3), [1], [0.5, 1.5], [1, 2, INF])
        data = report_to_dict(prof)
        jsonschema.validate(data, REPORT_SCHEMA)
        sizes = [e["size"] for row in data["subsets"][0]["profile"] for e in row["entries"]]
        assert sizes == [1] * 6

    def test_full_report(self, tmp_path):
        spec = SpaceSpec("orthonormal_rays", {"N": 4, "steps": 2})
        rep = bornology_report(generate(spec), [[2, 4, 6, 8], [0]], [0.4, 0.6, 0.8], [1, 2, INF], space_descriptor=spec)
        path = tmp_path / "r.json"
        save_report_json(rep, path)
        text = path.read_text()
        data = json.loads(text)
        jsonschema.validate(data, REPORT_SCHEMA)
        assert data["space"] == spec.to_dict()
        assert data["m_grid"] == [1, 2, "inf"]
        assert data["flags"]
        # parse and re-serialize is byte-identical
        assert json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n" == text

    def test_twelve_digits(self):
        data = report_to_dict({"eps_grid": [1 / 3]})
        assert data["eps_grid"] == [0.333333333333]

    def test_verification_outcome(self):
        results = run_suite("metric", seed=3, instances=2)
        data = report_to_dict([r.to_dict() for r in results])
        jsonschema.validate(data, REPORT_SCHEMA)
        assert {"property", "instances", "failures"} <= set(data["verification"][0])

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError, match="missing"):
            save_report_json({}, tmp_path / "missing" / "r.json")
