import json
import math

import numpy as np
import pytest

from liouville_workbench import (
    BoundaryIntegral,
    FunctionDescriptor,
    GridFunction,
    NoFiniteTime,
    ProblemSpec,
    build_G,
    build_psi0,
    catalog,
    check_compatibility,
    constant,
    exponential,
    invert_G,
    load_problem_spec,
    polynomial,
    singular_boundary,
    spec_hash,
)


class TestGridFunction:
    def test_linear_interpolation(self):
        gf = GridFunction(np.array([0.0, 1.0, 2.0]), np.array([0.0, 2.0, 6.0]))
        assert gf(0.5) == 1.0
        assert gf(1.5) == 4.0
        np.testing.assert_allclose(gf([0.0, 2.0]), [0.0, 6.0])

    def test_rejects_unsorted_nodes(self):
        with pytest.raises(ValueError):
            GridFunction(np.array([0.0, 1.0, 1.0]), np.zeros(3))

    def test_csv_roundtrip(self, tmp_path):
        gf = GridFunction(np.linspace(0, 1, 5), np.arange(5.0) ** 2)
        path = tmp_path / "gf.csv"
        gf.to_csv(path)
        rows = np.loadtxt(path, delimiter=",", skiprows=1)
        np.testing.assert_allclose(rows[:, 1], gf.values, rtol=1e-12)


class TestFunctionDescriptor:
    def test_constant(self):
        c = constant(3.0)
        assert c(0.7) == 3.0
        assert c.derivative(0.7) == 0.0

    def test_polynomial_value_and_derivative(self):
        p = polynomial(1.0, 2.0)  # 1 + 2x
        assert p(0.5) == 2.0
        assert p.derivative(0.25) == 2.0
        assert p.is_polynomial()

    def test_trigonometric(self):
        d = FunctionDescriptor("trigonometric", {"offset": 0.5, "terms": [[1.0, 1.0, 0.0]]})
        assert d(0.25) == pytest.approx(1.5, abs=1e-14)  # 0.5 + sin(pi/2)
        assert d.derivative(0.0) == pytest.approx(2 * math.pi, rel=1e-12)

    def test_singular_boundary(self):
        s = singular_boundary(1.0, t_b=1.0)
        assert s(0.5) == pytest.approx(4.0, rel=1e-14)
        with pytest.raises(ValueError):
            s(1.0)
        with pytest.raises(ValueError):
            s.scaled(2.0)

    def test_exponential(self):
        e = exponential(2.0, -1.0)
        assert e(0.0) == 2.0
        assert e.derivative(0.0) == -2.0
        assert e(1.0) == pytest.approx(2.0 / math.e, rel=1e-14)

    def test_table(self):
        d = FunctionDescriptor.from_dict(
            {"kind": "table", "params": {"nodes": [0.0, 1.0], "values": [1.0, 3.0]}}
        )
        assert d(0.5) == 2.0

    def test_scaled_polynomial(self):
        p = polynomial(1.0, 2.0).scaled(2.0)
        assert p(1.0) == 6.0

    def test_dict_roundtrip(self):
        p = polynomial(0.0, 1.0, -1.0)
        again = FunctionDescriptor.from_dict(p.to_dict())
        assert again(0.3) == p(0.3)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            FunctionDescriptor("rational", {})


class TestProblemSpec:
    def test_rejects_tiny_grid(self):
        with pytest.raises(ValueError):
            ProblemSpec(f=polynomial(-1.0, 2.0), u0=constant(1.0),
                        g=polynomial(1.0, 2.0), n_alpha=8)

    def test_rejects_vanishing_u0(self):
        with pytest.raises(ValueError):
            ProblemSpec(f=polynomial(-1.0, 2.0), u0=polynomial(1.0, -2.0),
                        g=polynomial(1.0, 2.0))

    def test_normalizes_u0_at_zero(self):
        with pytest.warns(UserWarning):
            spec = ProblemSpec(f=polynomial(-1.0, 2.0), u0=constant(2.0),
                               g=polynomial(1.0, 2.0))
        assert float(spec.u0(0.0)) == pytest.approx(1.0, rel=1e-14)
        # the rescale touches u0 only
        assert float(spec.f(1.0)) == pytest.approx(1.0, rel=1e-14)

    def test_normalizes_g_at_zero(self):
        with pytest.warns(UserWarning):
            spec = ProblemSpec(f=polynomial(-1.0, 2.0), u0=constant(1.0),
                               g=polynomial(2.0, 2.0))
        assert float(spec.g(0.0)) == pytest.approx(1.0, rel=1e-14)

    def test_rescales_singular_time_unit(self):
        with pytest.warns(UserWarning):
            spec = ProblemSpec(f=polynomial(-1.0, 2.0), u0=constant(1.0),
                               g=singular_boundary(1.0, t_b=2.0))
        assert spec.g.params["t_b"] == pytest.approx(1.0)
        assert float(spec.f(1.0)) == pytest.approx(2.0, rel=1e-14)

    def test_alpha_grid_endpoints(self):
        spec = catalog.example_spec(2)
        grid = spec.alpha_grid()
        assert grid[0] == 0.0 and grid[-1] == 1.0 and len(grid) == 513

    def test_hash_is_stable_and_distinguishes(self):
        s1, s2 = catalog.example_spec(1), catalog.example_spec(2)
        assert spec_hash(s1) == spec_hash(s1)
        assert spec_hash(s1) != spec_hash(s2)
        assert len(spec_hash(s1)) == 16

    def test_json_loader(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(catalog.example_spec_dict(2)))
        spec = load_problem_spec(path)
        assert spec.f(0.0) == 1.0 and spec.g(1.0) == 3.0

    def test_json_loader_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"f": {"kind": "constant"}}')
        with pytest.raises(ValueError):
            load_problem_spec(path)


class TestPsi0:
    def test_example2_closed_form(self, problem):
        _, profile, _ = problem(2)
        # f u0 = 1 - 2a integrates to a - a^2
        assert profile.value(0.5) == pytest.approx(0.25, abs=1e-15)
        assert profile.M0 == pytest.approx(0.25, abs=1e-12)
        np.testing.assert_allclose(profile.argmax_set, [0.5], atol=1e-12)
        np.testing.assert_allclose(profile.omega, [0.0, 1.0], atol=1e-9)
        assert profile.alpha0 == pytest.approx(0.5, abs=1e-12)

    def test_example1_no_positive_part(self, problem):
        _, profile, _ = problem(1)
        assert profile.M0 == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(profile.omega, [0.0, 1.0], atol=1e-9)

    def test_quadrature_matches_antiderivative(self, problem):
        spec, exact, _ = problem(2)
        quad = build_psi0(spec, method="quadrature")
        diff = np.max(np.abs(quad.psi0.values - exact.psi0.values))
        assert diff <= 1e-12  # Simpson is exact on linear f*u0

    def test_offgrid_vertex_is_refined(self):
        # psi0 = 0.7a - a^2 peaks at 0.35, strictly between grid nodes
        spec = ProblemSpec(f=polynomial(0.7, -2.0), u0=constant(1.0),
                           g=polynomial(1.0, 2.0))
        profile = build_psi0(spec)
        assert profile.M0 == pytest.approx(0.1225, abs=1e-12)
        assert profile.argmax_set[0] == pytest.approx(0.35, abs=1e-10)

    def test_trigonometric_profile(self):
        spec = ProblemSpec(
            f=FunctionDescriptor("trigonometric", {"offset": 0.0, "terms": [[1.0, 1.0, 0.0]]}),
            u0=constant(1.0), g=polynomial(1.0, 2.0))
        profile = build_psi0(spec)
        # psi0 = (1 - cos(2 pi a)) / (2 pi), max 1/pi at a = 0.5
        assert profile.M0 == pytest.approx(1.0 / math.pi, rel=1e-9)
        assert profile.argmax_set[0] == pytest.approx(0.5, abs=1e-9)


class TestBoundaryIntegral:
    def test_polynomial_closed_form(self, problem):
        _, _, B = problem(1)
        assert B.value(1.0) == pytest.approx(2.0, abs=1e-14)  # t^2 + t
        assert B.value(10.0) == pytest.approx(110.0, rel=1e-14)
        assert math.isinf(B.G_infinity)
        assert not B.estimated

    def test_singular_closed_form(self):
        B = build_G(singular_boundary(1.0), t_max=0.999)
        assert B.value(0.75) == pytest.approx(3.0, rel=1e-12)  # 1/(1-t) - 1
        assert math.isinf(B.G_infinity)

    def test_exponential_limit(self):
        B = build_G(exponential(1.0, -1.0), t_max=20.0)
        assert B.G_infinity == pytest.approx(1.0, rel=1e-14)
        assert invert_G(B, 0.5) == pytest.approx(math.log(2.0), rel=1e-12)
        with pytest.raises(NoFiniteTime):
            invert_G(B, 1.0)

    def test_invert_polynomial(self, problem):
        _, _, B = problem(1)
        assert invert_G(B, 2.0) == pytest.approx(1.0, rel=1e-12)

    def test_invert_singular(self):
        B = build_G(singular_boundary(1.0), t_max=0.999)
        assert invert_G(B, 3.0) == pytest.approx(0.75, rel=1e-12)

    def test_invert_quadrature(self, problem):
        spec, _, _ = problem(1)
        B = build_G(spec, t_max=3.0, method="quadrature")
        assert invert_G(B, 2.0) == pytest.approx(1.0, rel=1e-6)

    def test_quadrature_beyond_samples_rejected(self, problem):
        spec, _, _ = problem(1)
        B = build_G(spec, t_max=2.0, method="quadrature")
        with pytest.raises(ValueError):
            invert_G(B, B.value(2.0) + 1.0)

    def test_rejects_t_max_past_boundary(self):
        with pytest.raises(ValueError):
            build_G(singular_boundary(1.0), t_max=1.0)

    def test_rejects_nonpositive_g(self):
        table = FunctionDescriptor(
            "table", {"nodes": [0.0, 1.0, 2.0], "values": [1.0, 0.5, -0.5]})
        with pytest.raises(ValueError):
            build_G(table, t_max=2.0)

    def test_tail_estimate_is_flagged(self):
        nodes = np.linspace(0.0, 20.0, 2001)
        table = FunctionDescriptor(
            "table", {"nodes": nodes.tolist(), "values": np.exp(-nodes).tolist()})
        B = build_G(table, t_max=20.0)
        assert B.estimated
        assert B.G_infinity == pytest.approx(1.0, rel=1e-2)


class TestCompatibility:
    def test_examples_are_compatible(self, problem):
        for k in (1, 2, 3, 4):
            spec, _, _ = problem(k)
            report = check_compatibility(spec)
            assert report.ok
            assert report.defect <= 1e-12
            assert report.sign_change

    def test_one_signed_f_fails(self):
        spec = ProblemSpec(f=constant(1.0), u0=constant(1.0), g=polynomial(1.0, 2.0))
        report = check_compatibility(spec)
        assert not report.ok
        assert not report.sign_change
