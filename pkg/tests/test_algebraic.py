import numpy as np
import pytest

from meandim.algebraic import (
    AlgebraicActionSpec,
    haar_measure,
    prodim,
    projection_dimension,
    rdim_prodim_experiment,
    separating_bound_check,
    separating_threshold,
    subadditivity_check,
    torus_covering_lower_bound,
    translate,
)
from meandim.utils import DomainError, StructuralError

LINKED = ((0, 1, -1, 0),)


class TestSpec:
    def test_row_length_checked(self):
        with pytest.raises(StructuralError):
            AlgebraicActionSpec(r=2, a=2, M=((1, -1),), q=4)

    def test_from_dict(self):
        spec = AlgebraicActionSpec.from_dict({"r": 1, "a": 2, "M": [[1, -1]], "q": 4})
        assert spec.M == ((1, -1),)
        assert spec.W == 1
        with pytest.raises(StructuralError):
            AlgebraicActionSpec.from_dict({"r": 1, "a": 2})

    def test_system_label(self):
        system = AlgebraicActionSpec(r=2, a=2, M=LINKED, q=4).to_system()
        assert system.label == "algebraic-r2-a2"
        assert system.alphabet.size == 16


class TestProdim:
    def test_unconstrained_torus(self):
        result = prodim(AlgebraicActionSpec(r=2, a=1, M=(), q=4), [1, 2, 3])
        assert result.per_n == {1: 2, 2: 4, 3: 6}
        assert result.value == pytest.approx(2.0)

    def test_constant_sequences(self):
        result = prodim(AlgebraicActionSpec(r=1, a=2, M=((1, -1),), q=4), [2, 3, 4])
        assert result.per_n == {2: 1, 3: 1, 4: 1}
        assert result.stabilized
        assert result.value == pytest.approx(0.0)
        assert result.inf_estimate == pytest.approx(0.25)

    def test_linked_coordinates(self):
        result = prodim(AlgebraicActionSpec(r=2, a=2, M=LINKED, q=4), [2, 3, 4, 5])
        assert [result.per_n[N] for N in (2, 3, 4, 5)] == [3, 4, 5, 6]
        assert result.value == pytest.approx(1.0)
        assert result.ranks_agree

    def test_depth_below_window(self):
        with pytest.raises(DomainError):
            prodim(AlgebraicActionSpec(r=2, a=2, M=LINKED, q=4), [1, 2])
        with pytest.raises(DomainError):
            projection_dimension(AlgebraicActionSpec(r=2, a=2, M=LINKED, q=4), 0)

    def test_subadditivity(self):
        report = subadditivity_check(AlgebraicActionSpec(r=2, a=2, M=LINKED, q=4), [1, 2, 3, 4])
        assert report.holds
        assert {(p["M"], p["N"]) for p in report.pairs} == {(1, 1), (1, 2), (1, 3), (2, 2)}


class TestHaar:
    def test_unconstrained(self):
        measure = haar_measure(AlgebraicActionSpec(r=1, a=1, M=(), q=2, W=1))
        words, mass = measure.support()
        assert words.shape == (8, 3)
        np.testing.assert_allclose(mass, np.full(8, 1 / 8))

    def test_constant_words(self):
        measure = haar_measure(AlgebraicActionSpec(r=1, a=2, M=((1, -1),), q=4, W=1))
        words, mass = measure.support()
        assert len(words) == 4
        assert all(len(set(w.tolist())) == 1 for w in words)
        assert measure.metadata["order"] == 4

    def test_unresolved_divisors(self):
        with pytest.raises(DomainError, match="12"):
            haar_measure(AlgebraicActionSpec(r=1, a=1, M=((3,),), q=4, W=1))

    def test_translation_invariance(self):
        spec = AlgebraicActionSpec(r=2, a=2, M=LINKED, q=4, W=1)
        measure = haar_measure(spec)
        words, _ = measure.support()
        assert len(words) == 4 ** 4
        original = {tuple(w) for w in words.tolist()}
        for element in words[[1, 17, 200]]:
            moved = translate(words, element, measure.system)
            assert {tuple(w) for w in moved.tolist()} == original

    def test_needs_torus(self, binary_shift):
        with pytest.raises(DomainError):
            haar_measure(binary_shift)


class TestBounds:
    def test_separating_bound(self):
        spec = AlgebraicActionSpec(r=1, a=1, M=(), q=8, W=0)
        report = separating_bound_check(spec, 2, 0.1, 0.5)
        assert report.dim == 2
        assert report.bound == pytest.approx(10 / 16)
        assert report.passed
        with pytest.raises(DomainError):
            separating_bound_check(spec, 1, 0.1, 1.0)

    def test_separating_threshold(self):
        spec = AlgebraicActionSpec(r=1, a=1, M=(), q=8, W=0)
        result = separating_threshold(spec, 1, 0.5, [0.3, 0.2, 0.1])
        assert result["threshold"] == 0.3
        assert len(result["checks"]) == 3

    def test_torus_covering(self):
        spec = AlgebraicActionSpec(r=2, a=2, M=LINKED, q=4, W=0)
        report = torus_covering_lower_bound(spec, 1, 1 / 8)
        assert report.dim == 2
        assert report.bound == pytest.approx(4.0)
        assert report.count == 16
        assert report.certificate == "covering-exact"
        assert report.passed
        with pytest.raises(DomainError):
            torus_covering_lower_bound(spec, 1, 0.3)


@pytest.mark.slow
def test_rdim_prodim_experiment_runs():
    spec = AlgebraicActionSpec(r=2, a=2, M=LINKED, q=16, W=1)
    report = rdim_prodim_experiment(spec, [0.4, 0.2, 0.1, 0.0625, 0.04], [2, 3])
    assert report.prodim.value == pytest.approx(1.0)
    assert report.curve.source["method"] == "homogeneous"
    assert report.proxy is None and report.proxy_note
    data = report.to_dict()
    assert "chain_holds" in data
    assert np.isfinite(report.rdim.slope)
