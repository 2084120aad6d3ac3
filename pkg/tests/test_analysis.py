import numpy as np
import pytest
from hypothesis import given, strategies as st

from geolect.analysis import (
    AnalysisError,
    DegenerateMatrixError,
    DistanceField,
    DistanceMatrix,
    build_distance_matrix,
    compare_fields,
    distance_field,
    majority_map,
    median_split_agreement,
    pairwise_distances,
    select_reference,
)
from geolect.freqmodel import FrequencyModel, apply_threshold
from geolect.grid import CellId, GridSpec
from geolect.metrics import MetricKind, cosine_distance, jensen_shannon_distance

import corpora

SPEC = GridSpec()
CELLS = [CellId(k, 0) for k in range(8)]


def _model(lexicon, data):
    m = FrequencyModel(SPEC, lexicon)
    for (cell, concept), counts in data.items():
        for v, n in counts.items():
            m.counts[(cell, concept, v)] = n
        m.tweet_totals[(cell, concept)] = sum(counts.values())
    return m


def _matrix(values, cells=None):
    values = np.array(values, dtype=float)
    cells = cells or CELLS[: len(values)]
    return DistanceMatrix(cells, values, MetricKind.COSINE, "cold")


class TestBuildMatrix:
    def test_three_cells(self, lexicon):
        m = _model(lexicon, {(CELLS[0], "cold"): {"gripe": 2}, (CELLS[1], "cold"): {"gripe": 1, "catarro": 1},
                             (CELLS[2], "cold"): {"catarro": 5}})
        mat = build_distance_matrix(m, "cold", MetricKind.JENSEN_SHANNON)
        assert mat.cells == CELLS[:3]
        assert np.all(np.diag(mat.values) == 0)
        assert np.array_equal(mat.values, mat.values.T)
        assert mat.get(CELLS[0], CELLS[2]) == 1.0
        assert mat.get(CELLS[0], CELLS[1]) == pytest.approx(jensen_shannon_distance([0, 1], [0.5, 0.5]))

    def test_identical_cells(self, lexicon):
        m = _model(lexicon, {(CELLS[0], "cold"): {"gripe": 2, "catarro": 1},
                             (CELLS[1], "cold"): {"gripe": 4, "catarro": 2}})
        for kind in MetricKind:
            assert build_distance_matrix(m, "cold", kind).get(CELLS[0], CELLS[1]) == pytest.approx(0.0, abs=1e-12)

    def test_too_few_cells(self, lexicon):
        m = _model(lexicon, {(CELLS[0], "cold"): {"gripe": 2}})
        with pytest.raises(DegenerateMatrixError):
            build_distance_matrix(m, "cold", MetricKind.COSINE)
        with pytest.raises(DegenerateMatrixError):
            build_distance_matrix(m, "all", MetricKind.COSINE)

    def test_averaged_undefined_pairs(self, lexicon):
        m = _model(lexicon, {(CELLS[0], "cold"): {"gripe": 2}, (CELLS[1], "car"): {"coche": 1},
                             (CELLS[2], "cold"): {"catarro": 1}, (CELLS[2], "car"): {"coche": 3}})
        mat = build_distance_matrix(m, "all", MetricKind.COSINE)
        assert mat.get(CELLS[0], CELLS[1]) is None
        assert mat.get(CELLS[0], CELLS[2]) == 1.0
        assert mat.get(CELLS[1], CELLS[2]) == 0.0
        assert mat.n_concepts[mat.index(CELLS[2]), mat.index(CELLS[2])] == 2

    @pytest.mark.parametrize("kind", list(MetricKind))
    def test_vectorized_rows_match_scalar_metric(self, kind):
        rng = np.random.default_rng(1)
        freq = rng.dirichlet(np.ones(5) * 0.4, size=40)
        full = pairwise_distances(freq, kind, workers=3, block=7)
        f = cosine_distance if kind is MetricKind.COSINE else jensen_shannon_distance
        for i in range(40):
            for j in range(40):
                assert full[i, j] == pytest.approx(f(freq[i], freq[j]) if i != j else 0.0, abs=1e-12)
        assert np.array_equal(full, full.T)


class TestReference:
    def test_unique_max(self):
        vals = np.full((6, 6), 0.1)
        np.fill_diagonal(vals, 0)
        vals[2, 5] = vals[5, 2] = 0.8
        ref = select_reference(_matrix(vals))
        assert (ref.i_max, ref.j_max, ref.d_max) == (CELLS[2], CELLS[5], 0.8)

    def test_tie_goes_to_earliest_pair(self):
        vals = np.full((5, 5), 0.1)
        np.fill_diagonal(vals, 0)
        vals[3, 4] = vals[4, 3] = 0.9
        vals[1, 4] = vals[4, 1] = 0.9
        ref = select_reference(_matrix(vals))
        assert (ref.i_max, ref.j_max) == (CELLS[1], CELLS[4])

    def test_all_equal(self):
        vals = np.full((4, 4), 0.3)
        np.fill_diagonal(vals, 0)
        vals[0, 1] = vals[1, 0] = np.nan
        ref = select_reference(_matrix(vals))
        assert (ref.i_max, ref.j_max) == (CELLS[0], CELLS[2])

    def test_nothing_defined(self):
        vals = np.full((3, 3), np.nan)
        np.fill_diagonal(vals, 0)
        with pytest.raises(DegenerateMatrixError):
            select_reference(_matrix(vals))

    @given(st.floats(1e-3, 1e3))
    def test_rescaling(self, c):
        rng = np.random.default_rng(2)
        x = rng.random((7, 7))
        vals = np.triu(x, 1) + np.triu(x, 1).T
        a, b = _matrix(vals), _matrix(vals * c)
        ra, rb = select_reference(a), select_reference(b)
        assert (ra.i_max, ra.j_max) == (rb.i_max, rb.j_max)
        assert rb.d_max == pytest.approx(c * ra.d_max)
        fa, fb = distance_field(a, ra.i_max), distance_field(b, rb.i_max)
        assert fb.entries == pytest.approx(fa.entries, abs=1e-12)


class TestField:
    def test_normalization(self):
        vals = np.array([[0, 0.8, 0.4, 0.0], [0.8, 0, 0.1, 0.2], [0.4, 0.1, 0, 0.3], [0.0, 0.2, 0.3, 0]])
        f = distance_field(_matrix(vals), CELLS[0])
        assert f.entries == pytest.approx({CELLS[0]: 0.0, CELLS[1]: 1.0, CELLS[2]: 0.5, CELLS[3]: 0.0})
        assert f.d_max == 0.8

    def test_zero_dmax(self):
        with pytest.raises(DegenerateMatrixError, match="d_max is 0"):
            distance_field(_matrix(np.zeros((3, 3))), CELLS[0])

    def test_isolated_reference(self):
        vals = np.array([[0, np.nan, np.nan], [np.nan, 0, 0.5], [np.nan, 0.5, 0]])
        with pytest.raises(DegenerateMatrixError):
            distance_field(_matrix(vals), CELLS[0])

    @pytest.mark.parametrize("kind", list(MetricKind))
    def test_two_regions_separate(self, two_region_model, kind):
        mat = build_distance_matrix(two_region_model, "all", kind)
        ref = select_reference(mat)
        for reference in (ref.i_max, ref.j_max):
            f = distance_field(mat, reference)
            same = corpora.REGION_A if reference in corpora.REGION_A else corpora.REGION_B
            other = corpora.REGION_B if same is corpora.REGION_A else corpora.REGION_A
            assert all(0.0 <= v <= 1.0 for v in f.entries.values())
            assert f.entries[reference] == 0.0
            assert np.mean([f.entries[c] for c in other]) > np.mean([f.entries[c] for c in same])


class TestMajority:
    def test_rules(self, lexicon):
        m = _model(lexicon, {(CELLS[0], "cold"): {"gripe": 7, "resfriado": 3},
                             (CELLS[1], "cold"): {"resfriado": 5, "gripe": 5}})
        mm = majority_map(m, "cold")
        assert mm.entries == {CELLS[0]: "gripe", CELLS[1]: "gripe"}
        assert mm.ties == [CELLS[1]]
        assert CELLS[2] not in mm.entries

    @given(st.lists(st.integers(0, 9), min_size=8, max_size=8), st.integers(1, 20))
    def test_invariant_under_count_scaling(self, lexicon, counts, k):
        variants = lexicon.concept("cold").variant_ids
        base = {(CELLS[0], "cold"): dict(zip(variants, counts))}
        scaled = {(CELLS[0], "cold"): {v: n * k for v, n in zip(variants, counts)}}
        assert majority_map(_model(lexicon, base), "cold").entries == \
            majority_map(_model(lexicon, scaled), "cold").entries


def _field(values):
    return DistanceField(CELLS[0], {CellId(k, 1): v for k, v in enumerate(values)},
                         MetricKind.COSINE, "all", 0, 1.0)


class TestCompare:
    def test_identical_and_reversed(self):
        vals = np.linspace(0, 1, 12)
        assert compare_fields(_field(vals), _field(vals)) == (pytest.approx(1.0), 12)
        assert compare_fields(_field(vals), _field(1 - vals))[0] == pytest.approx(-1.0)

    def test_too_few_common_cells(self):
        with pytest.raises(AnalysisError):
            compare_fields(_field([0.1, 0.2]), _field([0.1, 0.2, 0.3]))

    def test_independent_fields(self):
        # simulation oracle: rank correlation of independent uniforms over 100 cells
        rng = np.random.default_rng(0)
        rhos = [compare_fields(_field(rng.random(100)), _field(rng.random(100)))[0] for _ in range(200)]
        assert np.mean(np.abs(np.array(rhos)) < 0.3) > 0.99
        assert abs(np.mean(rhos)) < 0.03

    def test_median_split(self):
        vals = np.linspace(0, 1, 10)
        assert median_split_agreement(_field(vals), _field(vals)) == (1.0, 1.0)
        assert median_split_agreement(_field(vals), _field(1 - vals)) == (0.0, 1.0)


def test_threshold_shrinks_cell_set(fixture_model):
    sizes = [len(apply_threshold(fixture_model, t).cells("cold")) for t in (0, 5, 10)]
    assert sizes == sorted(sizes, reverse=True)
