import math
import warnings

import pytest
from hypothesis import given, strategies as st

from wordcollector.spectrum import (
    LOG_COLLISION_TOL,
    EmptyLanguageError,
    InvalidAssignmentError,
    SubComposition,
    WeightAssignment,
    WeightClass,
    WeightCollisionWarning,
    build_spectrum,
    class_probabilities,
    normalize,
    spectrum_from_weights,
    uniform_spectrum,
)


def asg(**w):
    return WeightAssignment.from_mapping(w)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ({"a": 2, "b": 3}, {"a": 1.0, "b": 1.5}),
        ({"a": 1, "b": 1}, {"a": 1.0, "b": 1.0}),
        ({"a": 0.5, "b": 0.75, "c": 1.25}, {"a": 1.0, "b": 1.5, "c": 2.5}),
    ],
)
def test_normalize_examples(raw, expected):
    out = normalize(WeightAssignment.from_mapping(raw)).as_dict()
    assert out.keys() == expected.keys()
    for k in expected:
        assert out[k] == pytest.approx(expected[k], rel=1e-15)


def test_normalize_puts_unit_letters_first():
    out = normalize(asg(x=3.0, y=1.0, z=2.0, w=1.0))
    assert out.letters == ("y", "w", "z", "x")
    assert out.unit_letters == ("y", "w")


def test_normalize_snaps_near_unit():
    out = normalize(asg(a=1.0, b=1.0 + 1e-14))
    assert out.weights == (1.0, 1.0)
    assert out.is_uniform


@given(st.lists(st.floats(0.01, 100.0), min_size=1, max_size=6))
def test_normalize_idempotent(ws):
    a = WeightAssignment(tuple(f"l{i}" for i in range(len(ws))), tuple(ws))
    once = normalize(a)
    assert normalize(once) == once
    assert min(once.weights) == 1.0
    assert once.is_normalized


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_invalid_weight_rejected(bad):
    with pytest.raises(InvalidAssignmentError):
        asg(a=1.0, b=bad)


def test_duplicate_letters_rejected():
    with pytest.raises(InvalidAssignmentError):
        WeightAssignment(("a", "a"), (1.0, 2.0))


def test_subcomposition_fields():
    x = SubComposition.from_counts([2, 1], [math.log(1.5), math.log(2.0)])
    assert x.size == 3
    assert x.log_weight == pytest.approx(2 * math.log(1.5) + math.log(2.0))
    assert SubComposition.from_counts([0, 0], [1.0, 2.0]).log_weight == 0.0


def test_build_spectrum_sum_of_multiplicities():
    lw = math.log(1.5)
    sp = build_spectrum(
        [WeightClass(SubComposition((0,), 0.0), 1), WeightClass(SubComposition((2,), 2 * lw), 6)], 2
    )
    assert sp.m == 7
    assert [c.multiplicity for c in sp.classes] == [1, 6]


def test_build_spectrum_merges_collisions():
    classes = [
        WeightClass(SubComposition((1, 0), 0.7), 3),
        WeightClass(SubComposition((0, 1), 0.7 + LOG_COLLISION_TOL / 10), 4),
    ]
    with pytest.warns(WeightCollisionWarning):
        sp = build_spectrum(classes, 1)
    assert len(sp) == 1
    assert sp.classes[0].multiplicity == 7
    assert len(sp.collisions) == 1
    assert set(sp.collisions[0].keys) == {(1, 0), (0, 1)}


def test_build_spectrum_same_key_summed_silently():
    key = SubComposition((1,), 0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sp = build_spectrum([WeightClass(key, 2), WeightClass(key, 5)], 1)
    assert sp.m == 7 and not sp.collisions


def test_build_spectrum_empty():
    with pytest.raises(EmptyLanguageError):
        build_spectrum([], 3)


def test_zero_multiplicity_rejected():
    with pytest.raises(ValueError):
        WeightClass(SubComposition((), 0.0), 0)


def test_motzkin_n4_spectrum_numbers():
    # classes (k=0, M=1, W=1), (k=1, M=6, W=1.8), (k=2, M=2, W=3.24)
    sp = spectrum_from_weights([(1.0, 1), (1.8, 6), (3.24, 2)])
    assert sp.m == 9
    assert sp.mu == pytest.approx(18.28, rel=1e-12)
    total = sum(M * math.exp(lp) for lp, M in class_probabilities(sp))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_class_probabilities_examples():
    (lp, M), = class_probabilities(uniform_spectrum(5))
    assert M == 5 and lp == pytest.approx(-math.log(5))
    probs = [math.exp(lp) for lp, _ in class_probabilities(spectrum_from_weights({1.0: 1, 2.0: 1}))]
    assert probs == pytest.approx([1 / 3, 2 / 3], rel=1e-14)


@given(st.lists(st.tuples(st.floats(0.0, 20.0), st.integers(1, 10**30)), min_size=1, max_size=12))
def test_spectrum_invariants(raw):
    classes = [WeightClass(SubComposition((i,), lw), M) for i, (lw, M) in enumerate(raw)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeightCollisionWarning)
        sp = build_spectrum(classes, 0)
    assert sp.m == sum(M for _, M in raw)
    lws = list(sp.log_weights)
    assert all(b - a >= LOG_COLLISION_TOL for a, b in zip(lws, lws[1:]))
    direct = math.fsum(M * math.exp(lw - lws[-1]) for lw, M in raw)
    assert abs(math.log(direct) + lws[-1] - sp.log_mu) < 1e-12
    total = math.fsum(M * math.exp(lp) for lp, M in class_probabilities(sp))
    assert total == pytest.approx(1.0, abs=1e-10)
