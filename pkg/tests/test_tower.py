import pytest

from itertor.algebra import check_invariants, divided_power
from itertor.bar import Limits, ResourceLimitError
from itertor.oracle import predict_series
from itertor.tor import tor
from itertor.tower import TowerSpec, parse_start, run_tower, run_tower_full, tower_series


def nz(series):
    return [s.nonzero() for s in series]


def test_first_example():
    stages = tower_series(TowerSpec(2, "poly", 4, 2, 12))
    assert nz(stages) == [
        {0: 1, 4: 1, 8: 1, 12: 1},
        {0: 1, 5: 1},
        {0: 1, 6: 1, 12: 1},
    ]


def test_iterations_zero_is_start():
    spec = TowerSpec(3, "poly", 4, 0, 12)
    (a,) = run_tower(spec)
    assert a.series() == spec.start_algebra().series()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_exterior_start_gives_divided(p):
    cap = 8 * p
    stages = run_tower(TowerSpec(p, "ext", 2 * p - 1, 1, cap))
    ref = divided_power(p, 2 * p, cap)
    assert stages[1].series() == ref.series()


@pytest.mark.parametrize("d", [2, 4, 6])
def test_second_stage_two_entries(d):
    cap = 2 * (d + 1) - 1
    s = tower_series(TowerSpec(3 if d % 2 == 0 else 2, "poly", d, 1, cap))
    assert s[1].nonzero() == {0: 1, d + 1: 1}


TRUNCATION_SPECS = [(2, "poly", 4, 3), (3, "poly", 4, 3), (2, "ext", 1, 3), (3, "ext", 5, 2), (5, "poly", 8, 2)]


@pytest.mark.parametrize("p,kind,d,k", TRUNCATION_SPECS)
def test_truncation_stability(p, kind, d, k):
    series = {cap: tower_series(TowerSpec(p, kind, d, k, cap)) for cap in (8, 16, 24)}
    for small, big in ((8, 16), (16, 24), (8, 24)):
        for a, b in zip(series[small], series[big]):
            assert a == b.truncate(small)


@pytest.mark.parametrize("p,kind,d,k", TRUNCATION_SPECS)
def test_stage_invariants(p, kind, d, k):
    run_tower(TowerSpec(p, kind, d, k, 20), check=True)
    for a in run_tower(TowerSpec(p, kind, d, k, 20)):
        check_invariants(a)


@pytest.mark.parametrize("p,kind,d,k", TRUNCATION_SPECS)
def test_euler_identity_every_stage(p, kind, d, k):
    for a in run_tower(TowerSpec(p, kind, d, k, 16))[:-1]:
        assert tor(a, full_columns=True).euler_defects() == []


@pytest.mark.parametrize("p,kind,d,k", TRUNCATION_SPECS)
def test_matches_oracle(p, kind, d, k):
    spec = TowerSpec(p, kind, d, k, 24)
    assert tower_series(spec) == predict_series(spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        TowerSpec(5, "poly", 3, 1, 10)
    with pytest.raises(ValueError):
        TowerSpec(3, "ext", 4, 1, 10)
    with pytest.raises(ValueError):
        TowerSpec(4, "poly", 4, 1, 10)
    with pytest.raises(ValueError):
        TowerSpec(3, "poly", 4, -1, 10)
    with pytest.raises(ValueError):
        TowerSpec(3, "trunc", 4, 1, 10)
    TowerSpec(2, "ext", 2, 1, 10)


def test_parse_start():
    assert parse_start("poly:4") == ("poly", 4)
    assert parse_start(" ext:1 ") == ("ext", 1)
    for bad in ("poly4", "sym:2", "poly:-2", "ext:"):
        with pytest.raises(ValueError):
            parse_start(bad)


def test_resource_limit_reports_stage():
    with pytest.raises(ResourceLimitError) as info:
        run_tower_full(TowerSpec(2, "ext", 1, 3, 24), limits=Limits(max_words=30))
    assert info.value.stage is not None and info.value.stage >= 2


def test_cap_zero():
    assert nz(tower_series(TowerSpec(3, "poly", 4, 3, 0))) == [{0: 1}] * 4


MATRIX = [(p, kind, d) for p in (2, 3, 5) for kind, d in dict.fromkeys([("poly", 2 * p), ("poly", 2 * p - 2), ("ext", 1), ("ext", 2 * p - 1)])]


@pytest.mark.parametrize("p,kind,d", MATRIX)
def test_oracle_agreement_matrix(p, kind, d):
    spec = TowerSpec(p, kind, d, 4, 32)
    engine = tower_series(spec)
    oracle = predict_series(spec)
    for k, (e, o) in enumerate(zip(engine, oracle), start=1):
        assert e == o, f"stage {k}"
