import math
import random
from fractions import Fraction

import pytest

from equisep import io as fio
from equisep.arrangements import Arrangement, classify, cut_number_exact, max_cell
from equisep.generators import gen_convex, gen_random, gen_theorem32
from equisep.geom import ConcreteLine
from equisep.pipeline import (
    SURVEY_HEADER,
    FndConfig,
    cut_bound_report,
    fnd_witness,
    ordered_map,
    separation_survey,
    verify_fnd_witness,
)
from equisep.stabbing import stab_polygon


@pytest.fixture(scope="module")
def source():
    return gen_random(300, 1)


def test_fnd_degenerate_convex(source):
    w = fnd_witness(source, FndConfig(12, 2))
    assert w.h_used == 0 and w.measured_stab == 2
    assert verify_fnd_witness(w, source, FndConfig(12, 2)) == []


def test_fnd_small_and_monotone_in_d(source):
    for d in (8, 12, 16):
        cfg = FndConfig(12, d)
        w = fnd_witness(source, cfg)
        assert len(w.subset_ids) >= 12 and w.measured_stab <= d
        if w.h_used:
            assert w.union_stab <= 2 * w.h_used + 4
        assert verify_fnd_witness(w, source, cfg) == []


def test_fnd_witness_round_trip(source):
    cfg = FndConfig(12, 8)
    w = fnd_witness(source, cfg)
    back = fio.from_json(fio.to_json(w))
    assert verify_fnd_witness(back, source, cfg) == []
    tampered = fio.from_json(fio.to_json(w).replace(f'"measured_stab": {w.measured_stab}', '"measured_stab": 1'))
    assert verify_fnd_witness(tampered, source, cfg)


def test_fnd_config_checks():
    with pytest.raises(ValueError):
        FndConfig(2, 4)
    with pytest.raises(ValueError):
        FndConfig(10, 1)


def test_cut_report_convex_is_tight():
    ps = gen_convex(12, 0)
    rep = cut_bound_report(ps, 2)
    assert rep.exact_cut == 3 and rep.constructive_upper == 3
    assert max(lb.ceiling for lb in rep.lower_bounds) == 3
    assert rep.consistent()
    assert rep.to_csv().splitlines()[0] == "kind,description,size,degree_bound,value,ceiling"


def test_cut_report_random_below_exact():
    for seed in range(3):
        ps = gen_random(10, seed)
        rep = cut_bound_report(ps, 2)
        assert all(lb.ceiling <= cut_number_exact(ps, 2).value for lb in rep.lower_bounds)
        assert rep.consistent()


def test_cut_report_theorem32_curve():
    inst = gen_theorem32(2)
    for K in (1, 2):
        rep = cut_bound_report(inst.points, K, curve=inst.curve)
        whole = [lb for lb in rep.lower_bounds if lb.description.startswith("whole set")]
        assert whole and whole[0].value >= Fraction(inst.points.n, 22 * K)
        assert rep.consistent()


def _random_arrangement(rng, K):
    return Arrangement(
        tuple(
            ConcreteLine(Fraction(rng.randint(-999, 999), 97), Fraction(rng.randint(-999, 999), 89), Fraction(rng.randint(-999, 999), 1013))
            for _ in range(K)
        )
    )


def test_curve_bound_holds_on_sampled_arrangements():
    inst = gen_theorem32(2)
    ps, stab = inst.points, stab_polygon(inst.curve).value
    rng = random.Random(0)
    for _ in range(40):
        arr = _random_arrangement(rng, 2)
        if not all(ln.avoids(ps.coords) for ln in arr.lines):
            continue
        assert max_cell(classify(ps, arr)) >= math.ceil(ps.n / (2 * stab))


def test_survey_examples():
    assert separation_survey(0, 8, 2).splitlines() == [",".join(SURVEY_HEADER)]
    a = separation_survey(3, 8, 2, seed=4)
    assert a == separation_survey(3, 8, 2, seed=4)
    assert a == separation_survey(3, 8, 2, seed=4, jobs=2)
    assert len(a.splitlines()) == 4


def _square(x):
    return x * x


def test_ordered_map_keeps_order():
    assert ordered_map(_square, range(6), jobs=2) == [x * x for x in range(6)]
