import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tbmopt.domain import (MGT_CATEGORIES, MachineSetting, MeanGrainSize, RockMassState,
                           SieveAnalysis, TunnelingRecord, WearInterval,
                           classify_muck_geometry, coarseness_index, cutter_life_from_wear,
                           mean_grain_size, muck_geometry_flags)
from tbmopt.errors import InvalidInputError, UnsupportedMuckComboError

SIEVES = (63.0, 37.5, 19.0, 9.5, 4.75, 2.36)


def sieve_sample(masses, pan=0.0, sample_id="s"):
    return SieveAnalysis(sample_id=sample_id,
                         bins=tuple(zip(SIEVES, masses)), pan_mass=pan)


# ---------------------------------------------------------------------------
# cutter life
# ---------------------------------------------------------------------------


def test_cutter_life_unity():
    # D=2, l=1, W=pi: constants cancel exactly
    assert cutter_life_from_wear(WearInterval(0.0, 1.0, math.pi, 2.0)) == pytest.approx(1.0)


def test_cutter_life_hand_values():
    ef = cutter_life_from_wear(WearInterval(100.0, 150.0, 40.0, 6.0))
    assert ef == pytest.approx(math.pi * 36 * 50 / 160, rel=1e-12)
    assert round(ef, 3) == 35.343
    halved = cutter_life_from_wear(WearInterval(100.0, 150.0, 80.0, 6.0))
    assert halved == pytest.approx(ef / 2, rel=1e-12)
    assert round(halved, 3) == 17.671


@pytest.mark.parametrize("kwargs,field", [
    (dict(start=1.0, end=1.0, total_wear=10.0, cutterhead_diameter=6.0), "end"),
    (dict(start=0.0, end=1.0, total_wear=0.0, cutterhead_diameter=6.0), "total_wear"),
    (dict(start=0.0, end=1.0, total_wear=10.0, cutterhead_diameter=0.0), "cutterhead_diameter"),
])
def test_cutter_life_invalid_inputs_name_field(kwargs, field):
    with pytest.raises(InvalidInputError) as err:
        WearInterval(**kwargs)
    assert err.value.field == field


@given(d=st.floats(0.1, 20), length=st.floats(1e-3, 1e4), wear=st.floats(1e-3, 1e5))
def test_cutter_life_scalings_exact(d, length, wear):
    base = cutter_life_from_wear(WearInterval(0.0, length, wear, d))
    assert cutter_life_from_wear(WearInterval(0.0, 2 * length, wear, d)) == 2 * base
    assert cutter_life_from_wear(WearInterval(0.0, length, 2 * wear, d)) == base / 2


# ---------------------------------------------------------------------------
# coarseness index
# ---------------------------------------------------------------------------


def test_ci_all_on_coarsest():
    assert coarseness_index(sieve_sample([100, 0, 0, 0, 0, 0])) == pytest.approx(600.0)


def test_ci_equal_split():
    # cumulative percents 16.67, 33.33, 50, 66.67, 83.33, 100
    assert coarseness_index(sieve_sample([1] * 6)) == pytest.approx(350.0)


def test_ci_all_in_pan():
    assert coarseness_index(sieve_sample([0] * 6, pan=50.0)) == 0.0


@given(masses=st.lists(st.floats(0, 100), min_size=6, max_size=6),
       pan=st.floats(0, 100), scale=st.floats(0.01, 1000))
def test_ci_scale_invariant(masses, pan, scale):
    if sum(masses) + pan <= 0:
        return
    base = coarseness_index(sieve_sample(masses, pan))
    scaled = coarseness_index(sieve_sample([m * scale for m in masses], pan * scale))
    assert scaled == pytest.approx(base, abs=1e-9)
    assert 0 <= base <= 600 + 1e-9


@given(masses=st.lists(st.floats(0.1, 100), min_size=6, max_size=6),
       extra_pan=st.floats(0.1, 100))
def test_ci_pan_mass_strictly_decreases(masses, extra_pan):
    base = coarseness_index(sieve_sample(masses, pan=0.0))
    with_pan = coarseness_index(sieve_sample(masses, pan=extra_pan))
    assert with_pan < base


# ---------------------------------------------------------------------------
# mean grain size
# ---------------------------------------------------------------------------


def _log_interp_oracle(passing, p):
    # independent straight-line-in-log10 read of the gradation curve
    for i in range(len(SIEVES) - 1, 0, -1):
        lo, hi = passing[i], passing[i - 1]
        if lo <= p <= hi:
            t = 0.0 if hi == lo else (p - lo) / (hi - lo)
            return 10 ** ((1 - t) * math.log10(SIEVES[i]) + t * math.log10(SIEVES[i - 1]))
    raise AssertionError("percentile not bracketed")


def test_mgs_single_bin_returns_opening():
    result = mean_grain_size(sieve_sample([0, 0, 0, 42.0, 0, 0]))
    assert result == MeanGrainSize(9.5, False)


def test_mgs_hand_interpolated_fixture():
    masses = [0, 10, 40, 30, 15, 5]
    cum = [sum(masses[:i + 1]) for i in range(6)]
    passing = [100 - c for c in cum]
    expect = (_log_interp_oracle(passing, 16) + _log_interp_oracle(passing, 50)
              + _log_interp_oracle(passing, 84)) / 3
    result = mean_grain_size(sieve_sample(masses))
    assert not result.clamped
    assert result.value == pytest.approx(expect, rel=1e-12)
    assert result.value == pytest.approx(20.25, abs=5e-3)
    assert _log_interp_oracle(passing, 50) == pytest.approx(19.0, rel=1e-12)


@given(masses=st.lists(st.floats(0.5, 50), min_size=6, max_size=6),
       scale=st.floats(0.1, 100))
def test_mgs_scale_free(masses, scale):
    a = mean_grain_size(sieve_sample(masses))
    b = mean_grain_size(sieve_sample([m * scale for m in masses]))
    assert b.value == pytest.approx(a.value, rel=1e-9)
    assert b.clamped == a.clamped


@given(masses=st.lists(st.floats(0.5, 50), min_size=6, max_size=6),
       src=st.integers(1, 5), dst=st.integers(0, 4), shift=st.floats(0.01, 0.99))
@settings(max_examples=200)
def test_mgs_monotone_under_coarsening(masses, src, dst, shift):
    if dst >= src:
        return  # only move mass to a coarser bin
    before = mean_grain_size(sieve_sample(masses)).value
    moved = list(masses)
    amount = masses[src] * shift
    moved[src] -= amount
    moved[dst] += amount
    after = mean_grain_size(sieve_sample(moved)).value
    assert after >= before - 1e-9


def test_mgs_pan_heavy_sample_clamps_with_flag():
    # 90% of the mass is in the pan: all three percentiles clamp to 2.36
    result = mean_grain_size(sieve_sample([0, 0, 0, 0, 0, 10.0], pan=90.0))
    assert result.clamped
    assert result.value == pytest.approx(2.36)


# ---------------------------------------------------------------------------
# muck geometry classes
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("flags,want", [
    ((True, False, False), 1),
    ((True, True, False), 2),
    ((True, False, True), 3),
    ((True, True, True), 4),
])
def test_classify_muck_geometry(flags, want):
    assert classify_muck_geometry(*flags) == want


@pytest.mark.parametrize("flags", [
    (False, True, False), (False, False, True), (False, True, True),
    (False, False, False),
])
def test_classify_rejects_combos_without_debris(flags):
    with pytest.raises(UnsupportedMuckComboError):
        classify_muck_geometry(*flags)


def test_classify_inverse_identity():
    for mgt in MGT_CATEGORIES:
        assert classify_muck_geometry(*muck_geometry_flags(mgt)) == mgt


# ---------------------------------------------------------------------------
# domain type invariants
# ---------------------------------------------------------------------------


def test_rock_state_validation():
    good = dict(src=3, ucs=78.43, rqd=35.17, cai=3.28, q=75.14, ci=432.92, m=12.69, mgt=2)
    RockMassState(**good)
    for field, bad in [("src", 1), ("ucs", 0.0), ("rqd", 101.0), ("cai", 0.0),
                       ("q", -1.0), ("ci", 601.0), ("m", 0.0), ("mgt", 5)]:
        with pytest.raises(InvalidInputError) as err:
            RockMassState(**{**good, field: bad})
        assert err.value.field == field


def test_machine_setting_validation():
    MachineSetting(6183.67, 749.67)
    with pytest.raises(InvalidInputError):
        MachineSetting(0.0, 749.67)
    with pytest.raises(InvalidInputError):
        MachineSetting(6183.67, -1.0)


def test_record_requires_a_target():
    rock = RockMassState(src=3, ucs=78.43, rqd=35.17, cai=3.28, q=75.14,
                         ci=432.92, m=12.69, mgt=2)
    machine = MachineSetting(6183.67, 749.67)
    TunnelingRecord(rock=rock, machine=machine, pr=60.42)
    TunnelingRecord(rock=rock, machine=machine, ef=38.63)
    with pytest.raises(InvalidInputError):
        TunnelingRecord(rock=rock, machine=machine)
    with pytest.raises(InvalidInputError):
        TunnelingRecord(rock=rock, machine=machine, pr=-1.0)


def test_sieve_analysis_validation():
    with pytest.raises(InvalidInputError):  # not strictly decreasing
        SieveAnalysis("s", bins=((9.5, 1.0), (19.0, 1.0)))
    with pytest.raises(InvalidInputError):  # zero total
        SieveAnalysis("s", bins=((19.0, 0.0),), pan_mass=0.0)
