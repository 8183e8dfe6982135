import json
import math

import pytest

from omegak.bounds import (
    GridPoint,
    catalog,
    catalog_by_id,
    catalog_json,
    region_membership,
    rhs_omega_general,
    rhs_g_small,
)
from omegak.expcore import FamilyIndex, gn_deriv_delta

ALL_IDS = [
    "estomegatildenm1",
    "estomegatildenm1sa_C2",
    "estomegatildenm1sa_C4",
    "estomegatildenm1la",
    "exponentialdecayomegatilde",
    "estgntilde",
    "estgntildesa",
    "estgntildela",
    "estgnasymptotic",
    "expdecay",
    "defDm",
    "defDmsa",
    "repgknm2",
    "tmgplus",
]


def test_catalog_complete():
    assert [s.id for s in catalog()] == ALL_IDS
    with pytest.raises(KeyError):
        catalog_by_id("nope")


def test_catalog_json_roundtrip():
    entries = json.loads(catalog_json())
    assert {e["id"] for e in entries} == set(ALL_IDS)
    assert all("region" in e and "formula" in e for e in entries)


def test_general_omega_rhs_worked_value():
    # (n=0, m=0, x=1, gamma=1): 1/sqrt(3) + 1 + ln 2 = 2.27049...
    rhs = rhs_omega_general(0, 0, 1.0, 1.0)
    assert rhs == pytest.approx(1.0 / math.sqrt(3.0) + 1.0 + math.log(2.0), rel=1e-14)
    assert rhs == pytest.approx(2.2705, abs=1e-4)


def test_small_argument_rhs_worked_value():
    # (n=9, m=1, t=3): 2^2 3!/sqrt(10) (9/6) = 11.3842
    assert rhs_g_small(9, 1, 3.0) == pytest.approx(11.3842, abs=1e-4)
    lhs = abs(gn_deriv_delta(FamilyIndex(9, 1), 3.0).value) * 3.0
    assert lhs == pytest.approx(0.01620, abs=1e-5)
    assert lhs < rhs_g_small(9, 1, 3.0)


def test_small_argument_region_conditions():
    sa = catalog_by_id("estomegatildenm1sa_C2")
    # m <= sqrt(n)(C-1)/C with C=2: m <= sqrt(n)/2
    assert region_membership(sa, GridPoint(100, 5, 1.0))
    assert not region_membership(sa, GridPoint(100, 6, 1.0))
    # x <= min(n/(2C), (n+1)/(4 gamma))
    assert not region_membership(sa, GridPoint(100, 5, 26.0))
    # the gamma override shrinks the admissible interval
    assert region_membership(sa, GridPoint(100, 5, 25.0), gamma=1.0)
    assert not region_membership(sa, GridPoint(100, 5, 25.0), gamma=2.0)


def test_large_argument_region_conditions():
    la = catalog_by_id("estomegatildenm1la")
    # m >= 1 + 2 ln(n+1)
    assert region_membership(la, GridPoint(1, 3, 0.5))
    assert not region_membership(la, GridPoint(1, 2, 0.5))
    # n >= 2 needs x > n + m(sqrt(n)+2)
    thr = 9 + 6 * (3.0 + 2.0)
    assert region_membership(la, GridPoint(9, 6, thr + 0.1))
    assert not region_membership(la, GridPoint(9, 6, thr - 0.1))


def test_band_regions():
    assert region_membership(catalog_by_id("defDm"), GridPoint(9, 4, 5.9))
    assert not region_membership(catalog_by_id("defDm"), GridPoint(9, 4, 6.1))  # > n - sqrt(n)
    assert not region_membership(catalog_by_id("defDm"), GridPoint(1, 0, 0.1))  # n >= 2
    assert region_membership(catalog_by_id("tmgplus"), GridPoint(9, 4, 12.1))
    assert not region_membership(catalog_by_id("tmgplus"), GridPoint(9, 4, 11.9))


def test_rhs_at_raises_outside_region():
    from omegak.bounds import RegionViolation

    spec = catalog_by_id("defDm")
    with pytest.raises(RegionViolation):
        spec.rhs_at(GridPoint(1, 0, 0.1))


def test_expdecay_variants_algebraically_identical():
    # sqrt(n)(1 - t/(n+sqrt(n))) == sqrt(n) - t/(1+sqrt(n))
    from omegak.bounds import rhs_g_expdecay

    for n in (2, 7, 50):
        for t in (n + math.sqrt(n), 2.0 * n, 5.0 * n):
            a = rhs_g_expdecay(n, t, "estgnasymptotic")
            b = rhs_g_expdecay(n, t, "expdecay")
            assert a == pytest.approx(b, rel=1e-13)


def test_gamma_monotone_rhs():
    # fitting relies on the RHS being nondecreasing in gamma
    for spec_id in ("estomegatildenm1", "estomegatildenm1la"):
        spec = catalog_by_id(spec_id)
        p = GridPoint(5, 6, 40.0)
        if not region_membership(spec, p):
            p = GridPoint(5, 6, 100.0)
        lo = spec.rhs(p, {**spec.constants, "gamma": 1.0})
        hi = spec.rhs(p, {**spec.constants, "gamma": 2.0})
        assert lo <= hi
