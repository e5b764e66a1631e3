import numpy as np
import pytest

import poinlab as pl
from poinlab.errors import (CatalogError, DegenerateDomainError,
                            ResolutionError, ValidationError)


def test_catalog_names_complete():
    names = pl.catalog_names()
    for expected in ("unit_square", "rectangle", "disk", "power_cusp",
                     "dumbbell", "rooms_passages", "two_squares_disjoint"):
        assert expected in names


@pytest.mark.parametrize("name,params,expected", [
    ("unit_square", {}, 1.0),
    ("rectangle", {}, 2.0),
    ("disk", {}, np.pi),
    ("power_cusp", {"k": 2}, 2.0 / 3.0),   # integral of 2 x^2 over (0, 1)
    ("power_cusp", {"k": 3}, 0.5),          # integral of 2 x^3 over (0, 1)
    ("dumbbell", {"delta": 0.2}, 2.1),      # two unit squares plus 0.5 x 0.2 neck
])
def test_analytic_areas(name, params, expected):
    dom = pl.instantiate(name, **params)
    assert dom.area == pytest.approx(expected, abs=1e-12)
    assert dom.area_stderr == 0.0


def test_area_within_bbox():
    for name in pl.catalog_names():
        dom = pl.instantiate(name)
        (x0, x1), (y0, y1) = dom.bbox
        assert 0.0 < dom.area <= (x1 - x0) * (y1 - y0)


def test_contains_examples():
    sq = pl.instantiate("unit_square")
    assert pl.contains(sq, (0.5, 0.5))
    cusp = pl.instantiate("power_cusp", k=2)
    assert pl.contains(cusp, (0.5, 0.2))            # 0.2 < 0.25
    assert not pl.contains(cusp, (0.5, 0.3))        # 0.3 > 0.25
    assert not pl.contains(cusp, (0.5, 0.25))       # boundary is excluded
    assert not pl.contains(sq, (0.0, 0.5))


def test_sample_interior_postconditions():
    dom = pl.instantiate("unit_square")
    s = pl.sample_interior(dom, 1000, seed=7)
    assert s.count == 1000 and len(s.points) == 1000
    assert np.all(pl.contains(dom, s.points))
    again = pl.sample_interior(dom, 1000, seed=7)
    np.testing.assert_array_equal(s.points, again.points)
    (x0, x1), (y0, y1) = dom.bbox
    assert np.all((s.points[:, 0] > x0) & (s.points[:, 0] < x1))
    assert np.all((s.points[:, 1] > y0) & (s.points[:, 1] < y1))


def test_samples_inside_for_all_catalog_domains():
    for name in pl.catalog_names():
        dom = pl.instantiate(name)
        s = pl.sample_interior(dom, 500, seed=3)
        assert np.all(pl.contains(dom, s.points)), name


def test_monte_carlo_area_three_sigma():
    # closed-form oracle: area of |y| < x^2 is 2/3
    dom = pl.instantiate("power_cusp", k=2)
    est, se = pl.monte_carlo_area(dom, 100_000, seed=11)
    assert abs(est - 2.0 / 3.0) <= 3 * se
    dom = pl.instantiate("dumbbell", delta=0.2)
    est, se = pl.monte_carlo_area(dom, 100_000, seed=11)
    assert abs(est - 2.1) <= 3 * se


def test_rooms_area_matches_polygon_sum():
    # rooms 1 + 1/4 + 1/16 plus passages 0.25*delta/2 + 0.125*delta/4
    delta = 0.2
    dom = pl.instantiate("rooms_passages", delta=delta)
    closed_form = 1.3125 + 0.15625 * delta
    assert dom.area_stderr > 0
    assert abs(dom.area - closed_form) <= 3.5 * dom.area_stderr


def test_connectivity():
    assert pl.connectivity_check(pl.instantiate("unit_square"), 1 / 16)
    assert not pl.connectivity_check(pl.instantiate("two_squares_disjoint"), 1 / 32)
    assert pl.connectivity_check(pl.instantiate("dumbbell", delta=0.2), 1 / 32)
    assert pl.connectivity_check(pl.instantiate("rooms_passages", delta=0.2), 1 / 128)


def test_connectivity_resolution_error():
    cusp = pl.instantiate("power_cusp", k=2)
    with pytest.raises(ResolutionError):
        pl.connectivity_check(cusp, 0.9)


def test_unknown_name_and_bad_params():
    with pytest.raises(CatalogError):
        pl.instantiate("nosuch")
    with pytest.raises(ValidationError):
        pl.instantiate("power_cusp", k=1.2)
    with pytest.raises(ValidationError):
        pl.instantiate("dumbbell", delta=0.7)
    with pytest.raises(ValidationError):
        pl.instantiate("dumbbell", delta=0.0)
    with pytest.raises(ValidationError):
        pl.instantiate("unit_square", bogus=1.0)
    with pytest.raises(ValidationError):
        pl.sample_interior(pl.instantiate("unit_square"), 0)


def test_boundary_distance_values():
    sq = pl.instantiate("unit_square")
    assert pl.boundary_distance(sq, (0.5, 0.5)) == pytest.approx(0.5)
    assert pl.boundary_distance(sq, (0.1, 0.5)) == pytest.approx(0.1)
    disk = pl.instantiate("disk")
    assert pl.boundary_distance(disk, (0.0, 0.0)) == pytest.approx(1.0)
    db = pl.instantiate("dumbbell", delta=0.2)
    assert pl.boundary_distance(db, (0.5, 0.5)) == pytest.approx(0.5)
    # inside the neck the nearest wall is the neck wall
    assert pl.boundary_distance(db, (1.25, 0.5)) == pytest.approx(0.1)
    cusp = pl.instantiate("power_cusp", k=2)
    d = pl.boundary_distance(cusp, (0.5, 0.0))
    assert 0.15 < d < 0.25


def test_degenerate_acceptance_rate():
    tiny = pl.DomainSpec(
        name="tiny", params={}, bbox=((-1.0, 1.0), (-1.0, 1.0)),
        area=np.pi * 0.004 ** 2, area_stderr=0.0,
        predicate=lambda x, y: x * x + y * y < 0.004 ** 2,
        boundary_dist=lambda x, y: np.abs(0.004 - np.hypot(x, y)))
    with pytest.raises(DegenerateDomainError):
        pl.sample_interior(tiny, 5000, seed=0)
