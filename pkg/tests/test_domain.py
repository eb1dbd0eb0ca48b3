import numpy as np
import pytest

import seglv as sg
from seglv import BallSpec, CorridorSpec, DomainError, build_domain, region_membership

BBOX = (-1.5, -1.5, 8.5, 1.5)
H = 1 / 8

THREE_BALLS = [BallSpec((0.0, 0.0), 1.0, 0), BallSpec((3.0, 0.0), 1.0, 1),
               BallSpec((6.0, 0.0), 1.0, 2)]


def test_three_disjoint_balls_three_components():
    dom = build_domain(THREE_BALLS, [], BBOX, H)
    assert dom.connected_components() == 3


def test_chained_corridors_one_component():
    corridors = [CorridorSpec(0, 1, 0.5), CorridorSpec(1, 2, 0.5)]
    dom = build_domain(THREE_BALLS, corridors, BBOX, H)
    assert dom.connected_components() == 1


def test_overlapping_balls_rejected():
    balls = [BallSpec((0.0, 0.0), 1.0, 0), BallSpec((1.5, 0.0), 1.0, 1)]
    with pytest.raises(DomainError, match="not disjoint"):
        build_domain(balls, [], BBOX, H)


def test_tangent_balls_rejected():
    balls = [BallSpec((0.0, 0.0), 1.0, 0), BallSpec((2.0, 0.0), 1.0, 1)]
    with pytest.raises(DomainError, match="not disjoint"):
        build_domain(balls, [], BBOX, H)


def test_unresolved_corridor_rejected():
    corridors = [CorridorSpec(0, 1, 2.5 * H)]
    with pytest.raises(DomainError, match="corridor unresolved"):
        build_domain(THREE_BALLS[:2], corridors, BBOX, H)


def test_corridor_width_must_stay_below_radii():
    corridors = [CorridorSpec(0, 1, 1.0)]
    with pytest.raises(DomainError):
        build_domain(THREE_BALLS[:2], corridors, BBOX, H)


def test_corridor_endpoint_validation():
    with pytest.raises(DomainError):
        CorridorSpec(0, 0, 0.5)
    with pytest.raises(DomainError, match="missing ball"):
        build_domain(THREE_BALLS[:2], [CorridorSpec(0, 5, 0.5)], BBOX, H)


def test_ball_outside_bbox_rejected():
    with pytest.raises(DomainError, match="strictly inside"):
        build_domain([BallSpec((0.0, 0.0), 2.0, 0)], [], (-2.0, -2.0, 2.0, 2.0), H)


def test_region_membership_partition():
    corridors = [CorridorSpec(0, 1, 0.5)]
    dom = build_domain(THREE_BALLS[:2], corridors, (-1.5, -1.5, 4.5, 1.5), H)
    kinds = np.zeros((dom.ny, dom.nx), dtype=object)
    for iy in range(dom.ny):
        for ix in range(dom.nx):
            kinds[iy, ix] = region_membership(dom, ix, iy)[0]
    interior = kinds != "exterior"
    assert np.array_equal(interior, dom.interior_mask)
    # interior nodes split exactly into ball and corridor
    assert np.all((kinds[dom.interior_mask] == "ball")
                  | (kinds[dom.interior_mask] == "corridor"))


def test_region_membership_examples():
    corridors = [CorridorSpec(0, 1, 0.5)]
    dom = build_domain(THREE_BALLS[:2], corridors, (-1.5, -1.5, 4.5, 1.5), H)
    ix0 = int(round((0.0 - dom.origin[0]) / dom.h))
    iy0 = int(round((0.0 - dom.origin[1]) / dom.h))
    assert region_membership(dom, ix0, iy0) == ("ball", 0)
    # corridor midline midpoint between the balls
    ixm = int(round((1.5 - dom.origin[0]) / dom.h))
    assert region_membership(dom, ixm, iy0) == ("corridor", None)
    assert region_membership(dom, 0, 0) == ("exterior", None)
    with pytest.raises(IndexError):
        region_membership(dom, dom.nx, 0)


def test_corridor_width_monotonicity():
    masks = []
    for width in (0.4, 0.5, 0.8):
        dom = build_domain(THREE_BALLS[:2], [CorridorSpec(0, 1, width)],
                           (-1.5, -1.5, 4.5, 1.5), H)
        masks.append(dom.interior_mask)
    assert np.all(masks[0] <= masks[1])
    assert np.all(masks[1] <= masks[2])


def test_refinement_monotonicity():
    corridors = [CorridorSpec(0, 1, 0.5)]
    coarse = build_domain(THREE_BALLS[:2], corridors, (-1.5, -1.5, 4.5, 1.5), 1 / 8)
    fine = build_domain(THREE_BALLS[:2], corridors, (-1.5, -1.5, 4.5, 1.5), 1 / 16)
    # every coarse interior node is a fine interior node (even indices)
    assert np.all(fine.interior_mask[::2, ::2][coarse.interior_mask])


def test_ball_label_covers_balls_and_wins_overlap():
    corridors = [CorridorSpec(0, 1, 0.5)]
    dom = build_domain(THREE_BALLS[:2], corridors, (-1.5, -1.5, 4.5, 1.5), H)
    X, Y = dom.coords()
    inside0 = (X ** 2 + Y ** 2) < 1.0
    assert np.array_equal(dom.ball_label == 0, inside0)
    assert not np.any(dom.corridor_flag & (dom.ball_label >= 0))


def test_species_ball_mask_respects_permutation():
    balls = [BallSpec((0.0, 0.0), 1.0, 1), BallSpec((3.0, 0.0), 1.0, 0)]
    dom = build_domain(balls, [], (-1.5, -1.5, 4.5, 1.5), H)
    m0 = dom.species_ball_mask(0)
    assert np.array_equal(m0, dom.ball_mask(1))


def test_mask_may_not_touch_border():
    mask = np.ones((4, 4), dtype=bool)
    with pytest.raises(DomainError, match="border"):
        sg.GridDomain.from_mask(mask, 0.5)


def test_domain_arrays_immutable(dumbbell2):
    with pytest.raises(ValueError):
        dumbbell2.interior_mask[0, 0] = True
