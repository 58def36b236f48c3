import numpy as np
import pytest

from handwave.mapping import (
    CursorState,
    MappingMode,
    MappingParams,
    apply_mapping,
    default_active_rect,
    map_absolute,
    map_relative_linear,
    map_relative_nonlinear,
    nonlinear_magnitude,
)

RECT = (64.0, 48.0, 512.0, 384.0)  # central 80% of a 640x480 frame


def params(**kw):
    return MappingParams(active_rect=RECT, **kw)


# ---------------------------------------------------------------- absolute

def test_absolute_top_left_corner():
    assert map_absolute((64.0, 48.0), params(), (800, 600)) == (0.0, 0.0)


def test_absolute_bottom_right_corner_clamps_to_last_pixel():
    q = map_absolute((64.0 + 512.0, 48.0 + 384.0), params(), (800, 600))
    assert q == (799.0, 599.0)


def test_absolute_center():
    q = map_absolute((64.0 + 256.0, 48.0 + 192.0), params(), (800, 600))
    assert q == (400.0, 300.0)


def test_absolute_quarter_ratios():
    # 25% across, 75% down, interface 1024x768 -> (256, 576)
    hand = (64.0 + 0.25 * 512.0, 48.0 + 0.75 * 384.0)
    assert map_absolute(hand, params(), (1024, 768)) == (256.0, 576.0)


def test_absolute_clamps_outside_active_rect():
    q = map_absolute((0.0, 0.0), params(), (800, 600))
    assert q == (0.0, 0.0)
    q = map_absolute((639.0, 479.0), params(), (800, 600))
    assert q == (799.0, 599.0)


def test_absolute_monotone_in_each_coordinate():
    p = params()
    xs = [map_absolute((64.0 + t, 100.0), p, (800, 600))[0] for t in range(0, 512, 7)]
    assert all(a <= b for a, b in zip(xs, xs[1:]))
    ys = [map_absolute((100.0, 48.0 + t), p, (800, 600))[1] for t in range(0, 384, 7)]
    assert all(a <= b for a, b in zip(ys, ys[1:]))


def test_absolute_degenerate_rect_is_error():
    with pytest.raises(ValueError):
        map_absolute((1.0, 1.0), MappingParams(active_rect=(0, 0, 0, 100)), (10, 10))


def test_default_active_rect_is_central_80_percent():
    assert default_active_rect(640, 480) == (64.0, 48.0, 512.0, 384.0)


# ---------------------------------------------------------------- relative

def test_linear_first_frame_no_motion():
    s = CursorState(x=100, y=100, mode=MappingMode.LINEAR_RELATIVE)
    map_relative_linear(s, (320, 240), params(), (800, 600))
    assert s.pos == (100, 100)
    assert s.prev_hand == (320.0, 240.0)


def test_linear_gain_scales_displacement():
    s = CursorState(x=100, y=100, mode=MappingMode.LINEAR_RELATIVE)
    p = params(gain=2.0)
    map_relative_linear(s, (300, 240), p, (800, 600))
    map_relative_linear(s, (310, 240), p, (800, 600))
    assert s.pos == (120, 100)


def test_linear_clamps_at_edge():
    s = CursorState(x=799, y=100, mode=MappingMode.LINEAR_RELATIVE)
    p = params(gain=2.0)
    map_relative_linear(s, (300, 240), p, (800, 600))
    map_relative_linear(s, (340, 240), p, (800, 600))
    assert s.x == 799.0


def test_nonlinear_zero_delta_no_motion():
    s = CursorState(x=50, y=50, mode=MappingMode.NONLINEAR_RELATIVE)
    p = params()
    map_relative_nonlinear(s, (200, 200), p, (800, 600))
    map_relative_nonlinear(s, (200, 200), p, (800, 600))
    assert s.pos == (50, 50)


def test_nonlinear_alpha_zero_equals_linear():
    p = params(nl_alpha=0.0)
    a = CursorState(x=50, y=50, mode=MappingMode.LINEAR_RELATIVE)
    b = CursorState(x=50, y=50, mode=MappingMode.NONLINEAR_RELATIVE)
    for hand in [(200, 200), (213, 190), (250, 260), (180, 240)]:
        map_relative_linear(a, hand, p, (800, 600))
        map_relative_nonlinear(b, hand, p, (800, 600))
        assert a.pos == b.pos


def test_nonlinear_boost_exceeds_linear_scaling():
    # with alpha > 0 and both speeds below nl_ref, doubling the hand speed
    # more than doubles the applied displacement
    p = params(nl_alpha=2.0, nl_ref=40.0)
    m1 = nonlinear_magnitude(10.0, p)
    m2 = nonlinear_magnitude(20.0, p)
    assert m2 / m1 > 20.0 / 10.0


def test_nonlinear_magnitude_zero_fixed_point_and_strictly_increasing():
    p = params()
    mags = [nonlinear_magnitude(float(d), p) for d in range(0, 201)]
    assert mags[0] == 0.0
    assert all(b > a for a, b in zip(mags, mags[1:]))


def test_direction_preserved():
    p = params()
    s = CursorState(x=400, y=300, mode=MappingMode.NONLINEAR_RELATIVE)
    map_relative_nonlinear(s, (100, 100), p, (800, 600))
    map_relative_nonlinear(s, (130, 140), p, (800, 600))
    moved = (s.x - 400, s.y - 300)
    # applied displacement is a positive multiple of (30, 40)
    assert moved[0] > 0 and moved[1] > 0
    assert moved[1] / moved[0] == pytest.approx(40 / 30)


def test_relative_never_leaves_interface():
    rng = np.random.default_rng(41)
    p = params(gain=3.0)
    s = CursorState(x=400, y=300, mode=MappingMode.NONLINEAR_RELATIVE)
    hand = np.array([320.0, 240.0])
    for _ in range(2000):
        hand = np.clip(hand + rng.normal(0, 60, 2), 0, [639, 479])
        map_relative_nonlinear(s, tuple(hand), p, (800, 600))
        assert 0.0 <= s.x <= 799.0
        assert 0.0 <= s.y <= 599.0


def test_smoothing_damps_first_step():
    sharp = CursorState(x=100, y=100, mode=MappingMode.LINEAR_RELATIVE)
    damped = CursorState(x=100, y=100, mode=MappingMode.LINEAR_RELATIVE)
    p0 = params(gain=1.0)
    ps = params(gain=1.0, smooth=0.5)
    for s, p in ((sharp, p0), (damped, ps)):
        map_relative_linear(s, (200, 200), p, (800, 600))
        map_relative_linear(s, (240, 200), p, (800, 600))
    assert damped.x == pytest.approx(100 + 0.5 * (sharp.x - 100))


def test_apply_mapping_dispatch():
    p = params()
    s = CursorState(mode=MappingMode.ABSOLUTE)
    apply_mapping(s, (64.0 + 256.0, 48.0 + 192.0), p, (800, 600))
    assert s.pos == (400.0, 300.0)
    s2 = CursorState(x=10, y=10, mode=MappingMode.LINEAR_RELATIVE)
    apply_mapping(s2, (100, 100), p, (800, 600))
    assert s2.pos == (10, 10)


def test_mapping_params_validation():
    with pytest.raises(ValueError):
        MappingParams(active_rect=RECT, nl_ref=0.0)
    with pytest.raises(ValueError):
        MappingParams(active_rect=RECT, gain=0.0)
    with pytest.raises(ValueError):
        MappingParams(active_rect=RECT, smooth=1.0)
