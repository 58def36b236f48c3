from collections import deque

import numpy as np
import pytest

from handwave.regions import (
    Region,
    SelectionPolicy,
    TrackParams,
    TrackState,
    compute_features,
    label_components,
    select_master,
    track,
)


from tests.oracles import label_oracle


def pixel_sets(regions):
    return [frozenset(map(tuple, r.pixels)) for r in regions]


# ---------------------------------------------------------------- labeling

def test_label_empty_mask():
    assert label_components(np.zeros((5, 5), dtype=bool)) == []


def test_label_diagonal_pixels_connectivity():
    m = np.zeros((4, 4), dtype=bool)
    m[1, 1] = m[2, 2] = True
    assert len(label_components(m, connectivity=8)) == 1
    assert len(label_components(m, connectivity=4)) == 2


def test_label_rejects_bad_connectivity():
    with pytest.raises(ValueError):
        label_components(np.zeros((3, 3), dtype=bool), connectivity=6)


@pytest.mark.parametrize("connectivity", [4, 8])
@pytest.mark.parametrize("seed", range(5))
def test_label_matches_floodfill_oracle(seed, connectivity):
    rng = np.random.default_rng(200 + seed)
    mask = rng.random((32, 32)) < 0.45
    got = label_components(mask, connectivity)
    want = label_oracle(mask, connectivity)
    # same partition AND same first-encounter ordering
    assert pixel_sets(got) == want
    assert [r.label for r in got] == list(range(1, len(want) + 1))


@pytest.mark.parametrize("connectivity", [4, 8])
def test_label_single_pixel_masks_exhaustive(connectivity):
    # every mask with exactly one true pixel, all shapes up to 8x8
    for h in range(1, 9):
        for w in range(1, 9):
            for y in range(h):
                for x in range(w):
                    mask = np.zeros((h, w), dtype=bool)
                    mask[y, x] = True
                    regions = label_components(mask, connectivity)
                    assert len(regions) == 1
                    assert regions[0].area == 1
                    assert regions[0].centroid == (float(x), float(y))
                    assert pixel_sets(regions) == label_oracle(mask, connectivity)


@pytest.mark.parametrize("connectivity", [4, 8])
def test_label_partition_invariants(connectivity):
    rng = np.random.default_rng(210)
    mask = rng.random((24, 40)) < 0.5
    regions = label_components(mask, connectivity)
    total = sum(r.area for r in regions)
    assert total == int(mask.sum())
    seen = set()
    for r in regions:
        pix = set(map(tuple, r.pixels))
        assert len(pix) == r.area
        assert not (pix & seen)
        seen |= pix
    assert len(seen) == int(mask.sum())


# ---------------------------------------------------------------- features

def test_features_single_pixel():
    r = compute_features([(3, 4)])
    assert r.area == 1
    assert r.centroid == (3.0, 4.0)
    assert r.bbox == (3, 4, 3, 4)


def test_features_square_block():
    r = compute_features([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert r.area == 4
    assert r.centroid == (0.5, 0.5)
    assert r.bbox == (0, 0, 1, 1)


def test_features_match_loop_oracle():
    rng = np.random.default_rng(220)
    pts = [tuple(p) for p in rng.integers(0, 50, (40, 2))]
    pts = list(dict.fromkeys(pts))
    r = compute_features(pts)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    assert r.area == len(pts)
    assert r.centroid[0] == pytest.approx(sum(xs) / len(pts))
    assert r.centroid[1] == pytest.approx(sum(ys) / len(pts))
    assert r.bbox == (min(xs), min(ys), max(xs), max(ys))


def test_features_empty_is_error():
    with pytest.raises(ValueError):
        compute_features([])


def test_label_features_agree_with_compute_features():
    rng = np.random.default_rng(221)
    mask = rng.random((16, 16)) < 0.4
    for r in label_components(mask):
        again = compute_features(r.pixels)
        assert again.area == r.area
        assert again.centroid == r.centroid
        assert again.bbox == r.bbox


# ---------------------------------------------------------------- selection

def region_at(cx, cy, area, label=0):
    return Region(label=label, area=area, centroid=(cx, cy),
                  bbox=(int(cx), int(cy), int(cx), int(cy)))


def test_select_master_empty():
    assert select_master([], (100, 100)) is None


def test_select_master_threshold_and_max_area():
    # frame 100x90 with fraction 0.005 -> min area 45
    regions = [region_at(10, 10, 50), region_at(20, 20, 500), region_at(30, 30, 40)]
    best = select_master(regions, (100, 90), SelectionPolicy(a_min_fraction=0.005))
    assert best.area == 500


def test_select_master_tie_breaks_toward_top():
    a = region_at(10, 5, 300, label=1)
    b = region_at(10, 9, 300, label=2)
    assert select_master([b, a], (100, 100)).label == 1
    assert select_master([a, b], (100, 100)).label == 1


def test_select_master_all_below_threshold():
    regions = [region_at(5, 5, 3)]
    assert select_master(regions, (100, 100)) is None


# ---------------------------------------------------------------- tracking

def test_track_cold_start_selects_master():
    state = TrackState()
    r = region_at(50, 50, 900)
    track(state, [r], (100, 100), TrackParams(), frame_index=0)
    assert state.current is r
    assert state.frames_lost == 0
    assert list(state.area_history) == [900]
    assert state.last_seen_frame == 0


def test_track_prefers_nearest_compatible():
    state = TrackState()
    prev = region_at(100, 100, 2000)
    track(state, [prev], (640, 480), frame_index=0)
    near = region_at(104, 101, 2100)
    far = region_at(160, 100, 2000)
    track(state, [far, near], (640, 480), frame_index=1)
    assert state.current is near


def test_track_order_independent():
    for order in ([0, 1, 2], [2, 1, 0], [1, 2, 0]):
        state = TrackState()
        track(state, [region_at(100, 100, 2000)], (640, 480), frame_index=0)
        cands = [region_at(104, 101, 2100, 1), region_at(98, 103, 2050, 2),
                 region_at(160, 100, 2000, 3)]
        track(state, [cands[i] for i in order], (640, 480), frame_index=1)
        assert state.current.label == 2  # distance ~3.6 beats ~4.1 and 60


def test_track_area_gate_rejects_then_falls_back():
    params = TrackParams()
    state = TrackState()
    track(state, [region_at(100, 100, 2000)], (640, 480), params, frame_index=0)
    # 50x area blows the ratio gate; region is still adopted via select_master
    huge = region_at(102, 102, 100_000)
    track(state, [huge], (640, 480), params, frame_index=1)
    assert state.current is huge


def test_track_holds_then_loses():
    params = TrackParams(max_lost=3)
    state = TrackState()
    held = region_at(100, 100, 2000)
    track(state, [held], (640, 480), params, frame_index=0)
    for i in range(1, 4):
        track(state, [], (640, 480), params, frame_index=i)
        assert state.current is held
        assert state.frames_lost == i
    track(state, [], (640, 480), params, frame_index=4)
    assert state.current is None


def test_track_history_appends_only_on_match():
    params = TrackParams()
    state = TrackState(area_history=deque(maxlen=params.history_len))
    track(state, [region_at(100, 100, 2000)], (640, 480), params, frame_index=0)
    track(state, [], (640, 480), params, frame_index=1)
    track(state, [region_at(101, 100, 2010)], (640, 480), params, frame_index=2)
    assert list(state.area_history) == [2000, 2010]
    assert state.last_seen_frame == 2
