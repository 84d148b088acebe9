import numpy as np
import pytest

from brnn.synth import (GroundTruth, Scene, SceneSpec, TargetSpec, cluttered_scene, deg_to_px,
                        disc_coverage, generate, render_frame, single_target_scene,
                        speed_px_per_frame, step_targets, value_noise, with_targets)


def test_deg_to_px_examples():
    assert deg_to_px(32, 128) == 4
    assert deg_to_px(80, 320) == 4
    assert speed_px_per_frame(150, 4, 300) == 2
    with pytest.raises(ValueError):
        deg_to_px(0, 128)


def test_one_degree_dot_pixel_count():
    spec = single_target_scene(diameter=1.0, speed=0.0, n_frames=1)
    frame = Scene(spec).render(0)
    dark = np.sum(255.0 - frame) / 255.0
    # Coverage-weighted area of a disc of diameter 4 px.
    assert dark == pytest.approx(np.pi * 2.0**2, rel=0.05)
    assert np.count_nonzero(frame < 255) <= np.pi * 3.0**2


def test_disc_coverage_bounds():
    cov = disc_coverage(20, 20, 9.3, 10.6, 3.0, 4)
    assert cov.min() >= 0 and cov.max() <= 1
    assert cov.sum() == pytest.approx(np.pi * 9, rel=0.05)


def test_static_scene_frames_identical():
    spec = single_target_scene(speed=0.0, n_frames=3)
    frames, _ = generate(spec)
    np.testing.assert_array_equal(frames[0], frames[1])
    np.testing.assert_array_equal(frames[1], frames[2])


def test_determinism():
    spec = cluttered_scene(n_frames=20, seed=5)
    f1, t1 = generate(spec)
    f2, t2 = generate(spec)
    np.testing.assert_array_equal(f1, f2)
    np.testing.assert_array_equal(t1.x, t2.x)


def test_different_seeds_differ():
    f1, _ = generate(cluttered_scene(n_frames=2, seed=1))
    f2, _ = generate(cluttered_scene(n_frames=2, seed=2))
    assert not np.array_equal(f1, f2)


def test_bounce_off_wall():
    pos, vel = step_targets([[126.0, 50.0]], [[2.0, 0.0]], [1.0], 128, 128)
    assert vel[0, 0] == -2.0 and pos[0, 0] == 124.0


def test_far_targets_unchanged():
    pos, vel = step_targets([[20.0, 20.0], [80.0, 80.0]], [[1.0, 0.5], [-1.0, 0.0]],
                            [2.0, 2.0], 128, 128)
    np.testing.assert_array_equal(vel, [[1.0, 0.5], [-1.0, 0.0]])


def test_collision_negates_both():
    pos, vel = step_targets([[50.0, 50.0], [55.0, 50.0]], [[2.0, 0.0], [-2.0, 0.0]],
                            [2.0, 2.0], 128, 128)
    np.testing.assert_array_equal(vel, [[-2.0, 0.0], [2.0, 0.0]])


def test_five_targets_stay_inside_and_keep_speed():
    spec = cluttered_scene(n_frames=180, seed=0)
    truth = Scene(spec).truth
    r = truth.diameter / 2
    assert np.all(truth.x - r >= 0) and np.all(truth.x + r <= spec.width - 1)
    assert np.all(truth.y - r >= 0) and np.all(truth.y + r <= spec.height - 1)
    assert truth.x.shape == (180, 5)


def test_velocity_magnitude_invariant_under_bounce():
    spec = single_target_scene(speed=600, angle=0.3, n_frames=120)
    truth = Scene(spec).truth
    steps = np.hypot(np.diff(truth.x[:, 0]), np.diff(truth.y[:, 0]))
    # Clipping at a wall can shorten a single step; all others keep the speed.
    assert np.mean(np.isclose(steps, 8.0)) > 0.95


def test_circular_direction_is_tangent():
    spec = single_target_scene(path="circular", radius=8, n_frames=40)
    truth = Scene(spec).truth
    dx = np.diff(truth.x[:, 0])
    dy = np.diff(truth.y[:, 0])
    heading = np.arctan2(dy, dx)
    # Chord direction lies half a step ahead of the tangent at the start.
    err = np.angle(np.exp(1j * (heading - truth.direction[:-1, 0])))
    assert np.all(np.abs(err) < 0.05)


def test_truth_rows_and_table():
    spec = cluttered_scene(n_targets=3, n_frames=4)
    truth = Scene(spec).truth
    rows = list(truth.rows())
    assert len(rows) == 12 and rows[0][:2] == (0, 0)
    table = truth.as_table()
    assert table[2][0].shape == (3, 2)
    np.testing.assert_array_equal(table[2][1], truth.diameter[2])


def test_render_frame_and_bounds():
    spec = single_target_scene(n_frames=2)
    frame, rows = render_frame(spec, 1)
    assert frame.shape == (128, 128) and len(rows) == 1
    with pytest.raises(IndexError):
        Scene(spec).render(2)


def test_background_scrolls_right():
    spec = SceneSpec(n_frames=3, background="clutter", background_luminance=0.4,
                     background_speed=75.0)
    scene = Scene(spec)
    b0, b1 = scene.background(0), scene.background(1)
    # 75 deg/s at 4 px/deg and 300 Hz is one pixel per frame
    np.testing.assert_allclose(b1[:, 1:], b0[:, :-1], atol=1e-9)


def test_value_noise_normalised():
    n = value_noise(64, 64, seed=3)
    assert abs(n.mean()) < 1e-12 and n.std() == pytest.approx(1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        SceneSpec(fov=0)
    with pytest.raises(ValueError):
        SceneSpec(targets=[TargetSpec(diameter=40.0)])
    with pytest.raises(ValueError):
        TargetSpec(luminance=1.5)
    with pytest.raises(ValueError):
        TargetSpec(path="spiral")


def test_with_targets():
    spec = with_targets(cluttered_scene(), diameter=3.0)
    assert all(t.diameter == 3.0 for t in spec.targets)


def test_ground_truth_frames():
    g = GroundTruth(np.zeros((3, 1)), np.zeros((3, 1)), np.ones((3, 1)), np.zeros((3, 1)))
    assert g.n_frames == 3
