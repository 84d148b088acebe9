import numpy as np
import pytest
from PIL import Image

from brnn import io
from brnn.detector import Detection
from brnn.metrics import RocPoint, tpr_at_fpr, tpr_fpr, weber_contrast
from brnn.synth import Scene, cluttered_scene


def _disc_frame(target, background, d=6.0, size=40):
    yy, xx = np.mgrid[:size, :size]
    f = np.full((size, size), float(background))
    f[(xx - 20) ** 2 + (yy - 20) ** 2 <= (d / 2) ** 2] = target
    return f


@pytest.mark.parametrize("target, background, want", [(255, 0, 1.0), (100, 100, 0.0),
                                                      (255, 51, 0.8)])
def test_weber_contrast_examples(target, background, want):
    assert weber_contrast(_disc_frame(target, background), 20, 20, 6.0) == pytest.approx(want)


def test_weber_contrast_rejects_outside():
    with pytest.raises(ValueError):
        weber_contrast(np.zeros((20, 20)), 2, 10, 4.0)


def test_tpr_fpr_examples():
    assert tpr_fpr(5, 10, 0, 1).tpr == 0.5
    assert tpr_fpr(0, 10, 900, 180).fpr == 5
    with pytest.raises(ValueError):
        tpr_fpr(0, 0, 1, 10)


def test_tpr_at_fpr_interpolates():
    pts = [RocPoint(0.5, 0.4, 2.0), RocPoint(0.1, 0.8, 6.0)]
    assert tpr_at_fpr(pts, 4.0) == pytest.approx(0.6)
    assert tpr_at_fpr(pts, 1.0) == pytest.approx(0.2)
    assert tpr_at_fpr(pts, 10.0) == pytest.approx(0.8)


def test_tpr_at_fpr_upper_envelope():
    pts = [RocPoint(0.5, 0.6, 2.0), RocPoint(0.4, 0.5, 3.0), RocPoint(0.3, 0.7, 2.0)]
    assert tpr_at_fpr(pts, 3.0) == pytest.approx(0.7)


# -- frame files --------------------------------------------------------------


def test_frame_roundtrip_png_and_pgm(tmp_path, rng):
    f = rng.integers(0, 256, (12, 9)).astype(float)
    io.write_frame(tmp_path / "a.png", f)
    Image.fromarray(f.astype(np.uint8)).save(tmp_path / "b.pgm")
    np.testing.assert_array_equal(io.read_frame(tmp_path / "a.png"), f)
    np.testing.assert_array_equal(io.read_frame(tmp_path / "b.pgm"), f)


def test_colour_frames_use_channel_mean(tmp_path):
    rgb = np.zeros((4, 4, 3), np.uint8)
    rgb[..., 0] = 30
    rgb[..., 1] = 60
    rgb[..., 2] = 90
    Image.fromarray(rgb).save(tmp_path / "c.png")
    np.testing.assert_allclose(io.read_frame(tmp_path / "c.png"), 60.0)


def test_resize_halves_by_area_average(tmp_path):
    f = np.zeros((480, 640))
    f[::2, ::2] = 200
    io.write_frame(tmp_path / "big.png", f)
    small = io.read_frame(tmp_path / "big.png", resize=(320, 240))
    assert small.shape == (240, 320)
    np.testing.assert_allclose(small, 50.0, atol=0.5)


def test_directory_order_and_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        io.frame_paths(tmp_path / "missing")
    with pytest.raises(ValueError, match="no frames"):
        io.frame_paths(tmp_path)
    for name, value in [("b.png", 2), ("a.png", 1), ("c.pgm", 3)]:
        io.write_frame(tmp_path / name, np.full((3, 3), value))
    (tmp_path / "notes.txt").write_text("x")
    frames = io.read_frames(tmp_path)
    assert frames.shape == (3, 3, 3)
    assert list(frames[:, 0, 0]) == [1, 2, 3]


def test_mixed_shapes_rejected(tmp_path):
    io.write_frame(tmp_path / "a.png", np.zeros((3, 3)))
    io.write_frame(tmp_path / "b.png", np.zeros((4, 3)))
    with pytest.raises(ValueError, match="shape"):
        io.read_frames(tmp_path)


def test_unreadable_frame_names_path(tmp_path):
    bad = tmp_path / "broken.png"
    bad.write_bytes(b"not an image")
    with pytest.raises(io.FrameReadError, match="broken.png"):
        io.read_frame(bad)


def test_parse_size():
    assert io.parse_size("320x240") == (320, 240)
    for text in ("320", "0x4", "axb"):
        with pytest.raises(ValueError):
            io.parse_size(text)


def test_write_activation_scales(tmp_path):
    io.write_activation(tmp_path / "a.png", np.array([[0.0, 1.0], [2.0, 4.0]]))
    got = io.read_frame(tmp_path / "a.png")
    assert got.min() == 0 and got.max() == 255
    io.write_activation(tmp_path / "flat.png", np.ones((2, 2)))
    assert io.read_frame(tmp_path / "flat.png").max() == 0


# -- tables -------------------------------------------------------------------


def test_detections_roundtrip(tmp_path):
    dets = [Detection(1.5, 2.25, -0.3, 7.0, 4, 0), Detection(3.0, 4.0, np.pi, 1e-9, 1, 2)]
    io.write_detections_csv(tmp_path / "d.csv", dets, "config=abc")
    assert io.read_detections_csv(tmp_path / "d.csv") == dets
    io.write_detections_json(tmp_path / "d.json", dets)
    assert '"n_points": 4' in (tmp_path / "d.json").read_text()


def test_detections_missing_columns(tmp_path):
    (tmp_path / "d.csv").write_text("x,y\n1,2\n")
    with pytest.raises(ValueError, match="missing"):
        io.read_detections_csv(tmp_path / "d.csv")


def test_truth_roundtrip(tmp_path):
    truth = Scene(cluttered_scene(n_targets=2, n_frames=3)).truth
    io.write_truth_csv(tmp_path / "t.csv", truth)
    table = io.read_truth_csv(tmp_path / "t.csv")
    assert sorted(table) == [0, 1, 2]
    np.testing.assert_allclose(table[1][0], truth.centers(1))
    np.testing.assert_allclose(table[1][1], truth.diameter[1])


def test_truth_boxes_use_centre_and_diagonal(tmp_path):
    (tmp_path / "t.csv").write_text("frame,left,top,width,height\n0,10,20,3,4\n")
    centres, sizes = io.read_truth_csv(tmp_path / "t.csv")[0]
    np.testing.assert_allclose(centres, [[11.5, 22.0]])
    np.testing.assert_allclose(sizes, [5.0])


def test_truth_requires_columns(tmp_path):
    (tmp_path / "t.csv").write_text("frame,x\n0,1\n")
    with pytest.raises(ValueError):
        io.read_truth_csv(tmp_path / "t.csv")


def test_write_table_and_hash(tmp_path):
    io.write_table(tmp_path / "t.csv", ["a", "b"], [[1, 0.5]], config_hash="abc")
    assert (tmp_path / "t.csv").read_text().splitlines() == ["# config=abc", "a,b", "1,0.5"]
    assert io.config_hash({"a": 1, "b": 2}) == io.config_hash({"b": 2, "a": 1})
    assert len(io.config_hash({})) == 12
