import json

import numpy as np
import pytest

from seamforge import (
    RasterImage,
    confusion_buffered,
    confusion_plain,
    decode_image,
    derive_metrics,
    encode_image,
    encode_seam_mask,
    retarget_forgery,
)
from seamforge.cli import main
from conftest import random_image


@pytest.fixture
def sample_png(tmp_path, rng):
    img = random_image(rng, 24, 24, channels=3)
    path = tmp_path / "input.png"
    path.write_bytes(encode_image(img))
    return path


def test_carve_shrinks_width(tmp_path, sample_png, capsys):
    out = tmp_path / "carved.png"
    code = main(["carve", str(sample_png), "--out", str(out), "--ratio", "0.25"])
    assert code == 0
    carved = decode_image(out.read_bytes())
    assert (carved.height, carved.width) == (24, 18)


def test_carve_grow(tmp_path, sample_png):
    out = tmp_path / "grown.png"
    assert main(["carve", str(sample_png), "--out", str(out), "--ratio", "0.25", "--grow"]) == 0
    assert decode_image(out.read_bytes()).width == 30


def test_forge_retarget_writes_three_artifacts(tmp_path, sample_png):
    out = tmp_path / "forged"
    code = main(
        ["forge", str(sample_png), "--out", str(out), "--kind", "retarget", "--ratio", "0.25"]
    )
    assert code == 0
    forged = decode_image((out / "input_forged.png").read_bytes())
    assert (forged.height, forged.width) == (24, 24)
    record = json.loads((out / "input_trajectories.json").read_text())
    assert record["width"] == 24 and record["height"] == 24
    assert len(record["inserted"]) == 6
    assert all(len(cols) == 24 for cols in record["inserted"])
    assert (out / "input_mask.png").exists()


def test_missing_required_flag_exits_2_without_writing(tmp_path, sample_png):
    out = tmp_path / "never"
    with pytest.raises(SystemExit) as exc:
        main(["forge", str(sample_png), "--out", str(out)])
    assert exc.value.code == 2
    assert not out.exists()


def test_forge_usage_error_inside_kind(tmp_path, sample_png):
    out = tmp_path / "never2"
    code = main(["forge", str(sample_png), "--out", str(out), "--kind", "retarget"])
    assert code == 1
    assert not out.exists()


def test_eval_identical_masks_mcc_one(tmp_path, rng, capsys):
    grid = rng.random((16, 16)) < 0.2
    mask_img = RasterImage(grid[:, :, None].astype(np.float64))
    path = tmp_path / "m.png"
    path.write_bytes(encode_image(mask_img))
    code = main(["eval", "--pred", str(path), "--gt", str(path), "--buffer", "1", "--format", "records"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert "mcc=1.000000" in lines
    assert "mcc-1=1.000000" in lines


def test_eval_matches_library_bit_for_bit(tmp_path, rng, capsys):
    pred = rng.random((20, 20)) < 0.2
    gt = rng.random((20, 20)) < 0.15
    pred_path = tmp_path / "pred.png"
    gt_path = tmp_path / "gt.png"
    pred_path.write_bytes(encode_image(RasterImage(pred[:, :, None].astype(np.float64))))
    gt_path.write_bytes(encode_image(RasterImage(gt[:, :, None].astype(np.float64))))
    assert main(["eval", "--pred", str(pred_path), "--gt", str(gt_path), "--buffer", "2", "--format", "records"]) == 0
    out = dict(line.split("=") for line in capsys.readouterr().out.strip().splitlines())
    plain = derive_metrics(confusion_plain(pred, gt))
    buffered = derive_metrics(confusion_buffered(pred, gt, 2), buffered=True, p=2)
    assert out["mcc"] == f"{plain.mcc:.6f}"
    assert out["recall-2"] == f"{buffered.recall:.6f}"
    assert out["precision-2"] == f"{buffered.precision:.6f}"


def test_eval_gt_seam_mask_layers_and_sls(tmp_path, rng, capsys):
    img = random_image(rng, 24, 24, channels=3)
    result = retarget_forgery(img, 0.125, "forward")
    gt_path = tmp_path / "gt_mask.png"
    gt_path.write_bytes(encode_seam_mask(result.gt))
    pred = result.gt.inserted
    pred_path = tmp_path / "pred.png"
    pred_path.write_bytes(encode_image(RasterImage(pred[:, :, None].astype(np.float64))))
    traj_path = tmp_path / "traj.json"
    traj_path.write_text(
        json.dumps(
            {
                "height": 24,
                "width": 24,
                "removed": [s.columns.tolist() for s in result.seams_removed],
                "inserted": [s.columns.tolist() for s in result.seams_inserted],
            }
        )
    )
    code = main(
        [
            "eval",
            "--pred", str(pred_path),
            "--gt", str(gt_path),
            "--layer", "inserted",
            "--trajectories", str(traj_path),
            "--format", "records",
        ]
    )
    assert code == 0
    out = dict(line.split("=") for line in capsys.readouterr().out.strip().splitlines())
    assert out["recall"] == "1.000000"
    assert out["sls"] == "0.000000"  # prediction covers every inserted trajectory


def test_dataset_cli_runs(tmp_path, rng):
    src = tmp_path / "src"
    src.mkdir()
    (src / "a.png").write_bytes(encode_image(random_image(rng, 32, 32, channels=3)))
    out = tmp_path / "ds"
    code = main(
        [
            "dataset", str(src),
            "--out", str(out),
            "--tile-size", "16",
            "--tiles-per-source", "2",
            "--ratio", "0.125",
            "--seed", "3",
        ]
    )
    assert code == 0
    assert (out / "manifest").exists()
    assert len((out / "manifest").read_text().splitlines()) == 2


def test_dataset_cli_post_chain(tmp_path, rng):
    src = tmp_path / "src"
    src.mkdir()
    (src / "a.png").write_bytes(encode_image(random_image(rng, 24, 24, channels=3)))
    out = tmp_path / "ds"
    code = main(
        [
            "dataset", str(src),
            "--out", str(out),
            "--tile-size", "12",
            "--ratio", "0.25",
            "--post", "rotate:90",
            "--post", "jpeg:80",
        ]
    )
    assert code == 0
    entry = json.loads((out / "manifest").read_text().splitlines()[0])
    assert entry["post"] == ["rotate:90", "jpeg:80"]
    assert entry["image"].endswith(".jpg")


def _write_mask_png(path, bits):
    arr = bits.astype(np.float64)[:, :, None]
    path.write_bytes(encode_image(RasterImage(arr)))


def test_forge_object_removal_cli(tmp_path, rng):
    img_path = tmp_path / "scene.png"
    img_path.write_bytes(encode_image(random_image(rng, 16, 16, channels=3)))
    bits = np.zeros((16, 16), dtype=bool)
    bits[6:9, 5:8] = True
    mask_path = tmp_path / "mask.png"
    _write_mask_png(mask_path, bits)
    out = tmp_path / "out"
    code = main(
        [
            "forge", str(img_path),
            "--out", str(out),
            "--kind", "object_removal",
            "--removal-mask", str(mask_path),
        ]
    )
    assert code == 0
    forged = decode_image((out / "scene_forged.png").read_bytes())
    assert (forged.height, forged.width) == (16, 16)


def test_forge_object_displacement_cli(tmp_path, rng):
    img_path = tmp_path / "scene.png"
    img_path.write_bytes(encode_image(random_image(rng, 16, 16, channels=3)))
    bits = np.zeros((16, 16), dtype=bool)
    bits[6:10, 6:10] = True
    mask_path = tmp_path / "obj.png"
    _write_mask_png(mask_path, bits)
    out = tmp_path / "out"
    code = main(
        [
            "forge", str(img_path),
            "--out", str(out),
            "--kind", "object_displacement",
            "--object-mask", str(mask_path),
            "--direction", "right",
            "--shift", "2",
        ]
    )
    assert code == 0
    assert (out / "scene_mask.png").exists()


def test_unknown_input_returns_1(tmp_path):
    code = main(["carve", str(tmp_path / "missing.png"), "--out", str(tmp_path / "o.png"), "--ratio", "0.1"])
    assert code == 1
