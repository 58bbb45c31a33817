import numpy as np
import pytest

from parcs.cli import main
from parcs.config import ConfigError, load_config
from parcs.formats import read_measurements, write_pgm
from parcs.synthetic import smooth_image, smooth_video


@pytest.fixture()
def small_cfg(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "\n".join(
            [
                "# desk-scale test grid",
                "trials = 1500",
                "alpha_grid = 0.2, 1.0",
                "r_pairs = 0:1",
                "r2_grid = 4",
                "grid_rows = 8",
                "grid_cols = 8",
                "ratios = 0.4",
                "crop = 24",
                "frames = 4",
                "video_width = 32",
                "video_height = 24",
                "fit_r2 = 12",
                "solver_budget = 2000000",
                "solver_max_iterations = 4000",
            ]
        )
        + "\n"
    )
    return cfg


@pytest.fixture()
def pgm_image(tmp_path):
    path = tmp_path / "scene.pgm"
    write_pgm(path, smooth_image(48, 40, seed=7))
    return path


@pytest.fixture()
def yuv_video(tmp_path):
    frames = smooth_video(4, rows=24, cols=32, seed=8)
    chroma = bytes(frames[0].size // 2)
    path = tmp_path / "clip.yuv"
    path.write_bytes(b"".join(f.tobytes() + chroma for f in frames))
    return path


class TestConfig:
    def test_defaults_need_seed(self):
        with pytest.raises(ConfigError, match="seed"):
            load_config(None)

    def test_file_values_and_overrides(self, small_cfg):
        cfg = load_config(small_cfg, seed=3, workers=2)
        assert cfg.seed == 3 and cfg.workers == 2
        assert cfg.alpha_grid == (0.2, 1.0)
        assert cfg.r_pairs == ((0, 1),)

    def test_unknown_key_rejected(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("wibble = 3\n")
        with pytest.raises(ConfigError, match="unknown key"):
            load_config(bad, seed=1)

    def test_empty_grid_rejected(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("ratios = 0.5, 1.5\n")
        with pytest.raises(ConfigError, match="ratios"):
            load_config(bad, seed=1)


class TestBoundSurface:
    def test_schema_and_rerun_bytes(self, small_cfg, tmp_path):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        for out in (out1, out2):
            assert main(["bound-surface", "--config", str(small_cfg),
                         "--seed", "5", "--out", str(out)]) == 0
        csv1 = (out1 / "bound_surface.csv").read_text()
        assert csv1.splitlines()[0] == "r0,r1,r2,alpha,bound,monte_carlo_estimate,stderr"
        assert csv1 == (out2 / "bound_surface.csv").read_text()
        assert (out1 / "manifest.txt").read_text() == (out2 / "manifest.txt").read_text()

    def test_estimates_respect_bound(self, small_cfg, tmp_path):
        out = tmp_path / "o"
        assert main(["bound-surface", "--config", str(small_cfg),
                     "--seed", "5", "--out", str(out)]) == 0
        rows = (out / "bound_surface.csv").read_text().splitlines()[1:]
        for row in rows:
            *_, bound, est, stderr = map(float, row.split(",")[3:])
            assert bound <= est + 3.0 * stderr

    def test_missing_seed_is_config_error(self, small_cfg, tmp_path):
        assert main(["bound-surface", "--config", str(small_cfg),
                     "--out", str(tmp_path / "o")]) == 2

    def test_degenerate_grid_is_config_error(self, tmp_path):
        cfg = tmp_path / "deg.cfg"
        cfg.write_text("r_pairs = 5:6\nr2_grid = 4\n")  # r2 <= r1 everywhere
        assert main(["bound-surface", "--config", str(cfg),
                     "--seed", "5", "--out", str(tmp_path / "o")]) == 2


class TestPermTable:
    def test_directional_and_zero_image(self, small_cfg, tmp_path, pgm_image):
        zero = tmp_path / "zero.pgm"
        write_pgm(zero, np.zeros((32, 32), dtype=np.uint8))
        out = tmp_path / "o"
        assert main(["perm-table", "--config", str(small_cfg), "--seed", "1",
                     "--out", str(out), str(pgm_image), str(zero)]) == 0
        lines = (out / "perm_table.csv").read_text().splitlines()
        assert lines[0] == "image,threshold,support_size,chebyshev_before,chebyshev_after"
        for line in lines[1:]:
            name, _tau, size, before, after = line.split(",")
            before, after = int(before), int(after)
            if name == "zero.pgm":
                assert before == 0 and after == 0
            else:
                assert after <= before

    def test_unreadable_image_fails(self, small_cfg, tmp_path):
        missing = tmp_path / "nope.pgm"
        assert main(["perm-table", "--config", str(small_cfg), "--seed", "1",
                     "--out", str(tmp_path / "o"), str(missing)]) == 1


class TestImagePsnr:
    def test_modes_and_determinism(self, small_cfg, tmp_path, pgm_image):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        for out in (out1, out2):
            assert main(["image-psnr", "--config", str(small_cfg), "--seed", "2",
                         "--workers", "2", "--out", str(out), str(pgm_image)]) == 0
        text = (out1 / "image_psnr.csv").read_text()
        assert text == (out2 / "image_psnr.csv").read_text()
        lines = text.splitlines()
        assert lines[0].startswith("image,rows,cols,desk_scale_crop,ratio,mode")
        by_mode = {}
        for line in lines[1:]:
            parts = line.split(",")
            assert parts[1] == parts[2] == "24"  # cropped to desk scale
            assert parts[3] == "1"
            by_mode[parts[5]] = float(parts[7])
        assert set(by_mode) == {"zigzag", "none"}

    def test_lossless_full_rate_reports_inf(self, tmp_path):
        cfg = tmp_path / "full.cfg"
        cfg.write_text("ratios = 1.0\ncrop = 0\n")
        zero = tmp_path / "zero.pgm"
        write_pgm(zero, np.zeros((12, 12), dtype=np.uint8))
        out = tmp_path / "o"
        assert main(["image-psnr", "--config", str(cfg), "--seed", "6",
                     "--out", str(out), str(zero)]) == 0
        for line in (out / "image_psnr.csv").read_text().splitlines()[1:]:
            assert line.split(",")[7] == "inf"


class TestVideoPsnr:
    def test_end_to_end(self, small_cfg, tmp_path, yuv_video):
        out = tmp_path / "o"
        assert main(["video-psnr", "--config", str(small_cfg), "--seed", "3",
                     "--workers", "2", "--out", str(out), str(yuv_video)]) == 0
        psnr_lines = (out / "video_psnr.csv").read_text().splitlines()
        assert psnr_lines[0] == "ratio,frame_pairs,ref_psnr_mean,nonref_psnr_mean"
        ratio, pairs, ref_db, nonref_db = psnr_lines[1].split(",")
        assert pairs == "2"
        # static synthetic clip: non-reference tracks reference exactly
        assert float(ref_db) == pytest.approx(float(nonref_db), abs=1e-9)
        timing_lines = (out / "video_timing.csv").read_text().splitlines()
        assert timing_lines[0] == "ratio,reconstruction_seconds"
        assert float(timing_lines[1].split(",")[1]) > 0.0
        stored = sorted((out / "measurements" / "ratio_0.4").glob("*.pcm"))
        assert [read_measurements(p).frame_index for p in stored] == [1, 2, 3, 4]

    def test_psnr_csv_bytes_reproducible(self, small_cfg, tmp_path, yuv_video):
        texts = []
        for out in (tmp_path / "r1", tmp_path / "r2"):
            assert main(["video-psnr", "--config", str(small_cfg), "--seed", "3",
                         "--out", str(out), str(yuv_video)]) == 0
            texts.append((out / "video_psnr.csv").read_bytes())
        assert texts[0] == texts[1]

    def test_truncated_video_names_frame(self, small_cfg, tmp_path, yuv_video, capsys):
        blob = yuv_video.read_bytes()
        short = tmp_path / "short.yuv"
        short.write_bytes(blob[: len(blob) - 200])
        assert main(["video-psnr", "--config", str(small_cfg), "--seed", "3",
                     "--out", str(tmp_path / "o"), str(short)]) == 1
        err = capsys.readouterr().err
        assert "frame 4" in err

    def test_zero_length_video_fails(self, small_cfg, tmp_path, capsys):
        empty = tmp_path / "empty.yuv"
        empty.write_bytes(b"")
        assert main(["video-psnr", "--config", str(small_cfg), "--seed", "3",
                     "--out", str(tmp_path / "o"), str(empty)]) == 1


class TestLayerFit:
    def test_profile_columns(self, small_cfg, tmp_path, pgm_image):
        out = tmp_path / "o"
        assert main(["layer-fit", "--config", str(small_cfg), "--seed", "4",
                     "--out", str(out), str(pgm_image)]) == 0
        lines = (out / "layer_fit.csv").read_text().splitlines()
        assert lines[0] == "layer,layer_size,empirical_p,model_p"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 48 + 40 - 1
        # model curve is zero beyond its last decaying layer
        for layer, _size, _emp, model in rows:
            if int(layer) > 12:
                assert float(model) == 0.0

    def test_zero_image_profile_all_zero(self, small_cfg, tmp_path):
        zero = tmp_path / "zero.pgm"
        write_pgm(zero, np.zeros((24, 24), dtype=np.uint8))
        out = tmp_path / "o"
        assert main(["layer-fit", "--config", str(small_cfg), "--seed", "4",
                     "--out", str(out), str(zero)]) == 0
        for line in (out / "layer_fit.csv").read_text().splitlines()[1:]:
            assert float(line.split(",")[2]) == 0.0
