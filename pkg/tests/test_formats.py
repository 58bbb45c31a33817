import numpy as np
import pytest

from parcs.codec import Frame, encode_reference
from parcs.formats import (
    read_measurements,
    read_pgm,
    read_yuv_luminance,
    write_measurements,
    write_pgm,
)
from parcs.synthetic import smooth_image, smooth_video


class TestPgm:
    def test_round_trip(self, tmp_path):
        img = smooth_image(20, 31, seed=1)
        path = tmp_path / "img.pgm"
        write_pgm(path, img)
        assert np.array_equal(read_pgm(path), img)

    def test_comment_in_header(self, tmp_path):
        path = tmp_path / "c.pgm"
        payload = bytes(range(6))
        path.write_bytes(b"P5\n# a comment\n3 2\n255\n" + payload)
        img = read_pgm(path)
        assert img.shape == (2, 3)
        assert img.ravel().tolist() == list(payload)

    def test_rejects_other_magic(self, tmp_path):
        path = tmp_path / "p2.pgm"
        path.write_bytes(b"P2\n1 1\n255\n0")
        with pytest.raises(ValueError):
            read_pgm(path)

    def test_rejects_truncated_pixels(self, tmp_path):
        path = tmp_path / "t.pgm"
        path.write_bytes(b"P5\n4 4\n255\n\x00\x00")
        with pytest.raises(ValueError):
            read_pgm(path)

    def test_rejects_16bit(self, tmp_path):
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
        with pytest.raises(ValueError):
            read_pgm(path)


class TestYuv:
    def _write_video(self, path, frames):
        chroma = bytes(frames[0].size // 2)
        path.write_bytes(b"".join(f.tobytes() + chroma for f in frames))

    def test_reads_y_planes_only(self, tmp_path):
        frames = smooth_video(3, rows=24, cols=16, seed=2)
        path = tmp_path / "v.yuv"
        self._write_video(path, frames)
        got = read_yuv_luminance(path, width=16, height=24)
        assert len(got) == 3
        for a, b in zip(got, frames):
            assert np.array_equal(a, b)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.yuv"
        path.write_bytes(b"")
        with pytest.raises(ValueError, match="no complete"):
            read_yuv_luminance(path, width=16, height=24)

    def test_truncated_frame_named(self, tmp_path):
        frames = smooth_video(2, rows=24, cols=16, seed=3)
        path = tmp_path / "short.yuv"
        chroma = bytes(frames[0].size // 2)
        blob = frames[0].tobytes() + chroma + frames[1].tobytes()[:100]
        path.write_bytes(blob)
        with pytest.raises(ValueError, match="frame 2"):
            read_yuv_luminance(path, width=16, height=24, count=2)


class TestMeasurementFile:
    def _code(self):
        pix = smooth_image(16, 12, seed=4).astype(float)
        return encode_reference(Frame.from_array(pix, 3), 0.5, seed=5)

    def test_round_trip_identical(self, tmp_path):
        code = self._code()
        path = tmp_path / "frame.pcm"
        write_measurements(path, code)
        back = read_measurements(path)
        assert back.rows == code.rows and back.cols == code.cols
        assert back.k == code.k and back.seed == code.seed
        assert back.perm_tag == "zigzag" and back.kind == "reference"
        assert back.frame_index == 3
        assert np.array_equal(back.measurements, code.measurements)

    def test_bytes_deterministic(self, tmp_path):
        code = self._code()
        p1, p2 = tmp_path / "a.pcm", tmp_path / "b.pcm"
        write_measurements(p1, code)
        write_measurements(p2, code)
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.pcm"
        write_measurements(path, self._code())
        blob = bytearray(path.read_bytes())
        blob[:4] = b"NOPE"
        path.write_bytes(bytes(blob))
        with pytest.raises(ValueError, match="not a measurement file"):
            read_measurements(path)

    def test_truncated_payload_rejected(self, tmp_path):
        path = tmp_path / "cut.pcm"
        write_measurements(path, self._code())
        blob = path.read_bytes()
        path.write_bytes(blob[:-16])
        with pytest.raises(ValueError, match="payload"):
            read_measurements(path)
