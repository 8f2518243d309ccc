import hashlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wht_watermark.attacks import (
    KERNEL_ONE,
    KINDS,
    STOCHASTIC,
    AttackSpec,
    apply_attack,
    default_sigma,
    default_suite,
    gaussian_taps,
)
from wht_watermark.image_io import Image
from wht_watermark.jpeg import LUMINANCE_TABLE, quality_table
from wht_watermark.metrics import psnr

# sha256 of the attacked camera fixture under default_suite(seed=7)
GOLDEN = {
    "gaussian_blur": "2691dd8a97e0b38a8d550cb5e6084816a932df065f538871e8deb16daa8a6f27",
    "gaussian_noise": "d300d559882c5dc28e50ecb8eaf575c9a69a39be60dc2b697254ed310956ee6d",
    "salt_pepper": "b01a8b996e2f0d4d96fd1c1f760e8c4d35c54941acd1184c2b62994d23541bfe",
    "jpeg": "ea511a1aed7c116ff1a5bb669cc36d01a42968325ef39772b0b4c6dc40859c25",
    "row_col_delete": "43b83a27a4451c7055e85db3799278fdda43e0f168a6322dc97aad828d73eb97",
    "pixelate": "c19ef982f833a28aaf83a6cdb7fef150eea26cbf4a126ab69beba3b0c33e465e",
    "crop": "76deaf4ee2a4aa8b9f54ef4584c8d1f8c1c0cf1998daf4d589236a5137d20521",
    "flip_v": "92c09d47f46d2385dd588bda9f1464818688c453a8fd03de5dc19862ae307f0b",
    "flip_h": "5b74bef39076c73db13c0ee7540a62ccfcd7005781eb2f069165ec8e6675c7b1",
    "sharpen": "31b4d2f6b53bd72336ff81a952589b86201de207de186da881be9d263b460652",
    "warp_spherical": "36dbd9e9f5122384cd93f6a13c3ea0097d1dc3635faa1073115099db6986d680",
}


def spec(kind, seed=3, **params):
    return AttackSpec(kind, params, seed if kind in STOCHASTIC else None)


def reflect(i, n):
    """Index into a half-sample symmetric extension: -1 -> 0, n -> n - 1."""
    while i < 0 or i >= n:
        i = -i - 1 if i < 0 else 2 * n - 1 - i
    return i


def blur_by_brute_force(px, taps):
    """Full 2-D kernel, one output pixel at a time, Python integers throughout."""
    h, w = len(px), len(px[0])
    half = len(taps) // 2
    shift = 2 * (KERNEL_ONE.bit_length() - 1)
    out = []
    for y in range(h):
        row = []
        for x in range(w):
            acc = 0
            for dy in range(-half, half + 1):
                for dx in range(-half, half + 1):
                    acc += int(taps[dy + half]) * int(taps[dx + half]) * int(px[reflect(y + dy, h)][reflect(x + dx, w)])
            row.append(min(255, max(0, (acc + (1 << (shift - 1))) >> shift)))
        out.append(row)
    return out


@pytest.fixture(scope="module")
def small(camera):
    return Image(camera.pixels[200:224, 240:261].copy())


class TestGeometry:
    def test_flip_v_involution(self, camera):
        once = apply_attack(camera, spec("flip_v"))
        assert once != camera
        assert apply_attack(once, spec("flip_v")) == camera

    def test_flip_h_involution(self, camera):
        assert apply_attack(apply_attack(camera, spec("flip_h")), spec("flip_h")) == camera

    def test_flips_compose_to_rotation(self, camera):
        both = apply_attack(apply_attack(camera, spec("flip_v")), spec("flip_h"))
        assert np.array_equal(both.pixels, np.rot90(camera.pixels, 2))

    def test_crop_keeps_central_81(self, camera):
        out = apply_attack(camera, spec("crop", fraction=0.025)).pixels
        # round(512 * sqrt(0.025)) = round(80.95) = 81, offset (512 - 81) // 2 = 215
        window = (slice(215, 296), slice(215, 296))
        assert np.array_equal(out[window], camera.pixels[window])
        mask = np.ones_like(out, dtype=bool)
        mask[window] = False
        assert not out[mask].any()

    def test_crop_full(self, camera):
        assert apply_attack(camera, spec("crop", fraction=1.0)) == camera

    def test_row_col_delete_zero(self, camera):
        assert apply_attack(camera, spec("row_col_delete", count=0)) == camera

    def test_row_col_delete_too_many(self, small):
        with pytest.raises(ValueError):
            apply_attack(small, spec("row_col_delete", count=21))

    def test_warp_zero_is_identity(self, camera):
        assert apply_attack(camera, spec("warp_spherical", strength=0.0)) == camera

    def test_warp_keeps_center_and_corners(self, camera):
        out = apply_attack(camera, spec("warp_spherical", strength=0.8)).pixels
        assert out[0, 0] == camera.pixels[0, 0] and out[-1, -1] == camera.pixels[-1, -1]


class TestFilters:
    def test_taps_sum(self):
        for k in (1, 3, 5, 13, 31):
            taps = gaussian_taps(k, default_sigma(k))
            assert taps.sum() == KERNEL_ONE
            assert np.array_equal(taps, taps[::-1])

    def test_default_sigma_13(self):
        assert default_sigma(13) == pytest.approx(2.3)

    def test_blur_matches_brute_force(self, small):
        out = apply_attack(small, spec("gaussian_blur", ksize=13))
        taps = gaussian_taps(13, default_sigma(13))
        assert out.pixels.tolist() == blur_by_brute_force(small.pixels.tolist(), taps)

    def test_blur_constant(self):
        img = Image(np.full((9, 9), 77, np.uint8))
        assert apply_attack(img, spec("gaussian_blur")) == img

    def test_sharpen_zero(self, camera):
        assert apply_attack(camera, spec("sharpen", amount=0.0)) == camera

    def test_pixelate_one_is_identity(self, camera):
        assert apply_attack(camera, spec("pixelate", block=1)) == camera

    def test_pixelate_block_means(self):
        px = np.arange(16, dtype=np.uint8).reshape(4, 4)
        out = apply_attack(Image(px), spec("pixelate", block=2)).pixels
        # block means 2.5, 4.5, 10.5, 12.5 round half away from zero
        assert out.tolist() == [[3, 3, 5, 5], [3, 3, 5, 5], [11, 11, 13, 13], [11, 11, 13, 13]]

    def test_pixelate_ragged_edge(self, small):
        out = apply_attack(small, spec("pixelate", block=8)).pixels
        assert out.shape == small.pixels.shape
        assert len(set(out[16:, 16:].ravel().tolist())) == 1


class TestNoise:
    def test_salt_pepper_zero(self, camera):
        assert apply_attack(camera, spec("salt_pepper", percent=0)) == camera

    def test_gaussian_noise_zero(self, camera):
        assert apply_attack(camera, spec("gaussian_noise", percent=0)) == camera

    def test_salt_pepper_density(self, camera):
        out = apply_attack(camera, spec("salt_pepper", percent=100)).pixels
        changed = out != camera.pixels
        assert set(np.unique(out[changed]).tolist()) <= {0, 255}
        assert 0.08 < changed.mean() < 0.11

    def test_gaussian_noise_spread(self):
        img = Image(np.full((256, 256), 128, np.uint8))
        out = apply_attack(img, spec("gaussian_noise", percent=100)).pixels.astype(float)
        assert out.std() == pytest.approx(25.5, rel=0.03)
        assert out.mean() == pytest.approx(128, abs=0.5)

    def test_seed_changes_output(self, camera):
        a = apply_attack(camera, spec("gaussian_noise", seed=1))
        b = apply_attack(camera, spec("gaussian_noise", seed=2))
        assert a != b

    @pytest.mark.parametrize("kind", sorted(STOCHASTIC))
    def test_seed_required(self, kind):
        with pytest.raises(ValueError, match="seed"):
            AttackSpec(kind)


class TestJpeg:
    def test_table_at_50_is_standard(self):
        assert np.array_equal(quality_table(50), LUMINANCE_TABLE)

    def test_table_at_100_is_all_ones(self):
        assert not (quality_table(100) - 1).any()

    def test_best_quality_is_near_lossless(self, camera, moon):
        for img in (camera, moon):
            assert psnr(img, apply_attack(img, spec("jpeg", quality=100))) >= 50

    def test_monotone_in_quality(self, camera):
        grid = [1, 5, 10, 25, 50, 75, 90, 100]
        values = [psnr(camera, apply_attack(camera, spec("jpeg", quality=q))) for q in grid]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_ragged_size(self, small):
        assert apply_attack(small, spec("jpeg")).pixels.shape == (24, 21)


class TestSpec:
    @pytest.mark.parametrize(
        "kind,params",
        [
            ("gaussian_blur", {"ksize": 4}),
            ("gaussian_blur", {"sigma": 0}),
            ("gaussian_noise", {"percent": 101}),
            ("jpeg", {"quality": 0}),
            ("jpeg", {"quality": 2.5}),
            ("pixelate", {"block": 0}),
            ("crop", {"fraction": 0}),
            ("warp_spherical", {"strength": 1.5}),
            ("flip_v", {"amount": 1}),
        ],
    )
    def test_out_of_range(self, kind, params):
        with pytest.raises(ValueError):
            AttackSpec(kind, params, 1)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            AttackSpec("rotate")

    def test_string_params_are_parsed(self):
        s = AttackSpec("jpeg", {"quality": "20"})
        assert s.params == {"quality": 20}
        assert s.param_string() == "quality=20"

    def test_config_text(self):
        s = AttackSpec("salt_pepper", {"percent": 50}, seed=9)
        assert s.to_config() == "[attack]\nkind = salt_pepper\npercent = 50.0\nseed = 9\n"

    def test_suite_covers_every_kind(self):
        assert [s.kind for s in default_suite()] == list(KINDS)
        assert len(KINDS) == 11


@pytest.mark.parametrize("attack", default_suite(seed=7), ids=lambda s: s.kind)
def test_golden_digest(camera, attack):
    out = apply_attack(camera, attack)
    assert hashlib.sha256(out.pixels.tobytes()).hexdigest() == GOLDEN[attack.kind]
    # a second application is byte-identical
    assert apply_attack(camera, attack).pixels.tobytes() == out.pixels.tobytes()


@given(
    st.tuples(st.integers(9, 40), st.integers(9, 40)).flatmap(lambda s: arrays(np.uint8, s)),
    st.sampled_from(KINDS),
)
@settings(max_examples=80, deadline=None)
def test_every_attack_preserves_size(px, kind):
    img = Image(px)
    out = apply_attack(img, spec(kind, count=4) if kind == "row_col_delete" else spec(kind))
    assert out.pixels.shape == px.shape and out.pixels.dtype == np.uint8
