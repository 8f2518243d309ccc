"""Grayscale image watermarking in the multiresolution Walsh-Hadamard domain."""

from .attacks import AttackSpec, apply_attack
from .image_io import Image, load_pgm, pad_to_square_pow2, quantize, read_pgm, save_pgm, write_pgm
from .metrics import correlation, psnr
from .mrwht import Pyramid, decompose, lift_forward, lift_inverse, reconstruct
from .svd import SvdFactors, svd, svd_compose
from .watermark import EmbedParams, ExtractionResult, WatermarkKey, embed, extract, key_load, key_save
from .wht import wht_forward_2d, wht_inverse_2d

__version__ = "0.1.0"
