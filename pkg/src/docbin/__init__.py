"""docbin: document image binarization toolkit.

Haar-wavelet downscaling, resampling kernels, classical thresholding,
patch tiling and augmentation, DIBCO-style metrics, training losses and a
dataset evaluation harness.
"""
__version__ = "0.1.0"

from .errors import (DecodeError, DocbinError, DomainError, ExternalBinarizerError, NumericError,
                     ShapeError, UnsupportedFormatError)
from .codec import decode_image, encode_image, read_image, read_mask, write_image
from .raster import mask_to_raster, raster_to_mask, split_channels, to_gray
from .wavelet import SubbandSet, haar_forward, haar_inverse, ll_downscale
from .resample import KERNELS, ResizeKernel, rescale, resize
from .threshold import binarize, local_threshold, otsu, otsu_threshold
from .patchwork import AugmentSpec, PatchGrid, augment_global, augment_local, fuse, merge_patches, split_patches
from .metrics import MetricReport, confusion, drd, evaluate, f_measure, pseudo_f_measure, psnr
from .losses import LossWeights, bce, critic_loss, generator_loss, soft_dice
