"""
Classical forensic maps on a constructed splice
===============================================

Two cheap detectors predating learned ones: the 3x3 median noise
residual, and error level analysis (recompress and diff).  A patch with
a different compression history than its host stands out in both.
"""

import io

import numpy as np
from PIL import Image

from xrayforge import error_level_analysis, noise_residual


def jpeg(img, quality):
    # in-memory codec roundtrip used to give the host and the patch
    # different compression histories
    buf = io.BytesIO()
    Image.fromarray(np.rint(img * 255).astype(np.uint8), "RGB").save(
        buf, format="JPEG", quality=quality)
    buf.seek(0)
    return np.asarray(Image.open(buf).convert("RGB")) / 255.0


rng = np.random.default_rng(9)

# host: smooth blocks saved once at q=95
coarse = rng.random((8, 8, 3))
host = np.repeat(np.repeat(coarse, 8, axis=0), 8, axis=1)
host = jpeg(np.clip(host + rng.normal(0, 0.02, host.shape), 0, 1), 95)

# patch: textured donor crushed at q=60, pasted into the host
patch = jpeg(rng.random((32, 32, 3)), 60)[8:24, 8:24]
comp = host.copy()
comp[24:40, 24:40] = patch
inside = np.zeros((64, 64), dtype=bool)
inside[24:40, 24:40] = True

# noise residual: the pasted region carries a different grain level
nm = noise_residual(comp, amplification=8.0).data
print("noise residual  inside %.4f  outside %.4f"
      % (nm[inside].mean(), nm[~inside].mean()))

# ELA at the host's quality: the host barely changes, the q=60 patch does
ela = error_level_analysis(comp, quality=95, scale=15.0).data
print("error level     inside %.4f  outside %.4f"
      % (ela[inside].mean(), ela[~inside].mean()))

# a flat image has nothing to reveal
flat = np.full((32, 32, 3), 0.5)
print("flat image ELA max:", float(error_level_analysis(flat, quality=90).data.max()))
print("flat image noise max:", float(noise_residual(flat).data.max()))
