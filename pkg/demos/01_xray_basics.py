"""
Boundary maps from soft masks
=============================

The core identity: a composite made with soft mask M carries the
fingerprint B = 4 * M * (1 - M), bright exactly where the mask is
fractional and zero wherever it is binary.
"""

import numpy as np

from xrayforge import alpha_blend, compute_xray, is_trivial, soften_mask

rng = np.random.default_rng(0)

# a hard square mask: all values 0 or 1
mask = np.zeros((32, 32))
mask[8:24, 8:24] = 1.0

b = compute_xray(mask)
print("binary mask -> boundary map max:", b.max())
print("is_trivial:", is_trivial(b))

# soften it with the fixed 3x3 binomial kernel; the edge band becomes
# fractional and lights up
soft = soften_mask(mask)
b = compute_xray(soft)
print("softened mask -> boundary map max:", round(b.max(), 4))
print("is_trivial:", is_trivial(b))
print("fractional pixels:", int(((soft > 0) & (soft < 1)).sum()))

# the map peaks at 1 where M = 0.5
print("B at M=0.5:", compute_xray(np.full((16, 16), 0.5)).max())

# blending two images with a binary mask reproduces each side exactly
fg = rng.random((32, 32, 3))
bg = rng.random((32, 32, 3))
out = alpha_blend(fg, bg, mask)
inside = mask.astype(bool)
print("composite equals fg inside:", bool((out[inside] == fg[inside]).all()))
print("composite equals bg outside:", bool((out[~inside] == bg[~inside]).all()))

# complement duality: swapping the roles and inverting the mask is a no-op
a = alpha_blend(fg, bg, soft)
d = alpha_blend(bg, fg, 1.0 - soft)
print("complement duality max diff:", float(np.abs(a - d).max()))
