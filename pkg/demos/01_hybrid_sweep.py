"""
Build one hybrid image across the whole cutoff sweep
====================================================

A hybrid keeps the coarse structure of one image (its Gaussian-blurred
low band) and the fine detail of another (what the blur removes). Small
cutoffs leave the blend looking like the first image; large cutoffs hand
it over to the second. This script renders the sweep side by side.

Run from the repository root:  python3 demos/01_hybrid_sweep.py
Outputs land in demo_out/sweep/.
"""

from pathlib import Path

import numpy as np

from hybridbench import compose_hybrid, decode_image, encode_image, high_pass, low_pass, resize_bilinear
from hybridbench.imaging import DEFAULT_CUTOFFS

out_dir = Path("demo_out/sweep")
out_dir.mkdir(parents=True, exist_ok=True)

# Two demo sources: a smooth ramp and a checkerboard, already 224x224.
low_src = resize_bilinear(decode_image("demo/images/gradient_0.png"), 224, 224)
high_src = resize_bilinear(decode_image("demo/images/checkerboard_0.png"), 224, 224)

# The two bands at a middling cutoff, for intuition. High-pass output is
# signed, so shift it for display.
sigma = 7
encode_image(low_pass(low_src, sigma), out_dir / "band_low.png")
encode_image(np.clip(high_pass(high_src, sigma) + 0.5, 0, 1), out_dir / "band_high.png")

# The sweep itself: one hybrid per cutoff, plus a contact sheet.
tiles = []
for sigma in DEFAULT_CUTOFFS:
    hybrid = compose_hybrid(low_src, high_src, sigma)
    encode_image(hybrid, out_dir / f"hybrid_c{sigma:g}.png")
    tiles.append(hybrid)
    share_low = np.mean(np.abs(hybrid - low_src))
    share_high = np.mean(np.abs(hybrid - high_src))
    print(f"sigma={sigma:>4g}  mean|hybrid-low|={share_low:.3f}  mean|hybrid-high|={share_high:.3f}")

sheet = np.concatenate(tiles, axis=1)
encode_image(sheet, out_dir / "contact_sheet.png")
print(f"\nwrote {len(tiles)} hybrids and contact_sheet.png to {out_dir}/")
