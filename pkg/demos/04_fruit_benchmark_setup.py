"""
Set up the ten-fruit ImageNet benchmark
=======================================

The full-scale benchmark blends 10 fruit categories (10 images each,
7 cutoffs: 90 ordered pairs x 100 combinations x 7 = 63,000 hybrids) and
scores ImageNet classifiers on them. Source photos are not redistributable,
so this script only prepares the scaffolding:

  1. writes a manifest template with the ImageNet-1k label ids filled in,
  2. shows which image files you still need to supply,
  3. prints the commands that run the benchmark once they exist.

Run from the repository root:  python3 demos/04_fruit_benchmark_setup.py
"""

from pathlib import Path

from hybridbench import plan_dataset
from hybridbench.demo import download_source_images, write_fruit_manifest_template
from hybridbench.labels import imagenet_fruit_ids

workdir = Path("demo_out/fruit")
manifest_path = write_fruit_manifest_template(workdir / "manifest.json")
print(f"wrote manifest template: {manifest_path}")

print("\nImageNet-1k label ids per category:")
for name, ids in imagenet_fruit_ids().items():
    print(f"  {name:>14s} -> {ids}")

# The plan is fully determined before a single pixel exists.
from hybridbench.dataset import load_manifest

manifests, _, _ = load_manifest(manifest_path)
plan = plan_dataset(manifests)
print(f"\nplanned hybrids: {len(plan.specs)}")

try:
    download_source_images(manifest_path)
except NotImplementedError as exc:
    missing = str(exc).count("\n")
    print(f"\nno bundled downloader; {missing} image files still to supply.")

print(
    "\nonce the images exist, run:\n"
    f"  hybridbench run-all --manifest {manifest_path} --out demo_out/fruit/run \\\n"
    "      --backend models/resnet18.onnx --sidecar models/resnet18.json --workers 8\n"
    "('--backend mock' works without any model files.)"
)
