"""hybridbench: hybrid-image synthesis and classifier frequency-response analysis."""

from .analysis import (
    AggregateCurve,
    CrossoverResult,
    PairCurve,
    aggregate,
    emit_reports,
    find_crossover,
)
from .dataset import (
    CategoryManifest,
    DatasetPlan,
    GenerationReport,
    HybridSpec,
    enumerate_pairs,
    generate_dataset,
    load_manifest,
    parse_spec_name,
    plan_dataset,
    spec_filename,
    spec_name,
)
from .imaging import (
    DEFAULT_CUTOFFS,
    GaussianKernel,
    build_gaussian_kernel,
    compose_hybrid,
    high_pass,
    low_pass,
    resize_bilinear,
)
from .inference import (
    ClassifierBackend,
    InputSpec,
    OnnxBackend,
    PredictionRecord,
    PrototypeMockBackend,
    evaluate_dataset,
    preprocess,
    prototype_mock_backend,
    top_k,
)
from .labels import imagenet_fruit_ids, lookup_class_ids
from .pngio import decode_image, encode_image

__version__ = "0.1.0"

__all__ = [
    "AggregateCurve",
    "CategoryManifest",
    "ClassifierBackend",
    "CrossoverResult",
    "DatasetPlan",
    "DEFAULT_CUTOFFS",
    "GaussianKernel",
    "GenerationReport",
    "HybridSpec",
    "InputSpec",
    "OnnxBackend",
    "PairCurve",
    "PredictionRecord",
    "PrototypeMockBackend",
    "aggregate",
    "build_gaussian_kernel",
    "compose_hybrid",
    "decode_image",
    "emit_reports",
    "encode_image",
    "enumerate_pairs",
    "evaluate_dataset",
    "find_crossover",
    "generate_dataset",
    "high_pass",
    "imagenet_fruit_ids",
    "load_manifest",
    "lookup_class_ids",
    "low_pass",
    "parse_spec_name",
    "plan_dataset",
    "preprocess",
    "prototype_mock_backend",
    "resize_bilinear",
    "spec_filename",
    "spec_name",
    "top_k",
]
