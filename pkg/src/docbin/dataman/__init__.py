"""Datasets, binarizer references and experiment harnesses."""
from .binarizers import BuiltinBinarizer, ExternalBinarizer, Job, resolve_binarizer
from .harness import (METHOD_LABELS, RESIZE_METHODS, ResizeTable, evaluate_pairs, pipeline_run,
                      reduce_half, reduced_binarization, resize_compare)
from .manifest import DatasetManifest, ManifestEntry, load_manifest, scan_manifest
from .report import EXIT_DATA, EXIT_EXTERNAL, EXIT_OK, EXIT_USAGE, ErrorRow, EvalReport
