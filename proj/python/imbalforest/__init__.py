"""SMOTE + random-forest toolkit for imbalanced binary classification."""

import json as _json

from ._core import (  # noqa: F401
    Dataset,
    ForestModel,
    RandomSource,
    __version__,
    dedup,
    fit_forest,
    generate_synthetic,
    grid_search,
    load_dataset,
    load_model,
    metrics,
    pearson_corr,
    predict_labels,
    predict_scores,
    roc,
    save_dataset,
    save_model,
    smote,
    stratified_split,
)
from ._core import run_json as _run_json


def run(config, out_dir, threads=1, no_timing=True):
    """Run the full pipeline and return the report as a dict.

    `config` may be a dict or a JSON string in the CLI config format.
    """
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_run_json(text, str(out_dir), threads, no_timing))
