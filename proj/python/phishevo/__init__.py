# Copyright 2026 The phishevo Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the phishevo core."""

import json as _json

from . import _core
from ._core import (
    BackendError,
    ConfigError,
    Error,
    IsolationForest,
    MissingArtifactError,
    NumericError,
    ParseError,
    average_path_length,
    bigram_jaccard,
    f_beta,
    mann_whitney,
    midranks,
    parse_verdict,
    perplexity,
    run_pipeline,
    select_k,
    tfidf,
)

__version__ = _core.__version__


def dps(body, lexicon, k=3.0):
    """Per-principle persuasion profile of one email as a dict."""
    return _json.loads(_core.dps(body, lexicon, k))


def emit_report(run_dir):
    """Writes report.json/report.txt into run_dir and returns the report."""
    return _json.loads(_core.emit_report(run_dir))


__all__ = [
    "BackendError",
    "ConfigError",
    "Error",
    "IsolationForest",
    "MissingArtifactError",
    "NumericError",
    "ParseError",
    "average_path_length",
    "bigram_jaccard",
    "dps",
    "emit_report",
    "f_beta",
    "mann_whitney",
    "midranks",
    "parse_verdict",
    "perplexity",
    "run_pipeline",
    "select_k",
    "tfidf",
]
