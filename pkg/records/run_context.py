"""
JSON-based run context for deblurring runs.
Stores parameters, per-scale traces, synthesis metadata and sweep summaries as sidecar files.
"""
import json
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


class RunContext:
    """Manages one run's JSON sidecar."""

    def __init__(self, context_file: Union[str, Path], command: str):
        self.context_file = Path(context_file)
        self.command = command
        now = datetime.now()
        self.context: Dict[str, Any] = {
            "run_id": f"{command}_{now.strftime('%Y%m%d_%H%M%S')}",
            "command": command,
            "created_at": now.isoformat(),
            "updated_at": None,
            "params": {},
            "inputs": {},
            "results": {},
        }

    def save_context(self):
        """Persist context to the JSON file."""
        self.context["updated_at"] = datetime.now().isoformat()
        self.context_file.parent.mkdir(parents=True, exist_ok=True)
        with open(self.context_file, 'w', encoding='utf-8') as f:
            json.dump(to_jsonable(self.context), f, indent=2, ensure_ascii=False)

    def set_params(self, **sections: Dict[str, Any]):
        """Store parameter blocks, e.g. ``solver=...`` and ``nonblind=...``."""
        self.context["params"].update(sections)
        self.save_context()

    def set_inputs(self, **inputs: Any):
        """Store input paths, seeds and similar provenance."""
        self.context["inputs"].update(inputs)
        self.save_context()

    def set_result(self, key: str, value: Any):
        """Store one named result block."""
        self.context["results"][key] = value
        self.save_context()
