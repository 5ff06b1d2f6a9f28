"""
Reporting Module for the Dirichlet Composition Lab
CSV/JSON artifacts that embed the resolved run configuration
"""

import json
import logging
import os
from typing import Any, Dict, Mapping

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """JSON-safe form of numpy scalars, arrays and complex numbers"""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': _plain(value.real), 'im': _plain(value.imag)}
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def to_json(payload: Mapping[str, Any], run_config: Mapping[str, Any]) -> str:
    """Deterministic JSON text with the run configuration under "config" """
    body = dict(_plain(payload))
    body['config'] = _plain(run_config)
    return json.dumps(body, indent=2, sort_keys=True)


def to_csv(frame: pd.DataFrame, run_config: Mapping[str, Any]) -> str:
    header = '# config: ' + json.dumps(_plain(run_config), sort_keys=True)
    return header + '\n' + frame.to_csv(index=False, float_format='%.12g', lineterminator='\n')


def write_json(path: str, payload: Mapping[str, Any], run_config: Mapping[str, Any]) -> None:
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(to_json(payload, run_config) + '\n')
    logger.info(f"Wrote JSON artifact {path}")


def write_csv(path: str, frame: pd.DataFrame, run_config: Mapping[str, Any]) -> None:
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(to_csv(frame, run_config))
    logger.info(f"Wrote CSV artifact {path} ({len(frame)} rows)")


def write_artifact(path: str, payload: Dict[str, Any], frame: pd.DataFrame, run_config: Mapping[str, Any]) -> None:
    """Write a CSV for .csv paths (falling back to JSON when there is no table), JSON otherwise"""
    ext = os.path.splitext(path)[1].lower()
    if ext == '.csv' and frame is not None:
        write_csv(path, frame, run_config)
    else:
        if ext == '.csv':
            logger.warning(f"No table for {path}; writing JSON instead")
        write_json(path, payload, run_config)


def read_csv(path: str) -> pd.DataFrame:
    """Read back a CSV artifact, skipping the config comment"""
    return pd.read_csv(path, comment='#')


def read_config(path: str) -> Dict[str, Any]:
    """Run configuration embedded in an artifact"""
    with open(path, encoding='utf-8') as handle:
        if path.lower().endswith('.csv'):
            first = handle.readline()
            if not first.startswith('# config: '):
                return {}
            return json.loads(first[len('# config: '):])
        return json.load(handle).get('config', {})
