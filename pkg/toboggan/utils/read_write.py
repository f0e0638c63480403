import csv
import json
import os
from typing import List, Optional, Tuple

import mpmath
import numpy
import scipy

from toboggan import config
from toboggan.errors import ValidationError
from toboggan.metadata import __version__

FORMATS = ('csv', 'json')


def get_output_paths(output: Optional[str], stem: str, fmt: str) -> Tuple[str, str]:
    """Data file and manifest file for one run. output may name a directory or a file."""
    if fmt not in FORMATS:
        raise ValidationError(f'unknown output format {fmt!r}')
    output = output or config.OUTPUT_DIR
    if os.path.isdir(output) or output.endswith(os.sep) or not os.path.splitext(output)[1]:
        data_path = os.path.join(output, f'{stem}.{fmt}')
    else:
        data_path = output
    root, _ = os.path.splitext(data_path)
    return data_path, f'{root}.manifest.json'


def _prepare(path: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)


def write_csv(rows: List[List[str]], path: str) -> None:
    _prepare(path)
    with open(path, 'w', newline='') as csv_file:
        csv.writer(csv_file, lineterminator='\n').writerows(rows)


def write_json(document, path: str) -> None:
    _prepare(path)
    with open(path, 'w') as json_file:
        json.dump(document, json_file, indent=2, sort_keys=True, allow_nan=False)
        json_file.write('\n')


def versions() -> dict:
    return {
        'toboggan': __version__,
        'numpy': numpy.__version__,
        'scipy': scipy.__version__,
        'mpmath': mpmath.__version__,
    }


def write_manifest(path: str, command: str, params: dict, outputs: List[str], **extra) -> None:
    manifest = {'command': command, 'params': params, 'outputs': outputs, 'versions': versions()}
    manifest.update({key: value for key, value in extra.items() if value is not None})
    write_json(manifest, path)


def read_manifest(path: str) -> dict:
    try:
        with open(path) as manifest_file:
            manifest = json.load(manifest_file)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f'cannot read manifest {path}: {exc}')
    for key in ('command', 'params', 'outputs'):
        if key not in manifest:
            raise ValidationError(f'manifest {path} has no {key!r} entry')
    return manifest
