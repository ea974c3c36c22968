import json
from pathlib import Path
from typing import List

import numpy as np

def import_from_json(filepath: Path) -> dict:
    """Imports a .json file and converts it into a dictionary."""
    with open(filepath, 'r') as jsonfile:
        return json.loads(jsonfile.read())

def export_to_json(filepath: Path, data: dict) -> None:
    """Exports a given dict into a json file."""
    with open(filepath, 'w') as jsonfile:
        json.dump(data, jsonfile, ensure_ascii=False, indent=4)

def import_keys(filepath: Path) -> List[int]:
    """Reads keys from a .bin (little-endian u64) or .txt (one decimal per line) file."""
    filepath = Path(filepath)
    if filepath.suffix == '.bin':
        return [int(key) for key in np.fromfile(filepath, dtype='<u8')]
    if filepath.suffix == '.txt':
        with open(filepath, 'r') as keyfile:
            return [int(line) for line in keyfile if line.strip()]
    raise ValueError(f'unsupported key file extension: {filepath.suffix!r}')

def export_keys(filepath: Path, keys: List[int]) -> None:
    """Writes keys in the format selected by the file extension."""
    filepath = Path(filepath)
    if filepath.suffix == '.bin':
        np.asarray(keys, dtype='<u8').tofile(filepath)
    elif filepath.suffix == '.txt':
        with open(filepath, 'w') as keyfile:
            keyfile.writelines(f'{key}\n' for key in keys)
    else:
        raise ValueError(f'unsupported key file extension: {filepath.suffix!r}')
