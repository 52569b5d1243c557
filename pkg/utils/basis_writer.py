# utils/basis_writer.py
import json
import logging
import os
from typing import Dict

import numpy as np

logger = logging.getLogger(__name__)


def write_bases(path: str, results: Dict[str, "HomSpaceResult"]) -> Dict[str, str]:
    """Write basis tensors to ``<path>.npz`` and a JSON sidecar ``<path>.json``.

    The archive holds one full array per kind (``<kind>``, shape (d, m, m, m)) and its
    independent coordinates (``<kind>_packed``, antisymmetric slots ordered i < j < k).
    """
    stem = path[:-4] if path.endswith(".npz") else path
    directory = os.path.dirname(stem)
    if directory:
        os.makedirs(directory, exist_ok=True)
    arrays = {}
    for kind, result in results.items():
        arrays[kind] = result.basis
        arrays[f"{kind}_packed"] = result.packed_basis()
    np.savez_compressed(f"{stem}.npz", **arrays)
    sidecar = {kind: result.to_dict() for kind, result in results.items()}
    with open(f"{stem}.json", "w") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)
    logger.info(f"Wrote {len(results)} bases to {stem}.npz")
    return {"archive": f"{stem}.npz", "sidecar": f"{stem}.json"}
