import hashlib
import json
import os

from utils.config_loader import settings


def get_result_key(space, kind, tolerance, budget, seed=None):
    payload = json.dumps({"space": space, "kind": kind, "tolerance": tolerance, "budget": budget, "seed": seed},
                         sort_keys=True)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def _cache_file(key):
    cache_dir = settings()["cache"]["directory"]
    os.makedirs(cache_dir, exist_ok=True)
    return os.path.join(cache_dir, f"{key}.json")


def load_cached_results(space, kind, tolerance, budget, seed=None):
    if not settings()["cache"]["enabled"]:
        return None
    cache_file = _cache_file(get_result_key(space, kind, tolerance, budget, seed))
    if os.path.exists(cache_file):
        with open(cache_file, 'r') as f:
            return json.load(f)
    return None


def save_cached_results(space, kind, tolerance, budget, results, seed=None):
    if not settings()["cache"]["enabled"]:
        return
    cache_file = _cache_file(get_result_key(space, kind, tolerance, budget, seed))
    with open(cache_file, 'w') as f:
        json.dump(results, f, sort_keys=True)
