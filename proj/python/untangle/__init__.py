"""Python access to the untangle engine. Scenes, scripts and reports are plain dicts."""

import json

from . import _untangle
from ._untangle import ConfigError, GenericityError, InvariantUndefined, MoveError, ParameterError, ParseError

__all__ = [
    "model_a", "model_b", "model_c", "scene_hash", "is_legal", "goal_reached",
    "word", "index", "linking", "tricolor", "fuzz", "search", "replay",
    "export_svg", "export_obj",
    "ConfigError", "GenericityError", "InvariantUndefined", "MoveError", "ParameterError", "ParseError",
]


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def model_a(r):
    return json.loads(_untangle.model_a(r))


def model_b(r_left=1.0, r_right=1.0, r_hoop=1.0, slack=0.5):
    return json.loads(_untangle.model_b(r_left, r_right, r_hoop, slack))


def model_c(r_hoop=1.0, tube=0.05, rope_length=1.0):
    return json.loads(_untangle.model_c(r_hoop, tube, rope_length))


def scene_hash(scene):
    return _untangle.scene_hash(_dump(scene))


def is_legal(scene):
    """Returns (ok, list of violation messages)."""
    return _untangle.is_legal(_dump(scene))


def goal_reached(scene):
    return _untangle.goal_reached(_dump(scene))


def word(scene):
    return _untangle.word(_dump(scene))


def index(scene):
    return _untangle.index(_dump(scene))


def linking(scene, seed=0):
    """Pairwise linking numbers keyed by (id, id)."""
    return {(a, b): n for a, b, n in _untangle.linking(_dump(scene), seed)}


def tricolor(scene, band_sum=False, seed=0):
    return _untangle.tricolor(_dump(scene), band_sum, seed)


def fuzz(scene, seed=0, steps=100, audits=("legal",)):
    return json.loads(_untangle.fuzz(_dump(scene), seed, steps, list(audits)))


def search(scene, max_depth=12, max_states=2000):
    return json.loads(_untangle.search(_dump(scene), max_depth, max_states))


def replay(scene, script):
    return json.loads(_untangle.replay(_dump(scene), _dump(script)))


def export_svg(scene, seed=0):
    return _untangle.export_svg(_dump(scene), seed)


def export_obj(scene):
    return _untangle.export_obj(_dump(scene))
