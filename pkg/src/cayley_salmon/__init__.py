"""Cayley-Salmon undulation invariant of plane quartics.

Submodules:

- ``exactnum``: prime fields, CRT and rational reconstruction
- ``polycore``: sparse multivariate polynomials and the three gradings
- ``curve``: plane curves, decomposition witnesses, the SL(3) action
- ``linalg``: modular elimination, nullspaces, exact determinants
- ``idealgen``: graded components of the undulation ideal by sampling
- ``undulation``: the 21x21 matrix and the invariant

Top-level names are imported lazily so that ``cayley-salmon --threads`` can
configure BLAS before numpy loads.
"""

import importlib

__version__ = "0.1.0"

_EXPORTS = {
    "PrimeField": "exactnum",
    "crt_combine": "exactnum",
    "rational_reconstruction": "exactnum",
    "MultiPoly": "polycore",
    "grade_of": "polycore",
    "PlaneCurve": "curve",
    "DecompositionWitness": "curve",
    "compose_curve": "curve",
    "act_linear": "curve",
    "random_curve": "curve",
    "random_undulation_curve": "curve",
    "ComponentSpec": "idealgen",
    "component_dim": "idealgen",
    "component_basis": "idealgen",
    "complement_basis": "idealgen",
    "refined_dims_triangle": "idealgen",
    "load_appendix": "undulation",
    "invariant_quartic": "undulation",
    "pipeline_matrix": "undulation",
}

__all__ = sorted(_EXPORTS)


def __getattr__(name):
    if name in _EXPORTS:
        return getattr(importlib.import_module(f".{_EXPORTS[name]}", __name__), name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
