"""On-disk kernel descriptions: a small JSON schema for the three families.

Top-level "kind" selects the family:

    {"kind": "sphere", "d": 2, "coeffs": [0.5, 0.5], "scale": 1.0}
    {"kind": "sphere_time", "d": 2, "scale": 1.0,
     "terms": [{"a": 1.0, "charfn": {"family": "gaussian", "params": {"sigma": 1.0}}}]}
    {"kind": "product_spheres", "d1": 2, "d2": 2, "matrix": [[1.0]], "scale": 1.0}

"scale" is optional (default 1) and multiplies the kernel; coefficient mass
is normalized away into the kernel's scale on load, so specs need not sum
to one. Unknown keys are rejected to catch typos early.
"""

import dataclasses
import json

import numpy as np

from .errors import KernelSpecError, SphereCovError
from .gegenbauer import GegenbauerBasis
from .product_spheres import ProductSphereKernel, make_ps_kernel
from .schoenberg import SchoenbergSequence, make_sequence
from .spacetime import CharFn, SpaceTimeKernel, make_charfn, make_st_kernel

KINDS = ("sphere", "sphere_time", "product_spheres")


def _require_keys(doc: dict, required: tuple, optional: tuple, where: str):
    keys = set(doc)
    missing = [k for k in required if k not in keys]
    if missing:
        raise KernelSpecError(f"{where}: missing required key(s) {missing}")
    unknown = sorted(keys - set(required) - set(optional))
    if unknown:
        raise KernelSpecError(f"{where}: unknown key(s) {unknown}")


def _as_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise KernelSpecError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise KernelSpecError(f"{name} must be >= 1, got {value}")
    return value


def _as_number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise KernelSpecError(f"{name} must be a number, got {value!r}")
    return float(value)


def _as_scale(doc: dict) -> float:
    scale = _as_number(doc.get("scale", 1.0), "scale")
    if not scale > 0:
        raise KernelSpecError(f"scale must be positive, got {scale}")
    return scale


def _apply_scale(kernel, scale: float):
    if scale == 1.0:
        return kernel
    return dataclasses.replace(kernel, scale_c=kernel.scale_c * scale)


def kernel_from_dict(doc: dict):
    """Validate a parsed spec document into one of the three kernel types."""
    if not isinstance(doc, dict):
        raise KernelSpecError(f"kernel spec must be a JSON object, got {type(doc).__name__}")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise KernelSpecError(f"kind must be one of {list(KINDS)}, got {kind!r}")
    try:
        if kind == "sphere":
            _require_keys(doc, ("kind", "d", "coeffs"), ("scale",), "sphere spec")
            basis = GegenbauerBasis.from_dimension(_as_positive_int(doc["d"], "d"))
            coeffs = doc["coeffs"]
            if not isinstance(coeffs, list) or not coeffs:
                raise KernelSpecError("coeffs must be a nonempty array of numbers")
            values = [_as_number(c, f"coeffs[{i}]") for i, c in enumerate(coeffs)]
            kernel = make_sequence(values, basis, normalize=True)
        elif kind == "sphere_time":
            _require_keys(doc, ("kind", "d", "terms"), ("scale",), "sphere_time spec")
            basis = GegenbauerBasis.from_dimension(_as_positive_int(doc["d"], "d"))
            terms_doc = doc["terms"]
            if not isinstance(terms_doc, list) or not terms_doc:
                raise KernelSpecError("terms must be a nonempty array of objects")
            terms = []
            for i, term in enumerate(terms_doc):
                if not isinstance(term, dict):
                    raise KernelSpecError(f"terms[{i}] must be an object")
                _require_keys(term, ("a", "charfn"), (), f"terms[{i}]")
                cf_doc = term["charfn"]
                if not isinstance(cf_doc, dict):
                    raise KernelSpecError(f"terms[{i}].charfn must be an object")
                _require_keys(cf_doc, ("family",), ("params",), f"terms[{i}].charfn")
                params = cf_doc.get("params", {})
                if not isinstance(params, dict):
                    raise KernelSpecError(f"terms[{i}].charfn.params must be an object")
                cf = make_charfn(str(cf_doc["family"]), params)
                terms.append((_as_number(term["a"], f"terms[{i}].a"), cf))
            kernel = make_st_kernel(terms, basis, normalize=True)
        else:
            _require_keys(doc, ("kind", "d1", "d2", "matrix"), ("scale",), "product_spheres spec")
            basis1 = GegenbauerBasis.from_dimension(_as_positive_int(doc["d1"], "d1"))
            basis2 = GegenbauerBasis.from_dimension(_as_positive_int(doc["d2"], "d2"))
            matrix_doc = doc["matrix"]
            if not isinstance(matrix_doc, list) or not matrix_doc:
                raise KernelSpecError("matrix must be a nonempty array of rows")
            width = None
            rows = []
            for i, row in enumerate(matrix_doc):
                if not isinstance(row, list) or not row:
                    raise KernelSpecError(f"matrix[{i}] must be a nonempty array of numbers")
                if width is None:
                    width = len(row)
                elif len(row) != width:
                    raise KernelSpecError(
                        f"matrix rows must have equal length: row 0 has {width}, row {i} has {len(row)}"
                    )
                rows.append([_as_number(v, f"matrix[{i}][{j}]") for j, v in enumerate(row)])
            kernel = make_ps_kernel(np.array(rows), basis1, basis2, normalize=True)
    except KernelSpecError:
        raise
    except SphereCovError as exc:
        raise KernelSpecError(f"invalid {kind} spec: {exc}") from exc
    return _apply_scale(kernel, _as_scale(doc))


def kernel_to_dict(kernel) -> dict:
    """Serialize a kernel back to the spec schema (normalized coefficients,
    total mass in "scale")."""
    if isinstance(kernel, SchoenbergSequence):
        return {
            "kind": "sphere",
            "d": kernel.basis.dimension,
            "coeffs": [float(a) for a in kernel.coeffs],
            "scale": kernel.scale_c,
        }
    if isinstance(kernel, SpaceTimeKernel):
        return {
            "kind": "sphere_time",
            "d": kernel.basis.dimension,
            "terms": [
                {"a": float(a), "charfn": {"family": cf.family, "params": cf.param_dict}}
                for a, cf in zip(kernel.weights, kernel.charfns)
            ],
            "scale": kernel.scale_c,
        }
    if isinstance(kernel, ProductSphereKernel):
        return {
            "kind": "product_spheres",
            "d1": kernel.basis1.dimension,
            "d2": kernel.basis2.dimension,
            "matrix": [[float(v) for v in row] for row in kernel.coeff_matrix],
            "scale": kernel.scale_c,
        }
    raise KernelSpecError(f"cannot serialize {type(kernel).__name__}")


def read_kernel_file(path):
    """Load and validate a kernel-spec JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise KernelSpecError(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise KernelSpecError(f"spec file {path} is not valid JSON: {exc}") from exc
    return kernel_from_dict(doc)


def write_kernel_file(kernel, path):
    """Serialize a kernel to a spec JSON file."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(kernel_to_dict(kernel), fh, indent=2)
        fh.write("\n")
