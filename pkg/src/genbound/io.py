"""File formats and deterministic report rendering.

JSON reports print floats with 17 significant digits and keep insertion
order, so identical invocations yield byte-identical bytes. Non-finite
floats are rendered as the strings "inf", "-inf", "nan" to stay inside
RFC-compliant JSON.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .bounds import StepCDF
from .chain import ChainSpec, validate_chain
from .deepnet import Layer, NetworkSpec, Neuron, make_sigmoid
from .empirical import FunctionClass
from .errors import ChainValidationError, FileFormatError

SCHEMA = "genbound/1"


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def render_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {render_json(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = [f"{inner}{render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    if isinstance(obj, complex):
        return render_json({"re": obj.real, "im": obj.imag}, indent)
    return json.dumps(str(obj))


def render_text(obj, prefix: str = "") -> str:
    lines = []

    def walk(node, path):
        if isinstance(node, dict):
            for k, v in node.items():
                walk(v, f"{path}.{k}" if path else str(k))
        elif isinstance(node, (list, tuple)):
            for i, v in enumerate(node):
                walk(v, f"{path}[{i}]")
        elif isinstance(node, (float, np.floating)):
            lines.append(f"{path}: {_fmt_float(float(node)).strip(chr(34))}")
        elif isinstance(node, (bool, np.bool_)):
            lines.append(f"{path}: {'true' if node else 'false'}")
        else:
            lines.append(f"{path}: {node}")

    walk(obj, prefix)
    return "\n".join(lines)


def _reject_nonfinite(rows, what: str):
    arr = np.asarray(rows, dtype=float)
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        loc = bad[0]
        if arr.ndim == 2:
            raise FileFormatError(
                f"{what}[{loc[0]}][{loc[1]}] is not finite", field=what
            )
        raise FileFormatError(f"{what}[{loc[0]}] is not finite", field=what)
    return arr


def parse_chain_doc(doc: dict) -> dict:
    """Parse {"states", "Q", "nu", optional "emission"/"labels"}."""
    for key in ("states", "Q", "nu"):
        if key not in doc:
            raise FileFormatError(f"missing required field {key!r}", field=key)
    states = doc["states"]
    Q = _reject_nonfinite(doc["Q"], "Q")
    nu = _reject_nonfinite(doc["nu"], "nu")
    spec = ChainSpec(states=states, Q=Q, nu=nu)
    violations = validate_chain(spec)
    if violations:
        raise ChainValidationError(violations)
    out = {"chain": spec}
    if "emission" in doc and doc["emission"] is not None:
        out["emission"] = _reject_nonfinite(doc["emission"], "emission")
    if "labels" in doc and doc["labels"] is not None:
        out["labels"] = list(doc["labels"])
    return out


def load_chain_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise FileFormatError(f"{path}: {e}") from e
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    return parse_chain_doc(doc)


def chain_doc(spec: ChainSpec, emission=None, labels=None) -> dict:
    doc = {
        "states": list(map(_plain_state, spec.states)),
        "Q": [[float(x) for x in row] for row in spec.Q],
        "nu": [float(x) for x in spec.nu],
    }
    if emission is not None:
        doc["emission"] = [[float(x) for x in row] for row in np.asarray(emission)]
    if labels is not None:
        doc["labels"] = list(labels)
    return doc


def _plain_state(s):
    if isinstance(s, (int, float, str, bool)):
        return s
    return str(s)


def parse_function_class_doc(doc: dict) -> FunctionClass:
    if "functions" not in doc:
        raise FileFormatError("missing required field 'functions'", field="functions")
    funcs = doc["functions"]
    if not funcs:
        raise FileFormatError("'functions' must be nonempty", field="functions")
    names = []
    rows = []
    for i, f in enumerate(funcs):
        if "values" not in f:
            raise FileFormatError(f"functions[{i}] lacks 'values'", field="functions")
        names.append(f.get("name", f"f{i}"))
        rows.append(f["values"])
    values = _reject_nonfinite(rows, "values")
    labeled = bool(doc.get("labeled", False))
    return FunctionClass(
        values=values,
        names=tuple(names),
        M=doc.get("M"),
        labeled=labeled,
        n_labels=doc.get("n_labels") if labeled else None,
    )


def load_function_class(path: str) -> FunctionClass:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise FileFormatError(f"{path}: {e}") from e
    try:
        return parse_function_class_doc(doc)
    except ValueError as e:
        raise FileFormatError(f"{path}: {e}") from e


def function_class_doc(fc: FunctionClass) -> dict:
    doc = {
        "M": fc.M,
        "labeled": fc.labeled,
        "functions": [
            {"name": name, "values": [float(x) for x in row]}
            for name, row in zip(fc.names, fc.values)
        ],
    }
    if fc.labeled:
        doc["n_labels"] = fc.n_labels
    return doc


def parse_network_doc(doc: dict, base: FunctionClass | None = None) -> NetworkSpec:
    if base is None:
        base_doc = doc.get("base")
        if base_doc is None:
            raise FileFormatError("network lacks 'base' function class", field="base")
        if isinstance(base_doc, str):
            base = load_function_class(base_doc)
        else:
            base = parse_function_class_doc(base_doc)
    layers = []
    if not doc.get("layers"):
        raise FileFormatError("network lacks 'layers'", field="layers")
    avail = base.size
    for j, layer_doc in enumerate(doc["layers"], start=1):
        neurons = []
        for nd in layer_doc.get("neurons", []):
            w = nd.get("w")
            if w is None:
                raise FileFormatError(f"layer {j}: neuron lacks 'w'", field="layers")
            taps = nd.get("taps")
            if taps is None:
                taps = list(range(len(w)))
                if len(w) > avail:
                    raise FileFormatError(
                        f"layer {j}: default taps need {len(w)} signals, only {avail} exist",
                        field="layers",
                    )
            neurons.append(Neuron(w=w, taps=taps))
        if not neurons:
            raise FileFormatError(f"layer {j} has no neurons", field="layers")
        sig = make_sigmoid(
            layer_doc.get("sigmoid", "tanh"),
            xs=layer_doc.get("xs"),
            ys=layer_doc.get("ys"),
        )
        layers.append(
            Layer(
                neurons=tuple(neurons),
                sigmoid=sig,
                L=float(layer_doc.get("L", 1.0)),
                budget=layer_doc.get("budget"),
            )
        )
        avail += len(neurons)
    try:
        return NetworkSpec(base=base, layers=tuple(layers))
    except ValueError as e:
        raise FileFormatError(str(e), field="layers") from e


def load_network(path: str) -> NetworkSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise FileFormatError(f"{path}: {e}") from e
    return parse_network_doc(doc)


def load_cdf(path: str) -> StepCDF:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise FileFormatError(f"{path}: {e}") from e
    try:
        if "samples" in doc:
            samples = _reject_nonfinite(doc["samples"], "samples")
            weights = None
            if "weights" in doc and doc["weights"] is not None:
                weights = _reject_nonfinite(doc["weights"], "weights")
            return StepCDF.from_samples(samples, weights)
        if "points" in doc and "cdf" in doc:
            return StepCDF(
                xs=_reject_nonfinite(doc["points"], "points"),
                ps=_reject_nonfinite(doc["cdf"], "cdf"),
            )
    except ValueError as e:
        raise FileFormatError(f"{path}: {e}") from e
    raise FileFormatError(f"{path}: need either 'samples' or 'points'+'cdf'")
