"""HLS-C template instantiation for the streaming convolution and Huffman tree kernels.

Templates are plain C text with ``string.Template`` slots. Every generated
``.c`` file also carries a ``main`` behind ``HLSR_HARNESS`` so it can be
compiled with an ordinary C compiler and checked against the Python models;
the HLS pragmas are ignored there.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from string import Template

from .errors import TemplateParamError
from .stencil import SOBEL_GX_STANDARD, SOBEL_GY_STANDARD

BIT_WIDTHS = (8, 16, 32)
UINT_TYPES = {8: "uint8_t", 16: "uint16_t", 32: "uint32_t"}


@dataclass(frozen=True)
class TemplateInfo:
    name: str
    kernel_class: str
    pipelined_loops: int
    files: tuple[str, ...]


TEMPLATES = {
    "conv2d_stream": TemplateInfo("conv2d_stream", "regular", 1, ("conv2d_stream.h", "conv2d_stream.c")),
    "huffman_tree": TemplateInfo("huffman_tree", "irregular", 2, ("huffman_tree.h", "huffman_tree.c")),
}

CANONICAL_PARAMS = {
    "conv2d_stream": {"K": 3, "width": 640, "height": 480, "pixel_bits": 8},
    "huffman_tree": {"n": 536, "symbol_bits": 16, "freq_bits": 32},
}


@dataclass(frozen=True)
class ParamError:
    param: str
    message: str


@dataclass
class GeneratedSource:
    template: str
    files: dict[str, str]
    manifest: dict = field(default_factory=dict)

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in self.files.items():
            p = out / name
            p.write_text(text)
            written.append(p)
        p = out / "manifest.json"
        p.write_text(manifest_text(self.manifest))
        written.append(p)
        return written


def manifest_text(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True) + "\n"


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _check_matrix(name, m, k, errors):
    if not isinstance(m, (list, tuple)) or len(m) != k or any(
            not isinstance(r, (list, tuple)) or len(r) != k for r in m):
        errors.append(ParamError(name, f"{name} must be a {k}x{k} integer matrix"))
        return
    for v in (v for r in m for v in r):
        if not _is_int(v) or not -128 <= v <= 127:
            errors.append(ParamError(name, f"{name} coefficients must be integers in [-128, 127]"))
            return


def _normalize(template_id, params):
    p = dict(params)
    if template_id == "conv2d_stream":
        p.setdefault("pixel_bits", 8)
        if p.get("K") == 3:
            p.setdefault("gx", [list(r) for r in SOBEL_GX_STANDARD.rows])
            p.setdefault("gy", [list(r) for r in SOBEL_GY_STANDARD.rows])
    elif template_id == "huffman_tree":
        p.setdefault("symbol_bits", 16)
        p.setdefault("freq_bits", 32)
    return p


def validate_params(template_id: str, params: dict) -> list[ParamError]:
    """Every violated constraint, empty when ``params`` are valid."""
    if template_id not in TEMPLATES:
        return [ParamError("template", f"unknown template {template_id!r}; known: {sorted(TEMPLATES)}")]
    if not isinstance(params, dict):
        return [ParamError("params", "params must be a JSON object")]
    p = _normalize(template_id, params)
    errors: list[ParamError] = []

    if template_id == "conv2d_stream":
        allowed = {"K", "width", "height", "pixel_bits", "gx", "gy"}
        k = p.get("K")
        if not _is_int(k):
            errors.append(ParamError("K", "K must be an integer"))
            k = None
        else:
            if k % 2 == 0:
                errors.append(ParamError("K", "K must be odd"))
            if k < 3:
                errors.append(ParamError("K", "K must be ≥ 3"))
        for dim in ("width", "height"):
            v = p.get(dim)
            if not _is_int(v):
                errors.append(ParamError(dim, f"{dim} must be an integer"))
            elif k is not None and v < k:
                errors.append(ParamError(dim, f"{dim} must be ≥ K ({k})"))
        if p.get("pixel_bits") not in BIT_WIDTHS:
            errors.append(ParamError("pixel_bits", f"pixel_bits must be one of {BIT_WIDTHS}"))
        for name in ("gx", "gy"):
            if name not in p:
                errors.append(ParamError(name, f"{name} is required when K != 3"))
            elif k is not None:
                _check_matrix(name, p[name], k, errors)
    else:
        allowed = {"n", "symbol_bits", "freq_bits"}
        n = p.get("n")
        sb = p.get("symbol_bits")
        if not _is_int(n):
            errors.append(ParamError("n", "n must be an integer"))
        elif n < 2:
            errors.append(ParamError("n", "n must be ≥ 2"))
        if sb not in BIT_WIDTHS:
            errors.append(ParamError("symbol_bits", f"symbol_bits must be one of {BIT_WIDTHS}"))
        elif _is_int(n) and n > 2**sb - 1:
            # the all-ones symbol value marks internal children
            errors.append(ParamError("n", f"n must be ≤ {2**sb - 1} for {sb}-bit symbols"))
        if p.get("freq_bits") not in BIT_WIDTHS:
            errors.append(ParamError("freq_bits", f"freq_bits must be one of {BIT_WIDTHS}"))

    for extra in sorted(set(p) - allowed):
        errors.append(ParamError(extra, f"unknown parameter {extra!r}"))
    return errors


def _c_matrix(m) -> str:
    return "{" + ", ".join("{" + ", ".join(str(v) for v in r) + "}" for r in m) + "}"


def _load(name: str) -> Template:
    return Template(resources.files(__package__).joinpath("templates", name + ".tmpl").read_text())


def instantiate(template_id: str, params: dict) -> GeneratedSource:
    errors = validate_params(template_id, params)
    if errors:
        raise TemplateParamError(errors)
    info = TEMPLATES[template_id]
    p = _normalize(template_id, params)

    if template_id == "conv2d_stream":
        slots = {
            "K": p["K"],
            "width": p["width"],
            "height": p["height"],
            "pix_t": UINT_TYPES[p["pixel_bits"]],
            "gx": _c_matrix(p["gx"]),
            "gy": _c_matrix(p["gy"]),
        }
    else:
        n = p["n"]
        slots = {
            "n": n,
            "num_internal": n - 1,
            "sym_t": UINT_TYPES[p["symbol_bits"]],
            "freq_t": UINT_TYPES[p["freq_bits"]],
            # all-ones address is reserved for "no parent"
            "addr_t": "uint16_t" if n - 1 < 0xFFFF else "uint32_t",
        }

    files = {name: _load(name).substitute(slots) for name in info.files}
    manifest = {
        "schema": 1,
        "template": template_id,
        "kernel_class": info.kernel_class,
        "pipelined_loops": info.pipelined_loops,
        "params": {k: p[k] for k in sorted(p)},
        "files": list(info.files),
        "harness_macro": "HLSR_HARNESS",
    }
    return GeneratedSource(template_id, files, manifest)
