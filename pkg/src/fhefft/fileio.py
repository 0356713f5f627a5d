"""File containers: parameters, keys, encrypted signals, plain signals, PGM.

Parameter and key files are versioned JSON; matrices travel as base64 of
little-endian 64-bit integers, row major.

Encrypted signals use a binary container:

    bytes 0..3    magic ``EFT1``
    bytes 4..7    container version, u32 little-endian
    bytes 8..11   header length H, u32 little-endian
    bytes 12..    UTF-8 JSON header of H bytes, then the payload

The header records the scheme parameters and their digest, the fixed
format, signal dims, and one NAND level per ciphertext.  The payload is
the bit matrices of every ciphertext packed 8 bits per byte, row major:
points in signal order, real word then imaginary word, word bits LSB
first.  Plain signals are text, one ``re,im`` pair per line, with an
optional ``# fhefft`` metadata comment carrying dims and format.
"""

from __future__ import annotations

import base64
import json
import math
import struct
from dataclasses import dataclass

import numpy as np

from .arith import FixedFormat, FixedWord
from .errors import ParseError, UsageError
from .fft import ComplexFixed, SignalBuffer
from .fhe import Ciphertext, KeyPair, SchemeParams

MAGIC = b"EFT1"
CONTAINER_VERSION = 1


def params_to_dict(params: SchemeParams) -> dict:
    return {"n": params.n, "q": params.q, "m": params.m,
            "noise_bound": params.noise_bound, "depth_budget": params.depth_budget}


def params_from_dict(d: dict, path=None) -> SchemeParams:
    try:
        return SchemeParams(n=int(d["n"]), q=int(d["q"]), m=int(d["m"]),
                            noise_bound=int(d["noise_bound"]),
                            depth_budget=int(d["depth_budget"]))
    except KeyError as exc:
        raise ParseError(f"missing parameter field {exc}", path=path) from exc


def write_params(path, params: SchemeParams):
    payload = {"format": "fhefft-params-v1", **params_to_dict(params)}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_params(path) -> SchemeParams:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), path=path, line=exc.lineno) from exc
    return params_from_dict(data, path=path)


def _encode_matrix(arr: np.ndarray) -> dict:
    return {"shape": list(arr.shape),
            "data": base64.b64encode(arr.astype("<i8").tobytes()).decode()}


def _decode_matrix(d: dict, path=None) -> np.ndarray:
    try:
        raw = base64.b64decode(d["data"])
        return np.frombuffer(raw, dtype="<i8").reshape(d["shape"]).astype(np.int64)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad matrix field: {exc}", path=path) from exc


def write_keys(path, params: SchemeParams, keys: KeyPair):
    payload = {
        "format": "fhefft-keys-v1",
        "params": params_to_dict(params),
        "public_key": _encode_matrix(keys.public_key),
        "secret_key": _encode_matrix(keys.secret_key),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def read_keys(path) -> tuple[SchemeParams, KeyPair]:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), path=path, line=exc.lineno) from exc
    if data.get("format") != "fhefft-keys-v1":
        raise ParseError(f"not a key file (format={data.get('format')!r})", path=path)
    params = params_from_dict(data["params"], path=path)
    return params, KeyPair(public_key=_decode_matrix(data["public_key"], path),
                           secret_key=_decode_matrix(data["secret_key"], path))


# -- encrypted signal container ----------------------------------------------

def write_ciphertext_signal(path, params: SchemeParams, engine,
                            signal: SignalBuffer, fmt: FixedFormat):
    """Serialize every word of a signal buffer through engine.export_ct."""
    cts, levels = [], []
    for pt in signal.points:
        for word in (pt.re, pt.im):
            for handle in word.bits:
                ct = engine.export_ct(handle)
                cts.append(ct)
                levels.append(ct.level)
    n_ct = params.n_ct
    header = {
        "kind": "fhefft-signal",
        "params": params_to_dict(params),
        "params_digest": params.digest(),
        "fixed_format": {"total_bits": fmt.total_bits, "frac_bits": fmt.frac_bits},
        "dims": list(signal.dims) if isinstance(signal.dims, tuple) else signal.dims,
        "points": len(signal.points),
        "ct_side": n_ct,
        "levels": levels,
    }
    head = json.dumps(header).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", CONTAINER_VERSION, len(head)))
        fh.write(head)
        for ct in cts:
            fh.write(np.packbits(ct.matrix.astype(np.uint8).ravel()).tobytes())


def _read_container_header(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise ParseError("not an encrypted-signal container (bad magic)",
                         path=path, offset=0)
    version, head_len = struct.unpack("<II", blob[4:12])
    if version != CONTAINER_VERSION:
        raise ParseError(f"unsupported container version {version}", path=path, offset=4)
    try:
        header = json.loads(blob[12:12 + head_len])
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad container header: {exc}", path=path, offset=12) from exc
    return header, blob[12 + head_len:]


def read_ciphertext_params(path) -> SchemeParams:
    """Scheme parameters recorded in a container, without loading matrices."""
    header, _ = _read_container_header(path)
    params = params_from_dict(header["params"], path=path)
    if params.digest() != header["params_digest"]:
        raise ParseError("parameter digest mismatch", path=path)
    return params


def read_ciphertext_signal(path, engine) -> tuple[SignalBuffer, FixedFormat]:
    """Load an encrypted signal onto an FHE engine bound to matching params."""
    header, payload = _read_container_header(path)
    params = params_from_dict(header["params"], path=path)
    if params.digest() != header["params_digest"]:
        raise ParseError("parameter digest mismatch", path=path)
    if engine.scheme.params != params:
        raise UsageError(
            f"engine parameters {engine.scheme.params} do not match the file's {params}")
    fmt = FixedFormat(header["fixed_format"]["total_bits"],
                      header["fixed_format"]["frac_bits"])
    n_ct = header["ct_side"]
    stride = math.ceil(n_ct * n_ct / 8)
    expected = header["points"] * 2 * fmt.total_bits
    if len(payload) != expected * stride:
        raise ParseError(
            f"payload holds {len(payload)} bytes, expected {expected * stride}",
            path=path)

    levels = header["levels"]
    handles = []
    for idx in range(expected):
        bits = np.unpackbits(
            np.frombuffer(payload[idx * stride:(idx + 1) * stride], dtype=np.uint8))
        matrix = bits[:n_ct * n_ct].reshape(n_ct, n_ct).astype(np.float64)
        handles.append(engine.import_ct(
            Ciphertext(matrix=matrix, level=int(levels[idx]))))

    points = []
    per_word = fmt.total_bits
    for p in range(header["points"]):
        base = p * 2 * per_word
        re = FixedWord(tuple(handles[base:base + per_word]), fmt)
        im = FixedWord(tuple(handles[base + per_word:base + 2 * per_word]), fmt)
        points.append(ComplexFixed(re, im))
    dims = header["dims"]
    dims = tuple(dims) if isinstance(dims, list) else int(dims)
    return SignalBuffer(tuple(points), dims), fmt


# -- plain signals -------------------------------------------------------------

@dataclass(frozen=True)
class SignalMeta:
    dims: object = None
    total_bits: int | None = None
    frac_bits: int | None = None


def write_signal_text(path, values, dims=None, fmt: FixedFormat | None = None):
    """One `re,im` pair per line, row major for 2D dims."""
    arr = np.asarray(values, dtype=complex).ravel()
    with open(path, "w") as fh:
        meta = []
        if dims is not None:
            meta.append("dims=" + ("x".join(str(d) for d in dims)
                                   if isinstance(dims, tuple) else str(dims)))
        if fmt is not None:
            meta.append(f"bits={fmt.total_bits}")
            meta.append(f"frac={fmt.frac_bits}")
        if meta:
            fh.write("# fhefft " + " ".join(meta) + "\n")
        for v in arr:
            fh.write(f"{float(v.real)!r},{float(v.imag)!r}\n")


def read_signal_text(path) -> tuple[np.ndarray, SignalMeta]:
    values = []
    meta = SignalMeta()
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                if text.startswith("# fhefft"):
                    meta = _parse_meta(text, path, lineno)
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise ParseError(f"expected `re,im`, got {text!r}",
                                 path=path, line=lineno)
            try:
                values.append(complex(float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise ParseError(str(exc), path=path, line=lineno) from exc
    if not values:
        raise ParseError("no signal points found", path=path)
    return np.array(values, dtype=complex), meta


def _parse_meta(text, path, lineno) -> SignalMeta:
    dims = bits = frac = None
    for token in text.split()[2:]:
        key, _, val = token.partition("=")
        try:
            if key == "dims":
                dims = tuple(int(d) for d in val.split("x"))
                dims = dims[0] if len(dims) == 1 else dims
            elif key == "bits":
                bits = int(val)
            elif key == "frac":
                frac = int(val)
        except ValueError as exc:
            raise ParseError(f"bad metadata token {token!r}",
                             path=path, line=lineno) from exc
    return SignalMeta(dims=dims, total_bits=bits, frac_bits=frac)


# -- PGM images -----------------------------------------------------------------

def read_pgm(path) -> np.ndarray:
    """Grayscale image as floats in [0, 1] (P2 ascii or P5 binary)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    tokens, pos = [], 0
    while len(tokens) < 4 and pos < len(blob):
        # comments run to end of line; whitespace separates header tokens
        if blob[pos:pos + 1] == b"#":
            pos = blob.index(b"\n", pos) + 1
            continue
        if blob[pos:pos + 1].isspace():
            pos += 1
            continue
        end = pos
        while end < len(blob) and not blob[end:end + 1].isspace():
            end += 1
        tokens.append(blob[pos:end])
        pos = end
    if len(tokens) < 4 or tokens[0] not in (b"P2", b"P5"):
        raise ParseError("not a P2/P5 PGM image", path=path, offset=0)
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise ParseError(f"bad PGM header: {exc}", path=path, offset=0) from exc
    if maxval < 1:
        raise ParseError("PGM maxval must be positive", path=path)
    if tokens[0] == b"P2":
        try:
            data = np.array(blob[pos:].split(), dtype=np.int64)
        except ValueError as exc:
            raise ParseError(f"bad P2 raster: {exc}", path=path, offset=pos) from exc
    else:
        pos += 1  # single whitespace after maxval
        if maxval < 256:
            data = np.frombuffer(blob[pos:pos + width * height], dtype=np.uint8)
        else:
            data = np.frombuffer(blob[pos:pos + 2 * width * height],
                                 dtype=">u2")
        data = data.astype(np.int64)
    if data.size != width * height:
        raise ParseError(f"raster holds {data.size} pixels, expected "
                         f"{width * height}", path=path, offset=pos)
    return data.reshape(height, width) / float(maxval)
