"""Model file format DLPRM1.

Layout: magic bytes ``DLPRM1\\0``, a little-endian uint32 byte length,
that many bytes of UTF-8 JSON (geometry, seed, normalization stats, class
ids), then every persistent array as little-endian float64 in network
order — weights before biases, batchnorm gamma/beta/running-mean/
running-var.  Save followed by load reproduces the file bit for bit.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import ParseError
from .model import ModelSpec, Network

MAGIC = b"DLPRM1\x00"


def save_network(path: str | Path, net: Network, meta: dict | None = None) -> None:
    spec = net.spec
    header = {
        "input_length": spec.input_length,
        "num_classes": spec.num_classes,
        "filters": list(spec.filters),
        "kernels": list(spec.kernels),
        "fc": list(spec.fc),
        "pool": spec.pool,
    }
    if meta:
        overlap = set(meta) & set(header)
        if overlap:
            raise ValueError(f"meta keys collide with geometry fields: {sorted(overlap)}")
        header.update(meta)
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for arr in net.state_arrays():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_network(path: str | Path) -> tuple[Network, dict]:
    """Rebuild the network and return it with the non-geometry header fields."""
    path = Path(path)
    raw = path.read_bytes()
    if not raw.startswith(MAGIC):
        raise ParseError(f"{path}: not a DLPRM1 model file")
    offset = len(MAGIC)
    if len(raw) < offset + 4:
        raise ParseError(f"{path}: truncated header length")
    (hlen,) = struct.unpack_from("<I", raw, offset)
    offset += 4
    if len(raw) < offset + hlen:
        raise ParseError(f"{path}: truncated header")
    try:
        header = json.loads(raw[offset : offset + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: bad header: {exc}") from exc
    offset += hlen
    try:
        spec = ModelSpec(
            input_length=int(header.pop("input_length")),
            num_classes=int(header.pop("num_classes")),
            filters=tuple(header.pop("filters")),
            kernels=tuple(header.pop("kernels")),
            fc=tuple(header.pop("fc")),
            pool=int(header.pop("pool")),
        )
    except KeyError as exc:
        raise ParseError(f"{path}: header missing field {exc}") from exc
    net = Network(spec)
    arrays = []
    for slot in net.state_arrays():
        nbytes = slot.size * 8
        if len(raw) < offset + nbytes:
            raise ParseError(f"{path}: parameter block truncated")
        arrays.append(
            np.frombuffer(raw, dtype="<f8", count=slot.size, offset=offset).reshape(
                slot.shape
            )
        )
        offset += nbytes
    if offset != len(raw):
        raise ParseError(f"{path}: {len(raw) - offset} trailing bytes")
    net.load_state_arrays(arrays)
    return net, header
