"""Deterministic checkpoint container.

Layout: 4-byte magic, 8-byte little-endian header length, canonical JSON
header (sorted keys), then raw little-endian tensor bytes in header order.
Identical parameters always serialize to identical bytes, so file hashes
can stand in for parameter equality.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Optional

import numpy as np
import torch

from .network import PolicyNet, PolicySpec

MAGIC = b"TTA1"
FORMAT_VERSION = 1

_DTYPES = {
    torch.float32: "<f4",
    torch.float64: "<f8",
    torch.int64: "<i8",
    torch.int32: "<i4",
    torch.uint8: "|u1",
    torch.bool: "|b1",
}
_TORCH_DTYPES = {v: k for k, v in _DTYPES.items()}


class CheckpointError(ValueError):
    pass


def save_checkpoint(path: str | Path, net: PolicyNet, extra: Optional[dict] = None) -> None:
    state = net.state_dict()
    names = sorted(state)
    tensors = []
    blobs = []
    for name in names:
        t = state[name].detach().cpu().contiguous()
        if t.dtype not in _DTYPES:
            raise CheckpointError(f"unsupported tensor dtype {t.dtype} for {name}")
        code = _DTYPES[t.dtype]
        arr = t.numpy().astype(np.dtype(code), copy=False)
        blob = arr.tobytes()
        tensors.append({"name": name, "shape": list(t.shape), "dtype": code, "nbytes": len(blob)})
        blobs.append(blob)
    header = {
        "format_version": FORMAT_VERSION,
        "spec": net.spec.to_dict(),
        "tensors": tensors,
        "extra": extra or {},
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(head)))
        f.write(head)
        for blob in blobs:
            f.write(blob)


def _header_and_offset(path: str | Path) -> tuple[dict, int]:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != MAGIC:
            raise CheckpointError(f"bad magic {magic!r} in {path}")
        (head_len,) = struct.unpack("<Q", f.read(8))
        header = json.loads(f.read(head_len).decode("utf-8"))
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"format_version {header.get('format_version')} != {FORMAT_VERSION} in {path}"
        )
    return header, 4 + 8 + head_len


def read_header(path: str | Path) -> dict:
    return _header_and_offset(path)[0]


def load_checkpoint(path: str | Path, expected_spec: Optional[PolicySpec] = None) -> tuple[PolicyNet, dict]:
    header, offset = _header_and_offset(path)
    spec = PolicySpec.from_dict(header["spec"])
    if expected_spec is not None and spec != expected_spec:
        raise CheckpointError(f"checkpoint spec {spec} does not match expected {expected_spec}")
    net = PolicyNet(spec)
    state = {}
    with open(path, "rb") as f:
        f.seek(offset)
        for meta in header["tensors"]:
            raw = f.read(meta["nbytes"])
            if len(raw) != meta["nbytes"]:
                raise CheckpointError(f"truncated tensor {meta['name']} in {path}")
            arr = np.frombuffer(raw, dtype=np.dtype(meta["dtype"])).reshape(meta["shape"])
            state[meta["name"]] = torch.from_numpy(arr.copy()).to(_TORCH_DTYPES[meta["dtype"]])
    missing = set(net.state_dict()) - set(state)
    extra_keys = set(state) - set(net.state_dict())
    if missing or extra_keys:
        raise CheckpointError(f"state mismatch: missing={sorted(missing)} extra={sorted(extra_keys)}")
    net.load_state_dict(state)
    return net, header.get("extra", {})
