"""Container files: a one-line JSON manifest followed by a raw little-endian payload.

Manifest keys: ``format_version`` (1), ``kind``, ``manifold``, ``bandwidth``,
``channels``, ``dtype`` ("f64" or "c128"), ``payload_bytes`` and, for needlet
containers, ``scales = [J0, J]``.  Complex values are stored as interleaved
``(re, im)`` float64 pairs.

Payload layouts
---------------
* ``s2-spectral`` / ``so3-spectral``: channel-major, then the flat spectral layout.
* ``s2-grid`` / ``so3-grid``: channel-major, then the rule point order.
* ``needlet``: low-pass band, then ``w1_J0, w2_J0, ..., w1_{J-1}, w2_{J-1}``,
  each band channel-major.
* ``quadrature``: points ``(n, 2 or 3)`` row-major, then the ``n`` weights.
"""
import json
import os
import tempfile

import numpy as np

from .exceptions import ContainerCorruptError, ContainerParseError
from .needlet import NeedletCoefficients, highpass_bandwidth, lowpass_bandwidth
from .quadrature import QuadratureRule, make_rule
from .signals import GridSignal, Spectrum, spectral_size

FORMAT_VERSION = 1
KINDS = ("s2-grid", "so3-grid", "s2-spectral", "so3-spectral", "needlet", "quadrature")
_DTYPES = {"f64": np.dtype("<f8"), "c128": np.dtype("<c16")}
_MAX_MANIFEST = 1 << 16


def kind_of(value):
    """Container kind for a value."""
    if isinstance(value, Spectrum):
        return f"{value.manifold}-spectral"
    if isinstance(value, GridSignal):
        return f"{value.manifold}-grid"
    if isinstance(value, NeedletCoefficients):
        return "needlet"
    if isinstance(value, QuadratureRule):
        return "quadrature"
    raise TypeError(f"cannot store {type(value).__name__} in a container")


def _needlet_manifold(value):
    bands = value.highpass_bands()
    return bands[0].manifold if bands else value.lowpass.manifold


def _encode(value):
    kind = kind_of(value)
    if kind == "quadrature":
        manifest = {"manifold": value.manifold, "bandwidth": value.bandwidth, "channels": 1, "dtype": "f64"}
        payload = np.concatenate([value.points.ravel(), value.weights]).astype("<f8")
    elif kind == "needlet":
        manifest = {"manifold": _needlet_manifold(value), "bandwidth": value.bandwidth,
                    "channels": value.channels, "dtype": "c128",
                    "scales": [value.coarse_scale, value.fine_scale]}
        if value.lowpass.manifold != manifest["manifold"]:
            manifest["lowpass_manifold"] = value.lowpass.manifold
        payload = np.concatenate([b.data.ravel() for _, b in value.bands()]).astype("<c16")
    elif kind.endswith("grid"):
        manifest = {"manifold": value.manifold, "bandwidth": value.rule.bandwidth,
                    "channels": value.channels, "dtype": "c128"}
        payload = value.samples.astype("<c16").ravel()
    else:
        manifest = {"manifold": value.manifold, "bandwidth": value.bandwidth,
                    "channels": value.channels, "dtype": "c128"}
        payload = value.data.astype("<c16").ravel()
    raw = payload.tobytes()
    manifest.update(format_version=FORMAT_VERSION, kind=kind, payload_bytes=len(raw))
    return manifest, raw


def expected_payload_bytes(manifest):
    """Payload size implied by a manifest's kind, bandwidth and channels."""
    kind, L, C = manifest["kind"], manifest["bandwidth"], manifest["channels"]
    item = _DTYPES[manifest["dtype"]].itemsize
    s2 = manifest["manifold"] == "s2"
    n_points = (2 * L + 1) * (L + 1) * (1 if s2 else 2 * L + 1)
    if kind == "quadrature":
        return n_points * (3 if s2 else 4) * item
    if kind.endswith("grid"):
        return C * n_points * item
    if kind.endswith("spectral"):
        return C * spectral_size(manifest["manifold"], L) * item
    J0, J = manifest["scales"]
    low_manifold = manifest.get("lowpass_manifold", manifest["manifold"])
    n = C * spectral_size(low_manifold, lowpass_bandwidth(J0))
    n += sum(2 * C * spectral_size(manifest["manifold"], highpass_bandwidth(j)) for j in range(J0, J))
    return n * item


def dumps(value):
    """Serialize a value to container bytes."""
    manifest, raw = _encode(value)
    head = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("ascii")
    return head + b"\n" + raw


def write_container(value, path):
    """Atomically write ``value`` to ``path`` (temp file in the same directory, then rename)."""
    data = dumps(value)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".ndlt-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_manifest(blob):
    end = blob.find(b"\n", 0, _MAX_MANIFEST)
    if end < 0:
        raise ContainerParseError("manifest line not found")
    try:
        manifest = json.loads(blob[:end].decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerParseError(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(manifest, dict):
        raise ContainerParseError("manifest must be a JSON object")
    required = {"format_version", "kind", "manifold", "bandwidth", "channels", "dtype", "payload_bytes"}
    missing = required - manifest.keys()
    if missing:
        raise ContainerParseError(f"manifest misses keys {sorted(missing)}")
    if manifest["format_version"] != FORMAT_VERSION:
        raise ContainerParseError(f"unsupported format_version {manifest['format_version']!r}")
    if manifest["kind"] not in KINDS:
        raise ContainerParseError(f"unknown kind {manifest['kind']!r}")
    if manifest["manifold"] not in ("s2", "so3") or manifest.get("lowpass_manifold", "s2") not in ("s2", "so3"):
        raise ContainerParseError("manifold must be 's2' or 'so3'")
    if manifest["kind"] != "needlet" and not manifest["kind"].startswith(manifest["manifold"]) \
            and manifest["kind"] != "quadrature":
        raise ContainerParseError("kind and manifold disagree")
    if manifest["dtype"] not in _DTYPES:
        raise ContainerParseError(f"dtype must be one of {sorted(_DTYPES)}")
    for key in ("bandwidth", "channels", "payload_bytes"):
        if not isinstance(manifest[key], int) or isinstance(manifest[key], bool) or manifest[key] < 0:
            raise ContainerParseError(f"{key} must be a non-negative integer")
    if manifest["channels"] < 1:
        raise ContainerParseError("channels must be positive")
    if manifest["kind"] == "needlet":
        scales = manifest.get("scales")
        if (not isinstance(scales, list) or len(scales) != 2
                or not all(isinstance(s, int) and not isinstance(s, bool) for s in scales)
                or not 1 <= scales[0] < scales[1] or scales[1] > 30):
            raise ContainerParseError("needlet manifest needs scales [J0, J] with 1 <= J0 < J")
    if manifest["kind"] == "quadrature" and manifest["dtype"] != "f64":
        raise ContainerParseError("quadrature containers store f64 values")
    if manifest["kind"] in ("quadrature",) or manifest["kind"].endswith("grid"):
        if manifest["bandwidth"] < 1:
            raise ContainerParseError("rule bandwidth must be positive")
    return manifest, blob[end + 1:]


def loads(blob):
    """Parse container bytes, validating every invariant."""
    manifest, raw = _parse_manifest(blob)
    if len(raw) != manifest["payload_bytes"]:
        raise ContainerCorruptError(
            f"payload has {len(raw)} bytes, manifest declares {manifest['payload_bytes']}")
    expected = expected_payload_bytes(manifest)
    if len(raw) != expected:
        raise ContainerCorruptError(f"payload has {len(raw)} bytes, layout implies {expected}")
    arr = np.frombuffer(raw, dtype=_DTYPES[manifest["dtype"]])
    if not np.all(np.isfinite(arr)):
        raise ContainerCorruptError("payload contains non-finite values")
    kind, L, C, manifold = manifest["kind"], manifest["bandwidth"], manifest["channels"], manifest["manifold"]
    if kind == "quadrature":
        rule = make_rule(manifold, L)
        d = rule.points.shape[1]
        points = arr[:rule.n_points * d].reshape(rule.n_points, d).astype(float)
        weights = arr[rule.n_points * d:].astype(float)
        return QuadratureRule(manifold, L, points, weights, rule.exactness_degree)
    data = arr.astype(np.complex128)
    if kind.endswith("grid"):
        return GridSignal(make_rule(manifold, L), data.reshape(C, -1))
    if kind.endswith("spectral"):
        return Spectrum(manifold, L, data.reshape(C, -1))
    J0, J = manifest["scales"]
    low_manifold = manifest.get("lowpass_manifold", manifold)
    pos = 0

    def take(m, bw):
        nonlocal pos
        n = C * spectral_size(m, bw)
        band = Spectrum(m, bw, data[pos:pos + n].reshape(C, -1))
        pos += n
        return band

    low = take(low_manifold, lowpass_bandwidth(J0))
    high = {}
    for j in range(J0, J):
        high[(1, j)] = take(manifold, highpass_bandwidth(j))
        high[(2, j)] = take(manifold, highpass_bandwidth(j))
    try:
        return NeedletCoefficients(manifold, J0, J, L, low, high)
    except ValueError as exc:
        raise ContainerCorruptError(str(exc)) from None


def read_container(path, kinds=None):
    """Read a container; ``kinds`` optionally restricts the accepted kinds.

    Raises
    ------
    ContainerParseError
        Malformed manifest.
    ContainerCorruptError
        Payload inconsistent with the manifest.
    ValueError
        Kind not among ``kinds``.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    value = loads(blob)
    if kinds is not None and kind_of(value) not in kinds:
        raise ValueError(f"{path}: expected a container of kind {' or '.join(kinds)}, got {kind_of(value)}")
    return value
