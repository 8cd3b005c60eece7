"""JSON-lines cache of certified fundamental units.

One record per line.  A record is trusted only when the tool version that
wrote it and the integral basis it was computed over both match the caller's;
anything else is a miss, so a version bump or a basis change silently
invalidates old entries instead of corrupting results.  Unreadable lines are
warned about and skipped, never fatal.

Appends take an exclusive flock and write the whole line in one call, so
concurrent writers cannot interleave partial records.
"""

from __future__ import annotations

import fcntl
import json
import logging
import os
from fractions import Fraction

from .quartic import QuarticField, UnitCert, unit_log

log = logging.getLogger(__name__)

TOOL_VERSION = "qseven/0.1.0"

# relative slack allowed between a cached regulator and one recomputed from
# the cached coordinates; a mismatch beyond this marks the record poisoned
_REG_RTOL = 1e-9


def _frac_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def basis_fingerprint(field: QuarticField) -> list[list[str]]:
    """The integral basis as exact fraction strings, the cache's match key."""
    return [[_frac_str(e) for e in row] for row in field.basis]


def encode(field: QuarticField, cert: UnitCert) -> dict:
    """The JSON record a store would append, for callers that serialize the
    write through a separate aggregator task."""
    return {
        "q": cert.q,
        "version": TOOL_VERSION,
        "basis": basis_fingerprint(field),
        "unit": [str(c) for c in cert.u],
        "regulator": float(cert.regulator).hex(),
        "radius": float(cert.enumeration_radius).hex(),
        "certified": bool(cert.certified),
    }


def _decode(rec: dict) -> UnitCert:
    coords = tuple(int(s) for s in rec["unit"])
    if len(coords) != 4:
        raise ValueError("unit coordinate vector must have length 4")
    return UnitCert(
        q=int(rec["q"]),
        u=coords,
        regulator=float.fromhex(rec["regulator"]),
        certified=bool(rec["certified"]),
        enumeration_radius=float.fromhex(rec["radius"]),
    )


def _validate(field: QuarticField, cert: UnitCert) -> bool:
    """Cheap consistency check: the stored coordinates reproduce the stored
    regulator.  Catches hand-edited or misfiled records without a rescan."""
    try:
        lam = abs(unit_log(field, cert.u, bits=128))
    except (ValueError, ZeroDivisionError, OverflowError):
        return False
    ref = abs(cert.regulator)
    return abs(float(lam) - ref) <= _REG_RTOL * max(1.0, ref)


def append_record(path: str, rec: dict) -> None:
    """Append one record; the single write under an exclusive lock keeps
    concurrent appends one-record-per-line."""
    line = json.dumps(rec, separators=(",", ":")) + "\n"
    with open(path, "a", encoding="utf-8") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def store(path: str, field: QuarticField, cert: UnitCert) -> None:
    append_record(path, encode(field, cert))


def lookup(path: str, q: int, field: QuarticField) -> UnitCert | None:
    """Most recent matching record, or None.

    A match requires the same q, the same tool version and the same integral
    basis; the decoded certificate must also pass the regulator recheck.
    """
    if not path or not os.path.exists(path):
        return None
    want = basis_fingerprint(field)
    with open(path, "r", encoding="utf-8") as fh:
        fcntl.flock(fh, fcntl.LOCK_SH)
        try:
            lines = fh.readlines()
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)
    hit = None
    for lineno, raw in enumerate(lines, start=1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            rec = json.loads(raw)
            if not isinstance(rec, dict) or rec.get("q") != q:
                continue
            if rec.get("version") != TOOL_VERSION or rec.get("basis") != want:
                continue
            cert = _decode(rec)
        except (ValueError, KeyError, TypeError):
            log.warning("cache %s line %d unreadable, skipping", path, lineno)
            continue
        if not _validate(field, cert):
            log.warning("cache %s line %d fails the regulator recheck", path, lineno)
            continue
        hit = cert
    return hit
