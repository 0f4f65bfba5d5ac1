"""Line-oriented text format for chains, pseudotrajectories and shadow certificates.

A document is a header (operator rendering, delta, length), one point per
line as sparse ``index:value`` pairs, an optional certificate footer and a
closing ``hash:`` line with the SHA-256 of everything above it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .chain import Chain, verify_chain
from .core import DomainError
from .operators import DirectSum, OperatorDescriptor
from .shadowing import Pseudotrajectory, ShadowCertificate, make_pseudotrajectory
from .spaces import CoordinateVector, SumVector

MAGIC = "# linshadow chain v1"


def _num(z: complex) -> str:
    z = complex(z)
    return repr(z.real) if z.imag == 0 else repr(z)


def format_vector(x) -> str:
    if isinstance(x, SumVector):
        return " | ".join(format_vector(p) for p in x.parts)
    if not isinstance(x, CoordinateVector):
        raise DomainError("only coordinate vectors and direct-sum vectors serialize")
    return " ".join(f"{int(i)}:{_num(v)}" for i, v in zip(x.indices, x.values)) or "0"


def _parse_coords(text: str, space) -> CoordinateVector:
    text = text.strip()
    if text in ("", "0"):
        return CoordinateVector.zero(space)
    coords: dict[int, complex] = {}
    for tok in text.split():
        i, _, v = tok.partition(":")
        if not _:
            raise DomainError(f"malformed coordinate {tok!r}")
        coords[int(i)] = complex(v)
    return CoordinateVector.from_mapping(space, coords)


def parse_vector(text: str, T: OperatorDescriptor):
    if isinstance(T, DirectSum):
        parts = text.split("|")
        if len(parts) != len(T.children):
            raise DomainError("direct-sum vector arity mismatch")
        return SumVector(tuple(parse_vector(p, c) for p, c in zip(parts, T.children)), T.space)
    return _parse_coords(text, T.space)


def content_hash(body: str) -> str:
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


def _document(kind: str, T: OperatorDescriptor, delta: float, points, extra: list[str]) -> str:
    lines = [MAGIC, f"kind: {kind}", f"operator: {T.render()}", f"space: {T.space.render()}",
             f"delta: {delta!r}", f"length: {len(points)}"]
    lines += extra
    lines += [f"point {j}: {format_vector(p)}" for j, p in enumerate(points)]
    return "\n".join(lines) + "\n"


def _footer(cert: ShadowCertificate | None) -> list[str]:
    if cert is None:
        return []
    err = cert.max_error
    lo, hi = (err.lo, err.hi) if hasattr(err, "lo") else (err, err)
    out = [f"certificate.epsilon: {cert.epsilon!r}",
           f"certificate.horizon: {cert.horizon[0]} {cert.horizon[1]}",
           f"certificate.max_error: [{lo!r}, {hi!r}]",
           f"certificate.periodic_residual: {cert.periodic_residual!r}",
           f"certificate.point: {format_vector(cert.point)}"]
    for key in sorted(cert.notes):
        val = cert.notes[key]
        if isinstance(val, (int, float, str)):
            out.append(f"certificate.note.{key}: {val!r}")
    return out


def _seal(body: str) -> str:
    return body + f"hash: {content_hash(body)}\n"


def chain_to_text(chain: Chain) -> str:
    return _seal(_document("chain", chain.operator, chain.delta, chain.points, []))


def pseudotrajectory_to_text(pt: Pseudotrajectory, certificate: ShadowCertificate | None = None) -> str:
    extra = [f"start: {pt.start}", f"period: {pt.period if pt.period is not None else '-'}"]
    body = _document("pseudotrajectory", pt.operator, pt.delta, pt.points, extra)
    return _seal(body + "\n".join(_footer(certificate)) + ("\n" if certificate else ""))


@dataclass(frozen=True)
class Document:
    kind: str
    header: dict
    points: tuple
    certificate: dict
    digest: str


def read_document(text: str, T: OperatorDescriptor) -> Document:
    """Parse and hash-check a document; points are rebuilt in ``T``'s space."""
    if not text.startswith(MAGIC + "\n"):
        raise DomainError("not a linshadow chain document")
    body, sep, tail = text.rpartition("hash: ")
    if not sep:
        raise DomainError("missing content hash")
    digest = tail.strip()
    if content_hash(body) != digest:
        raise DomainError("content hash mismatch")
    header: dict = {}
    points: dict[int, object] = {}
    cert: dict = {}
    for line in body.splitlines()[1:]:
        key, _, val = line.partition(": ")
        if key.startswith("point "):
            points[int(key[6:])] = parse_vector(val, T)
        elif key.startswith("certificate."):
            cert[key[len("certificate."):]] = val
        else:
            header[key] = val
    if header.get("operator") != T.render():
        raise DomainError("document belongs to a different operator")
    n = int(header["length"])
    if sorted(points) != list(range(n)):
        raise DomainError("point list incomplete")
    if "point" in cert:
        cert["point"] = parse_vector(cert["point"], T)
    return Document(header.get("kind", "chain"), header, tuple(points[j] for j in range(n)), cert, digest)


def chain_from_text(text: str, T: OperatorDescriptor) -> Chain:
    """Parse a chain document and re-verify it as a delta-chain of ``T``."""
    doc = read_document(text, T)
    out = verify_chain(T, list(doc.points), float(doc.header["delta"]))
    if not isinstance(out, Chain):
        raise DomainError(f"stored chain fails verification at step {out.index}")
    return out


def pseudotrajectory_from_text(text: str, T: OperatorDescriptor) -> Pseudotrajectory:
    doc = read_document(text, T)
    period = doc.header.get("period", "-")
    return make_pseudotrajectory(T, list(doc.points), float(doc.header["delta"]),
                                 start=int(doc.header.get("start", 0)),
                                 period=None if period == "-" else int(period), provenance="loaded")


__all__ = ["chain_to_text", "chain_from_text", "pseudotrajectory_to_text", "pseudotrajectory_from_text",
           "read_document", "Document", "content_hash", "format_vector", "parse_vector"]
