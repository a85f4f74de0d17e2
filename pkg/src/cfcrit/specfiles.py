"""Key-value text format for theta/psi/phi specifications.

One `key = value` pair per line, `#` comments, integers and rationals as
decimal strings (rationals as "p/q") so arbitrary-precision parameters
never pass through floats.  The `kind` key discriminates.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .cf import DEFAULT_BIT_CAP, SpecError, ThetaSpec
from .sequences import PhiSpec, PsiSpec


def _parse_kv(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _ints(field: str, s: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in s.replace(",", " ").split())
    except ValueError as e:
        raise SpecError(f"field {field!r}: expected integers, got {s!r}") from e


def _fracs(field: str, s: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(tok) for tok in s.replace(",", " ").split())
    except (ValueError, ZeroDivisionError) as e:
        raise SpecError(f"field {field!r}: expected rationals, got {s!r}") from e


def parse_theta(text: str) -> ThetaSpec:
    kv = _parse_kv(text)
    kind = kv.get("kind")
    if kind is None:
        raise SpecError("field 'kind': missing")
    if kind == "explicit":
        return ThetaSpec(kind=kind, quotients=_ints("quotients", kv.get("quotients", "")))
    if kind == "periodic":
        return ThetaSpec(
            kind=kind,
            preperiod=_ints("preperiod", kv.get("preperiod", "")),
            period=_ints("period", kv.get("period", "")),
        )
    if kind == "e_pattern":
        return ThetaSpec(kind=kind)
    if kind == "growth_rule":
        return ThetaSpec(
            kind=kind,
            rule=kv.get("rule", ""),
            preperiod=_ints("preperiod", kv.get("preperiod", "")),
            bit_cap=int(kv.get("bit_cap", DEFAULT_BIT_CAP)),
        )
    raise SpecError(f"field 'kind': unknown value {kind!r}")


def format_theta(spec: ThetaSpec) -> str:
    lines = [f"kind = {spec.kind}"]
    if spec.kind == "explicit":
        lines.append("quotients = " + " ".join(map(str, spec.quotients)))
    elif spec.kind == "periodic":
        lines.append("preperiod = " + " ".join(map(str, spec.preperiod)))
        lines.append("period = " + " ".join(map(str, spec.period)))
    elif spec.kind == "growth_rule":
        lines.append(f"rule = {spec.rule}")
        lines.append("preperiod = " + " ".join(map(str, spec.preperiod)))
        lines.append(f"bit_cap = {spec.bit_cap}")
    return "\n".join(lines) + "\n"


def parse_psi(text: str) -> PsiSpec:
    kv = _parse_kv(text)
    kind = kv.get("kind")
    if kind is None:
        raise SpecError("field 'kind': missing")
    if kind == "closed_form":
        return PsiSpec(
            kind=kind,
            family=kv.get("family", ""),
            c=Fraction(kv.get("c", "1")),
        )
    if kind == "step":
        return PsiSpec(
            kind=kind,
            breakpoints=_ints("breakpoints", kv.get("breakpoints", "")),
            values=_fracs("values", kv.get("values", "")),
        )
    if kind == "phi_dual":
        return PsiSpec(kind=kind, phi=parse_phi(text, prefix="phi_"))
    raise SpecError(f"field 'kind': unknown psi value {kind!r}")


def format_psi(psi: PsiSpec) -> str:
    if psi.kind == "closed_form":
        return f"kind = closed_form\nfamily = {psi.family}\nc = {psi.c}\n"
    if psi.kind == "step":
        return (
            "kind = step\n"
            "breakpoints = " + " ".join(map(str, psi.breakpoints)) + "\n"
            "values = " + " ".join(str(Fraction(v)) for v in psi.values) + "\n"
        )
    return "kind = phi_dual\n" + format_phi(psi.phi, prefix="phi_")


def parse_phi(text: str, prefix: str = "") -> PhiSpec:
    kv = _parse_kv(text)
    kind = kv.get(prefix + "kind") if prefix else kv.get("kind")
    if kind is None:
        raise SpecError(f"field '{prefix}kind': missing")
    if kind == "closed_form":
        return PhiSpec(
            kind=kind,
            family=kv.get(prefix + "family", ""),
            c=float(Fraction(kv.get(prefix + "c", "1"))),
        )
    if kind == "step":
        return PhiSpec(
            kind=kind,
            breakpoints=_ints(prefix + "breakpoints", kv.get(prefix + "breakpoints", "")),
            values=tuple(float(v) for v in _fracs(prefix + "values", kv.get(prefix + "values", ""))),
        )
    raise SpecError(f"field '{prefix}kind': unknown phi value {kind!r}")


def format_phi(phi: PhiSpec, prefix: str = "") -> str:
    if phi.kind == "closed_form":
        return (
            f"{prefix}kind = closed_form\n"
            f"{prefix}family = {phi.family}\n"
            f"{prefix}c = {phi.c!r}\n"
        )
    if phi.kind == "step":
        return (
            f"{prefix}kind = step\n"
            f"{prefix}breakpoints = " + " ".join(map(str, phi.breakpoints)) + "\n"
            f"{prefix}values = " + " ".join(repr(v) for v in phi.values) + "\n"
        )
    raise SpecError("cannot serialize a psi-dual phi; serialize the psi instead")


def load_theta(path) -> ThetaSpec:
    return parse_theta(Path(path).read_text())


def load_psi(path) -> PsiSpec:
    return parse_psi(Path(path).read_text())


def load_phi(path) -> PhiSpec:
    return parse_phi(Path(path).read_text())


def save(path, text: str):
    Path(path).write_text(text)
