"""Deed rendering: feature values -> plain-text defense documents."""

from __future__ import annotations

from pathlib import Path

from equarent.casegen.schema import CaseRecord, FeatureSchema, FeatureSpec


class RenderError(ValueError):
    """Template placeholder that no feature value resolves."""


def format_currency(value: float) -> str:
    """Italian-style amount: 5600 -> ``5.600,00``."""
    grouped = f"{float(value):,.2f}"  # 5,600.00
    return grouped.replace(",", "\x00").replace(".", ",").replace("\x00", ".")


def format_percent(value: float) -> str:
    """Fraction -> percent text: 0.85 -> ``85%``, 0.125 -> ``12,5%``."""
    pct = float(value) * 100.0
    nearest = round(pct)
    if abs(pct - nearest) < 1e-9:
        return f"{int(nearest)}%"
    text = f"{pct:.2f}".rstrip("0").rstrip(".")
    return text.replace(".", ",") + "%"


def _pluralize(count: int, noun: str) -> str:
    singular = noun[:-1] if noun.endswith("s") else noun
    return f"{count} {singular}" if count == 1 else f"{count} {noun}"


def format_value(spec: FeatureSpec, value) -> str:
    """Deed text for one feature value, per kind and unit."""
    if spec.kind == "boolean":
        flag = bool(value)
        return spec.render.get(flag, "yes" if flag else "no")
    if spec.kind == "categorical":
        return spec.render.get(value, str(value))
    if spec.kind == "percent":
        return format_percent(value)
    if spec.kind == "integer":
        count = int(value)
        if spec.unit in ("months", "years"):
            return _pluralize(count, spec.unit)
        return str(count)
    # numeric
    if spec.unit == "EUR":
        return f"{format_currency(value)} euros"
    return format_currency(value)


def render_document(schema: FeatureSchema, case: CaseRecord) -> str:
    """Render one case as a plain-text defense deed.

    Every feature appears exactly once via its template placeholder;
    the document ends with the two decision alternatives verbatim.
    """
    rendered = {}
    for spec in schema.features:
        if spec.id in case.values:
            rendered[spec.id] = format_value(spec, case.values[spec.id])
    try:
        return schema.document_template.format(**rendered)
    except (KeyError, IndexError) as exc:
        raise RenderError(f"unresolved placeholder {{{exc.args[0]}}}") from exc


def write_documents(schema: FeatureSchema, cases: list[CaseRecord], out_dir: str | Path) -> list[Path]:
    """Write one ``<case_id>.txt`` per case; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for case in cases:
        path = out_dir / f"{case.case_id}.txt"
        path.write_text(render_document(schema, case), encoding="utf-8")
        paths.append(path)
    return paths
