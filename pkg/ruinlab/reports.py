"""
Escritura de reportes: JSON, tablas CSV y summary.md

Con timestamp desactivado la salida no depende del reloj ni del número de
hilos, de modo que dos corridas con la misma semilla son idénticas byte a byte.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Mapping, Sequence

from jinja2 import Environment, FileSystemLoader, StrictUndefined

logger = logging.getLogger(__name__)

TEMPLATES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "templates")

templates = Environment(
    loader=FileSystemLoader(TEMPLATES_DIR),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)


def _fmt(value: Any) -> str:
    """Número con repr (ida y vuelta exacta); None como celda vacía"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


templates.filters["fmt"] = _fmt


def generated_at() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def ensure_out_dir(out: str) -> str:
    """Asegurar que el directorio de salida existe"""
    if not os.path.exists(out):
        os.makedirs(out)
        logger.debug("Directorio de salida creado: %s", out)
    return out


def json_safe(value: Any) -> Any:
    """NaN/inf no son JSON válido: se escriben como null"""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Mapping):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if hasattr(value, "tolist"):
        return json_safe(value.tolist())
    return value


def write_json(path: str, payload: Mapping[str, Any], timestamp: bool = True) -> str:
    body: Dict[str, Any] = dict(payload)
    if timestamp:
        body["generated_at"] = generated_at()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(json_safe(body), fh, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False)
        fh.write("\n")
    logger.debug("JSON escrito: %s", path)
    return path


def write_csv(
    path: str, columns: Sequence[str], rows: Iterable[Mapping[str, Any]], timestamp: bool = True
) -> str:
    """CSV RFC-4180 con fin de línea LF; la primera línea lleva la fecha salvo --no-timestamp"""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if timestamp:
            fh.write(f"# generated_at={generated_at()}\n")
        writer = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in columns])
    logger.debug("CSV escrito: %s", path)
    return path


def read_csv(path: str) -> List[Dict[str, str]]:
    """Leer una tabla escrita por write_csv, ignorando las líneas de comentario"""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def render_summary(context: Mapping[str, Any]) -> str:
    return templates.get_template("summary.md.j2").render(**context)


def write_summary(out: str, context: Mapping[str, Any], timestamp: bool = True) -> str:
    """Renderizar summary.md a partir de título, estado, datos clave y tablas"""
    body = {"generated_at": generated_at() if timestamp else None, "facts": [], "tables": [], "notes": []}
    body.update(context)
    path = os.path.join(out, "summary.md")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_summary(body))
    return path
