"""JSON and CSV formats: distribution and instance specs, schedules, sweep tables."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

from .distributions import Distribution, make_distribution
from .instances import InstanceSequence
from .schedules import Schedule

SIG_DIGITS = 12
SWEEP_COLUMNS = ("n", "schedule_kind", "e_alg", "e_opt", "factor", "quad_error")


def fmt(x: float) -> str:
    """A float at 12 significant digits."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return format(float(x), f".{SIG_DIGITS}g")


def rounded(obj: Any) -> Any:
    """Copy of a JSON-able structure with every float rounded to 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if hasattr(obj, "tolist"):
        return rounded(obj.tolist())
    if hasattr(obj, "item"):
        return rounded(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(rounded(obj), indent=2) + "\n"


def load_json(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def parse_instance(data: Any) -> Distribution | InstanceSequence:
    """A bare distribution spec gives an iid instance; ``{"items": [...]}`` gives a sequence.

    Items may carry ``"count"`` to repeat a spec and ``"type"`` to label it.
    """
    if isinstance(data, dict) and "items" in data:
        items, ids = [], []
        for j, spec in enumerate(data["items"]):
            count = int(spec.get("count", 1)) if isinstance(spec, dict) else 1
            if count < 1:
                raise ValueError(f"item {j}: count must be positive")
            d = make_distribution(spec)
            label = spec.get("type") if isinstance(spec, dict) else None
            items.extend([d] * count)
            ids.extend([label] * count)
        if all(t is None for t in ids):
            type_ids = None
        else:
            type_ids = [t if t is not None else f"item{i}" for i, t in enumerate(ids)]
        part = data.get("partition")
        partition = (int(part["k"]), int(part["m"])) if part else None
        return InstanceSequence(tuple(items), type_ids, partition)
    return make_distribution(data)


def load_instance(path) -> Distribution | InstanceSequence:
    return parse_instance(load_json(path))


def instance_to_json(seq: InstanceSequence) -> dict:
    out: dict = {"items": [dict(d.to_spec(), type=t) for d, t in zip(seq.items, seq.type_ids)]}
    if seq.partition is not None:
        out["partition"] = {"k": seq.partition[0], "m": seq.partition[1]}
    return out


def schedule_to_csv(s: Schedule) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "theta_i", "q_i"])
    w.writerow([0, "", fmt(s.qs[0])])
    for i in range(1, s.n + 1):
        w.writerow([i, fmt(s.thetas[i - 1]), fmt(s.qs[i])])
    return buf.getvalue()


def schedule_from_csv(text: str, kind: str = "file") -> Schedule:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or set(rows[0]) != {"i", "theta_i", "q_i"}:
        raise ValueError("schedule CSV needs columns i, theta_i, q_i")
    rows.sort(key=lambda r: int(r["i"]))
    if [int(r["i"]) for r in rows] != list(range(len(rows))):
        raise ValueError("schedule CSV rows must be numbered 0..n")
    qs = [float(r["q_i"]) for r in rows]
    thetas = [float(r["theta_i"]) for r in rows[1:]]
    return Schedule(thetas, qs, kind=kind)


def schedule_to_json(s: Schedule) -> dict:
    return {"kind": s.kind, "n": s.n, "thetas": s.thetas.tolist(), "qs": s.qs.tolist()}


def schedule_from_json(data: dict) -> Schedule:
    return Schedule(data["thetas"], data["qs"], kind=data.get("kind", "file"))


def load_schedule(path) -> Schedule:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return schedule_from_json(json.loads(text))
    return schedule_from_csv(text)


def table_to_csv(columns: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(columns))
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
