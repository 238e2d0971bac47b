"""Check/report records shared by the CLI and the acceptance harness."""
import hashlib
import json
import math
from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    relation: str = "<="       # pass when ``measured <relation> tolerance``
    detail: str = ""

    @property
    def passed(self):
        if not math.isfinite(self.measured):
            return False
        if self.relation == "<=":
            return self.measured <= self.tolerance
        if self.relation == ">=":
            return self.measured >= self.tolerance
        if self.relation == ">":
            return self.measured > self.tolerance
        raise ValueError(f"unknown relation {self.relation!r}")

    def as_dict(self):
        return {"name": self.name, "status": "PASS" if self.passed else "FAIL",
                "measured": _num(self.measured), "tolerance": _num(self.tolerance),
                "relation": self.relation, "detail": self.detail}


def _num(x):
    x = float(x) + 0.0       # folds -0.0 into 0.0
    return x if math.isfinite(x) else repr(x)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    if isinstance(obj, float):
        return _num(obj)
    return obj


def config_digest(config):
    blob = json.dumps(_clean(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Report:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add(self, check):
        if any(c.name == check.name for c in self.checks):
            raise ValueError(f"duplicate check {check.name!r}")
        self.checks.append(check)
        return check

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failing(self):
        return [c.name for c in self.checks if not c.passed]

    def as_dict(self):
        return {"command": self.command, "config": _clean(self.config),
                "config_digest": config_digest(self.config),
                "checks": [c.as_dict() for c in self.checks],
                "results": _clean(self.results), "notes": list(self.notes),
                "verdict": "PASS" if self.passed else "FAIL",
                "failing": self.failing()}

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self):
        d = self.as_dict()
        out = [f"command: {d['command']}", f"config digest: {d['config_digest']}"]
        for k, v in sorted(d["results"].items()):
            if isinstance(v, list) and v and isinstance(v[0], dict):
                out.append(f"{k}:")
                cols = list(v[0])
                out.append("  " + "  ".join(f"{c:>14}" for c in cols))
                for row in v:
                    out.append("  " + "  ".join(_cell(row[c]) for c in cols))
            else:
                out.append(f"{k}: {v}")
        for c in d["checks"]:
            out.append(f"[{c['status']}] {c['name']}: measured {c['measured']!r} "
                       f"{c['relation']} {c['tolerance']!r}" + (f"  ({c['detail']})" if c["detail"] else ""))
        out.extend(f"note: {n}" for n in d["notes"])
        out.append(f"verdict: {d['verdict']}" + (f" (failing: {', '.join(d['failing'])})" if d["failing"] else ""))
        return "\n".join(out) + "\n"

    def render(self, fmt):
        return self.to_json() if fmt == "json" else self.to_text()


def _cell(v):
    if isinstance(v, float):
        return f"{v:>14.6g}"
    return f"{str(v):>14}"
