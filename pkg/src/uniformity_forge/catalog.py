"""Persistent JSON catalog of arrays, schemes and states with provenance.

The catalog lives in ``$UF_CATALOG_DIR`` (default ``~/.uniformity_forge``) as a
single ``catalog.json``. Entry ids are prefixes of the sha256 of the file
contents, so the same object is never recorded twice. Writers serialise
through an advisory lock file next to the JSON document.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from filelock import FileLock

from .errors import ContractError, InputError

ID_LENGTH = 12
KINDS = ("array", "scheme", "state")


def catalog_dir() -> Path:
    env = os.environ.get("UF_CATALOG_DIR")
    return Path(env) if env else Path.home() / ".uniformity_forge"


def file_hash(path: str | os.PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class Provenance:
    source: str  # builtin | constructed | imported
    operation: str | None = None
    parents: list[str] = field(default_factory=list)
    name: str | None = None


@dataclass
class Verification:
    status: str  # verified | failed | unverified
    timestamp: str | None = None
    metrics: dict = field(default_factory=dict)


@dataclass
class CatalogEntry:
    id: str
    kind: str
    path: str
    sha256: str
    signature: str
    k: int | None
    metric: dict
    provenance: Provenance
    verification: Verification

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> CatalogEntry:
        data = dict(data)
        data["provenance"] = Provenance(**data["provenance"])
        data["verification"] = Verification(**data["verification"])
        return cls(**data)


class Catalog:
    def __init__(self, root: str | os.PathLike | None = None, *, seed: bool = True):
        self.root = Path(root) if root is not None else catalog_dir()
        self.root.mkdir(parents=True, exist_ok=True)
        self.file = self.root / "catalog.json"
        self.lock = FileLock(str(self.root / "catalog.lock"))
        self.entries: dict[str, CatalogEntry] = {}
        with self.lock:
            self._load()
            if seed and not self.file.exists():
                self._seed()
                self._save()

    def _load(self) -> None:
        if not self.file.exists():
            self.entries = {}
            return
        try:
            raw = json.loads(self.file.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"catalog {self.file} is not valid JSON: {exc}") from None
        self.entries = {e["id"]: CatalogEntry.from_json(e) for e in raw.get("entries", [])}

    def _save(self) -> None:
        doc = {"version": 1, "entries": [e.to_json() for e in self.entries.values()]}
        tmp = self.file.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        tmp.replace(self.file)

    def _seed(self) -> None:
        from .shipped import IMPORTED, SHIPPED, shipped_path

        for name in SHIPPED:
            source = "imported" if name in IMPORTED else "builtin"
            entry = describe_file(shipped_path(name), SHIPPED[name][1])
            entry.provenance = Provenance(source, name=name)
            self.entries.setdefault(entry.id, entry)

    # -- queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, entry_id: str) -> bool:
        return entry_id in self.entries

    def get(self, entry_id: str) -> CatalogEntry:
        matches = [e for key, e in self.entries.items() if key.startswith(entry_id)]
        if not entry_id or not matches:
            raise InputError(f"no catalog entry with id {entry_id!r}")
        if len(matches) > 1:
            raise InputError(f"id prefix {entry_id!r} is ambiguous")
        return matches[0]

    def find_by_path(self, path: str | os.PathLike) -> CatalogEntry | None:
        target = str(Path(path).resolve())
        return next((e for e in self.entries.values() if e.path == target), None)

    def ancestry(self, entry_id: str) -> list[str]:
        """Ids reachable through parent links, depth first, excluding the start."""
        seen: list[str] = []
        stack = list(self.entries[entry_id].provenance.parents)
        while stack:
            pid = stack.pop()
            if pid in seen:
                continue
            seen.append(pid)
            if pid in self.entries:
                stack.extend(self.entries[pid].provenance.parents)
        return seen

    # -- mutation --------------------------------------------------------

    def add(self, entry: CatalogEntry) -> CatalogEntry:
        """Insert ``entry``; an identical existing object keeps its first record."""
        with self.lock:
            self._load()
            if entry.id in self.entries:
                return self.entries[entry.id]
            missing = [p for p in entry.provenance.parents if p not in self.entries]
            if missing:
                raise ContractError(f"parent ids not in catalog: {', '.join(missing)}")
            self.entries[entry.id] = entry
            if has_cycle(self.entries):
                del self.entries[entry.id]
                raise ContractError(f"inserting {entry.id} would create a provenance cycle")
            self._save()
        return entry

    def gc(self) -> list[str]:
        """Drop entries whose files vanished; returns the removed ids."""
        with self.lock:
            self._load()
            gone = [key for key, e in self.entries.items() if not Path(e.path).exists()]
            for key in gone:
                del self.entries[key]
            if gone:
                self._save()
        return gone


def has_cycle(entries: dict[str, CatalogEntry]) -> bool:
    state: dict[str, int] = {}  # 1 on stack, 2 done

    def visit(node: str) -> bool:
        state[node] = 1
        for parent in entries[node].provenance.parents:
            if parent not in entries:
                continue
            mark = state.get(parent)
            if mark == 1 or (mark is None and visit(parent)):
                return True
        state[node] = 2
        return False

    return any(state.get(key) is None and visit(key) for key in entries)


def describe_file(path: str | os.PathLike, k: int | None, *, verify: bool = True) -> CatalogEntry:
    """Build an entry (not yet inserted) for a file, running the verifier when asked."""
    from .arrays import min_hamming_distance, verify_strength
    from .constructions import verify_difference_scheme
    from .formats import detect_kind, read_ds, read_moa, read_qst
    from .states import support, verify_k_uniform

    path = Path(path).resolve()
    kind = detect_kind(path)
    digest = file_hash(path)
    metrics: dict = {}
    status = "unverified"
    if kind == "array":
        M = read_moa(path)
        signature = M.describe()
        k = M.strength if k is None else k
        metric = {"md": min_hamming_distance(M)} if M.r > 1 else {}
        if verify:
            v = verify_strength(M, k)
            status = "verified" if v.passed else "failed"
            metrics = {"strength": k, "passed": v.passed, **metric}
    elif kind == "scheme":
        D = read_ds(path)
        signature = D.describe()
        k = D.strength if k is None else k
        metric = {}
        if verify:
            v = verify_difference_scheme(D, k)
            status = "verified" if v.passed else "failed"
            metrics = {"strength": k, "passed": v.passed}
    else:
        s = read_qst(path)
        signature = "state " + " ".join(map(str, s.dims))
        metric = {"support": support(s)}
        if verify and k is not None:
            v = verify_k_uniform(s, k)
            status = "verified" if v.passed else "failed"
            metrics = {"uniformity": k, "passed": v.passed, "max_deviation": v.max_deviation}
    return CatalogEntry(
        id=digest[:ID_LENGTH],
        kind=kind,
        path=str(path),
        sha256=digest,
        signature=signature,
        k=k,
        metric=metric,
        provenance=Provenance("imported"),
        verification=Verification(status, now() if verify else None, metrics),
    )
