"""Readers and writers for the on-disk formats.

Edge files are TSV (``src<TAB>dst[<TAB>weight]``, ``#`` comments allowed,
UTF-8); weights are validated but discarded since every algorithm here is
unweighted. Node files are JSON Lines with ``id`` required and ``label``,
``tokens`` or ``text`` optional; ``text`` is converted to a token count by
the supplied estimator. JSON artifacts are serialized with sorted keys and
a trailing newline so reruns are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import InputError
from .graph import Graph, NodeMeta
from .hierarchy import Cluster, Hierarchy
from .sampling import SampleResult, TokenModel


def json_dumps_stable(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def read_edges_tsv(path: str | Path) -> list[tuple[str, str]]:
    """Parse an edge list file; malformed lines fail with their line number."""
    records: list[tuple[str, str]] = []
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read edge file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) not in (2, 3) or not parts[0].strip() or not parts[1].strip():
            raise InputError(f"{path}:{lineno}: expected 'src<TAB>dst[<TAB>weight]'")
        if len(parts) == 3:
            try:
                float(parts[2])
            except ValueError:
                raise InputError(f"{path}:{lineno}: weight {parts[2]!r} is not a number") from None
        records.append((parts[0].strip(), parts[1].strip()))
    return records


def read_nodes_jsonl(path: str | Path, token_model: TokenModel | None = None) -> list[NodeMeta]:
    """Parse a node metadata file; ``text`` fields become estimated token counts."""
    tm = token_model or TokenModel()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read node file {path}: {exc}") from exc
    records: list[NodeMeta] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), str) or not obj["id"]:
            raise InputError(f"{path}:{lineno}: node records need a string 'id'")
        tokens = obj.get("tokens")
        if tokens is None:
            tokens = tm.estimate(obj.get("text", ""))
        elif not isinstance(tokens, int) or tokens < 0:
            raise InputError(f"{path}:{lineno}: 'tokens' must be a nonnegative integer")
        records.append(
            NodeMeta(external_id=obj["id"], label=str(obj.get("label", "")), token_count=tokens)
        )
    return records


def write_edges_tsv(path: str | Path, records: list[tuple[str, str]]) -> None:
    lines = [f"{src}\t{dst}" for src, dst in records]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_nodes_jsonl(path: str | Path, records: list[NodeMeta]) -> None:
    lines = [
        json.dumps(
            {"id": rec.external_id, "label": rec.label, "tokens": rec.token_count},
            sort_keys=True,
        )
        for rec in records
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def hierarchy_to_json_obj(h: Hierarchy, g: Graph) -> dict:
    """JSON-ready view of a hierarchy with external node ids."""
    clusters = []
    for cid in sorted(h.clusters):
        c = h.clusters[cid]
        clusters.append(
            {
                "id": c.id,
                "level": c.level,
                "kind": c.kind,
                "parent": c.parent,
                "leaf": h.is_leaf(cid),
                "members": sorted(g.external_id(v) for v in c.members),
                "anchors": sorted(g.external_id(v) for v in c.anchors),
            }
        )
    return {
        "clusters": clusters,
        "attached_singletons": {
            g.external_id(v): cid for v, cid in sorted(h.attached_singletons.items())
        },
        "roots": list(h.roots),
        "max_level": h.max_level,
        "max_cluster_size": h.max_cluster_size,
    }


def hierarchy_from_json_obj(obj: dict, g: Graph) -> Hierarchy:
    """Rebuild a hierarchy over ``g`` from its JSON form."""
    try:
        clusters: dict[int, Cluster] = {}
        for entry in obj["clusters"]:
            members = {g.id_of(ext) for ext in entry["members"]}
            anchors = frozenset(g.id_of(ext) for ext in entry.get("anchors", []))
            clusters[entry["id"]] = Cluster(
                id=entry["id"],
                members=members,
                level=entry["level"],
                kind=entry["kind"],
                parent=entry["parent"],
                children=[],
                anchors=anchors,
            )
        for c in clusters.values():
            if c.parent is not None:
                clusters[c.parent].children.append(c.id)
        for c in clusters.values():
            c.children.sort()
        leaf_flags = {entry["id"]: entry.get("leaf") for entry in obj["clusters"]}
        if any(flag is None for flag in leaf_flags.values()):
            leaf_ids = {cid for cid, c in clusters.items() if not c.children}
        else:
            leaf_ids = {cid for cid, flag in leaf_flags.items() if flag}
        attached = {g.id_of(ext): cid for ext, cid in obj.get("attached_singletons", {}).items()}
        return Hierarchy(
            clusters=clusters,
            roots=obj.get(
                "roots",
                [cid for cid, c in sorted(clusters.items()) if c.parent is None and c.kind == "root"],
            ),
            global_singletons=set(),
            attached_singletons=attached,
            max_level=obj.get("max_level", max((c.level for c in clusters.values()), default=0)),
            max_cluster_size=obj.get("max_cluster_size", 0),
            leaf_ids=leaf_ids,
        )
    except KeyError as exc:
        raise InputError(f"hierarchy JSON is missing field {exc}") from None


def sample_to_tsv(result: SampleResult, g: Graph) -> str:
    """Selected edges as ``src<TAB>dst<TAB>community<TAB>cost`` lines."""
    lines = ["#src\tdst\tcommunity\tcost"]
    for pick in result.selected:
        u, w = pick.edge
        lines.append(f"{g.external_id(u)}\t{g.external_id(w)}\t{pick.community}\t{pick.cost}")
    return "\n".join(lines) + "\n"
