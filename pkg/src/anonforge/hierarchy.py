"""Per-attribute generalization hierarchies (rooted label trees).

File format: nested JSON object with a single root key, leaves as empty
objects, e.g. ``{"*": {"America": {"United-States": {}, "Canada": {}}}}``.
Labels are unique within one tree; dataset values must be leaves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import HierarchyError, SchemaError


@dataclass(frozen=True)
class HierarchyNode:
    """Reference to one node of a Hierarchy (compare by tree identity + index)."""

    tree: "Hierarchy"
    index: int

    @property
    def label(self) -> str:
        return self.tree.labels[self.index]

    def __repr__(self) -> str:  # pragma: no cover
        return f"HierarchyNode({self.label!r})"


class Hierarchy:
    """Rooted generalization tree over one categorical attribute's values."""

    def __init__(self, attribute: str, root: dict):
        if not isinstance(root, dict) or len(root) != 1:
            raise HierarchyError("hierarchy must be a mapping with a single root key")
        self.attribute = attribute
        self.labels: list[str] = []
        self.parent: list[int] = []
        self.children: list[list[int]] = []
        self.depth: list[int] = []
        self._label_to_index: dict[str, int] = {}

        def add(label: str, parent_idx: int, depth: int, subtree) -> int:
            if not isinstance(label, str) or label == "":
                raise HierarchyError(f"invalid node label {label!r}")
            if label in self._label_to_index:
                raise HierarchyError(f"duplicate label {label!r} in hierarchy")
            idx = len(self.labels)
            self.labels.append(label)
            self.parent.append(parent_idx)
            self.children.append([])
            self.depth.append(depth)
            self._label_to_index[label] = idx
            if parent_idx >= 0:
                self.children[parent_idx].append(idx)
            if not isinstance(subtree, dict):
                raise HierarchyError(f"children of {label!r} must be a mapping")
            for child_label, child_sub in subtree.items():
                add(child_label, idx, depth + 1, child_sub)
            return idx

        (root_label, root_sub), = root.items()
        add(root_label, -1, 0, root_sub)

        # subtree height in edges, computed leaves-up
        self.subtree_height: list[int] = [0] * len(self.labels)
        for idx in range(len(self.labels) - 1, -1, -1):
            if self.children[idx]:
                self.subtree_height[idx] = 1 + max(
                    self.subtree_height[c] for c in self.children[idx]
                )
        self.height: int = self.subtree_height[0]
        if self.height < 1:
            raise HierarchyError(
                "hierarchy must have at least one leaf below a distinct root"
            )
        self.leaf_labels: frozenset[str] = frozenset(
            self.labels[i] for i in range(len(self.labels)) if not self.children[i]
        )

    # -- node handles -------------------------------------------------

    @property
    def root(self) -> HierarchyNode:
        return HierarchyNode(self, 0)

    def node(self, label: str) -> HierarchyNode:
        try:
            return HierarchyNode(self, self._label_to_index[label])
        except KeyError:
            raise HierarchyError(
                f"label {label!r} not in hierarchy for {self.attribute!r}"
            ) from None

    def is_leaf(self, label: str) -> bool:
        idx = self._label_to_index.get(label)
        return idx is not None and not self.children[idx]

    def leaf_index(self, label: str) -> int:
        idx = self._label_to_index.get(label)
        if idx is None or self.children[idx]:
            raise HierarchyError(
                f"{label!r} is not a leaf of hierarchy {self.attribute!r}"
            )
        return idx

    # -- queries -------------------------------------------------------

    def lca_indices(self, a: int, b: int) -> int:
        while a != b:
            if self.depth[a] < self.depth[b]:
                b = self.parent[b]
            else:
                a = self.parent[a]
        return a

    def to_dict(self) -> dict:
        def build(idx: int) -> dict:
            return {self.labels[c]: build(c) for c in self.children[idx]}

        return {self.labels[0]: build(0)}

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def load_hierarchy(source, attribute: str = "") -> Hierarchy:
    """Parse a hierarchy from a JSON file/bytes/str/dict."""
    if isinstance(source, dict):
        obj = source
    else:
        if hasattr(source, "read"):
            data = source.read()
        elif isinstance(source, (bytes, str)) and not _looks_like_json(source):
            with open(source, "r", encoding="utf-8") as fh:
                data = fh.read()
        else:
            data = source
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        try:
            obj = json.loads(data)
        except json.JSONDecodeError as exc:
            raise HierarchyError(f"hierarchy file is not valid JSON: {exc}") from exc
    return Hierarchy(attribute, obj)


def _looks_like_json(s) -> bool:
    if isinstance(s, bytes):
        s = s.decode("utf-8", errors="replace")
    return s.lstrip()[:1] == "{"


def lca(h: Hierarchy, labels: Iterable[str]) -> HierarchyNode:
    """Deepest node whose subtree contains every given leaf label."""
    idxs = [h.leaf_index(lbl) for lbl in labels]
    if not idxs:
        raise HierarchyError("lca of an empty label set is undefined")
    acc = idxs[0]
    for idx in idxs[1:]:
        acc = h.lca_indices(acc, idx)
    return HierarchyNode(h, acc)


def node_height(h: Hierarchy, node: HierarchyNode) -> int:
    """Height (in edges) of the subtree rooted at `node`; leaves are 0."""
    if node.tree is not h:
        raise HierarchyError("node belongs to a different hierarchy")
    return h.subtree_height[node.index]


def validate_against(h: Hierarchy, d, attribute: str) -> list[str]:
    """Every dataset value of `attribute` that is not a leaf of `h`,
    sorted and deduplicated. Empty list means the hierarchy covers the data."""
    if d.attribute(attribute).kind != "categorical":
        raise SchemaError(f"attribute {attribute!r} is not categorical")
    seen = {v for v in d.column(attribute) if v is not None}
    return sorted(v for v in seen if not h.is_leaf(v))


def load_hierarchy_dir(path, attributes: Sequence[str]) -> dict[str, Hierarchy]:
    """Load `<attr>.json` for each requested attribute from a directory."""
    import os

    trees = {}
    for name in attributes:
        fp = os.path.join(path, f"{name}.json")
        if not os.path.exists(fp):
            raise HierarchyError(f"no hierarchy file for attribute {name!r} at {fp}")
        trees[name] = load_hierarchy(fp, attribute=name)
    return trees
