"""File formats: multilayer edge lists, per-layer directories, labels,
embeddings, and JSON metadata sidecars.

Edge-list TSV: one `layer_u<TAB>node_u<TAB>layer_v<TAB>node_v<TAB>weight`
record per line, `#` comment lines ignored.  Per-layer directory: files
`layer_<i>.tsv` of `node_u<TAB>node_v<TAB>weight` rows, layer indices
contiguous from 0.  Labels: CSV `node_id,label`.  Embeddings: TSV with a
`node_id, f_0..f_{D-1}` header and full-precision values.  All node
identifiers round-trip as strings.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .graph import EXPLICIT_COUPLING, IDENTITY_COUPLING, MultilayerNetwork, build_network
from .skipgram import EmbeddingModel


class LoadError(ValueError):
    """Malformed input file; message carries the file and line number."""


def read_edge_records(path) -> list:
    """Parse 5-column edge-list TSV into build_network records."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise LoadError(
                    f"{path}: line {lineno}: expected 5 tab-separated fields, got {len(parts)}"
                )
            lu, u, lv, v, w = parts
            try:
                lu, lv = int(lu), int(lv)
            except ValueError:
                raise LoadError(f"{path}: line {lineno}: bad layer index") from None
            try:
                w = float(w)
            except ValueError:
                raise LoadError(f"{path}: line {lineno}: bad weight {parts[4]!r}") from None
            records.append((lu, u, lv, v, w))
    return records


def load_network_tsv(
    path, coupling_mode: str = IDENTITY_COUPLING, num_layers: int | None = None
) -> MultilayerNetwork:
    return build_network(read_edge_records(path), coupling_mode=coupling_mode, num_layers=num_layers)


_LAYER_FILE = re.compile(r"^layer_(\d+)\.tsv$")


def load_layer_directory(path, coupling_mode: str = IDENTITY_COUPLING) -> MultilayerNetwork:
    """Load a directory of layer_<i>.tsv files (3-column intra-layer rows)."""
    root = Path(path)
    found = {}
    for child in root.iterdir():
        m = _LAYER_FILE.match(child.name)
        if m:
            found[int(m.group(1))] = child
    if not found:
        raise LoadError(f"{root}: no layer_<i>.tsv files found")
    num_layers = max(found) + 1
    missing = sorted(set(range(num_layers)) - set(found))
    if missing:
        raise LoadError(f"{root}: layer indices not contiguous; missing {missing}")
    records = []
    for i in range(num_layers):
        with open(found[i], "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise LoadError(
                        f"{found[i]}: line {lineno}: expected 3 tab-separated fields, got {len(parts)}"
                    )
                u, v, w = parts
                try:
                    w = float(w)
                except ValueError:
                    raise LoadError(f"{found[i]}: line {lineno}: bad weight {parts[2]!r}") from None
                records.append((i, u, i, v, w))
    return build_network(records, coupling_mode=coupling_mode, num_layers=num_layers)


def write_layer_directory(net: MultilayerNetwork, path) -> None:
    """Write one layer_<i>.tsv per layer from the columnar intra edges."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    per_layer: list = [[] for _ in range(net.num_layers)]
    for layer, i, j, w in zip(net.intra_layer, net.intra_u, net.intra_v, net.intra_w):
        per_layer[int(layer)].append((net.node_ids[int(i)], net.node_ids[int(j)], float(w)))
    for layer in range(net.num_layers):
        with open(root / f"layer_{layer}.tsv", "w", encoding="utf-8") as fh:
            for u, v, w in per_layer[layer]:
                fh.write(f"{u}\t{v}\t{w!r}\n")


def read_labels_csv(path) -> dict:
    """CSV node_id,label -> dict; a node_id,label header row is tolerated."""
    labels: dict = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (not "".join(row).strip()):
                continue
            if len(row) != 2:
                raise LoadError(f"{path}: line {lineno}: expected 2 CSV fields, got {len(row)}")
            if lineno == 1 and row == ["node_id", "label"]:
                continue
            labels[row[0]] = row[1]
    if not labels:
        raise LoadError(f"{path}: no label rows found")
    return labels


def write_labels_csv(labels: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "label"])
        for node, lab in labels.items():
            writer.writerow([node, lab])


def write_embedding_tsv(model: EmbeddingModel, path) -> None:
    """TSV with node_id + f_0..f_{D-1} header, repr-precision floats."""
    dim = model.dim
    header = "node_id\t" + "\t".join(f"f_{j}" for j in range(dim))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for i, node in enumerate(model.node_ids):
            row = "\t".join(repr(float(x)) for x in model.input_weights[i])
            fh.write(f"{node}\t{row}\n")


def read_embedding_tsv(path) -> tuple[list, np.ndarray]:
    """Returns (node_ids as strings, N x D feature matrix)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if not header or header[0] != "node_id":
            raise LoadError(f"{path}: missing node_id header")
        dim = len(header) - 1
        nodes, rows = [], []
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != dim + 1:
                raise LoadError(
                    f"{path}: line {lineno}: expected {dim + 1} fields, got {len(parts)}"
                )
            nodes.append(parts[0])
            try:
                rows.append([float(x) for x in parts[1:]])
            except ValueError:
                raise LoadError(f"{path}: line {lineno}: bad float value") from None
    return nodes, np.asarray(rows, dtype=np.float64)


def write_metadata_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def read_metadata_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
