#!/usr/bin/env python3
"""Fetch and convert the public multiplex datasets used by the test suite.

Downloads come from the CoMuNe lab archive (https://comunelab.fbk.eu),
which hosts the datasets as zip files containing a ``*_multiplex.edges``
member with ``layer src dst [weight]`` lines plus optional node/layer
dictionaries.  This script rewrites them into the edge-list format the
package reads (``src dst layer`` per line) under ``data/``.

Hosting moves around; when a listed URL no longer resolves, download the
zip by hand and convert it locally:

    python3 scripts/fetch_datasets.py aarhus --from CS-Aarhus.zip

The Pardus game dataset is not publicly downloadable (available from its
maintainers on request) and is therefore only documented here: place the
two temporal snapshots at ``data/pardus_train.edges`` and
``data/pardus_test.edges`` in the same ``src dst layer`` format, where
the test snapshot is a later superset of the training one.

Edge weights, if present, are dropped: the package treats edges as
binary.  Node and layer ids are replaced by their dictionary labels when
the zip ships dictionaries, otherwise kept as numbers.
"""

import argparse
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"

DATASETS = {
    "aarhus": {
        "out": "aarhus.edges",
        "directed": False,
        "urls": [
            "https://comunelab.fbk.eu/data/CS-Aarhus.zip",
        ],
        "note": "employee ties at a CS department; 5 layers, undirected",
    },
    "physicians": {
        "out": "physicians.edges",
        "directed": True,
        "urls": [
            "https://comunelab.fbk.eu/data/CKM-Physicians-Innovation.zip",
        ],
        "note": "physician innovation-adoption nominations; 3 layers, "
                "directed",
    },
    "celegans": {
        "out": "celegans.edges",
        "directed": True,
        "urls": [
            "https://comunelab.fbk.eu/data/CElegans.zip",
        ],
        "note": "nematode neuronal connectome; 3 layers, directed",
    },
}


def read_dictionary(zf: zipfile.ZipFile, suffix: str) -> dict:
    """id -> label map from a ``*_nodes.txt`` / ``*_layers.txt`` member."""
    for name in zf.namelist():
        if name.endswith(suffix):
            table = {}
            with zf.open(name) as fh:
                for raw in fh.read().decode("utf-8").splitlines():
                    parts = raw.split()
                    # Header lines ("nodeID nodeLabel") have no numeric id.
                    if len(parts) >= 2 and parts[0].isdigit():
                        table[parts[0]] = parts[1]
            return table
    return {}


def convert(zip_path: Path, out_path: Path) -> int:
    with zipfile.ZipFile(zip_path) as zf:
        members = [n for n in zf.namelist() if n.endswith(".edges")]
        if not members:
            raise SystemExit(f"{zip_path}: no .edges member found")
        member = min(members, key=len)
        nodes = read_dictionary(zf, "_nodes.txt")
        layers = read_dictionary(zf, "_layers.txt")
        lines = set()
        with zf.open(member) as fh:
            for raw in fh.read().decode("utf-8").splitlines():
                parts = raw.split()
                if len(parts) < 3 or not parts[0].lstrip("-").isdigit():
                    continue
                layer, src, dst = parts[0], parts[1], parts[2]
                src = nodes.get(src, src)
                dst = nodes.get(dst, dst)
                layer = layers.get(layer, layer)
                if src != dst:  # drop self-loops
                    lines.add(f"{src} {dst} {layer}")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(sorted(lines)) + "\n")
    return len(lines)


def fetch(name: str, override_url: str, local: str) -> bool:
    info = DATASETS[name]
    out_path = DATA / info["out"]
    if local:
        n = convert(Path(local), out_path)
        print(f"{name}: {n} edge lines -> {out_path}")
        return True
    urls = [override_url] if override_url else info["urls"]
    for url in urls:
        try:
            with tempfile.NamedTemporaryFile(suffix=".zip") as tmp:
                print(f"{name}: downloading {url}")
                with urllib.request.urlopen(url, timeout=60) as resp:
                    tmp.write(resp.read())
                tmp.flush()
                n = convert(Path(tmp.name), out_path)
            print(f"{name}: {n} edge lines -> {out_path}")
            return True
        except OSError as exc:
            print(f"{name}: {url} failed ({exc})", file=sys.stderr)
    print(
        f"{name}: could not download; fetch the zip manually and rerun "
        f"with --from <zip>",
        file=sys.stderr,
    )
    return False


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument(
        "dataset", choices=sorted(DATASETS) + ["all"],
        help="which dataset to fetch, or 'all'",
    )
    ap.add_argument("--url", default="", help="override the download URL")
    ap.add_argument(
        "--from", dest="local", default="",
        help="convert an already-downloaded zip instead of fetching",
    )
    args = ap.parse_args()
    names = sorted(DATASETS) if args.dataset == "all" else [args.dataset]
    if len(names) > 1 and (args.url or args.local):
        ap.error("--url/--from apply to a single dataset")
    ok = all([fetch(n, args.url, args.local) for n in names])
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
