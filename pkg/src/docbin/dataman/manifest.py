"""Dataset discovery: pairing document images with their ground truth."""
import json
import os
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..codec import read_image
from ..errors import DecodeError, DomainError, UnsupportedFormatError

IMAGE_EXTENSIONS = (".png", ".pgm", ".ppm", ".pnm")
# longest first so "_gt_estGT"-like names strip greedily
GT_SUFFIXES = ("_estGT", "_GT", "_gt", "-gt", "-GT")
SPLITS = ("train", "test")


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    input_path: str
    gt_path: str
    split: str = "test"
    source: str = ""


@dataclass
class DatasetManifest:
    name: str
    entries: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def counts(self):
        """Entry count per source dataset, in first-seen order."""
        return dict(Counter(e.source for e in self.entries))

    def test_entries(self):
        return [e for e in self.entries if e.split == "test"]

    def select(self, split=None):
        return [e for e in self.entries if split is None or e.split == split]

    def to_dict(self):
        return {
            "name": self.name,
            "entries": [asdict(e) for e in self.entries],
            "warnings": list(self.warnings),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def save(self, path):
        Path(path).write_text(self.to_json())

    @classmethod
    def from_dict(cls, d, base_dir=None):
        entries = []
        for e in d["entries"]:
            e = dict(e)
            if base_dir is not None:
                for key in ("input_path", "gt_path"):
                    if not os.path.isabs(e[key]):
                        e[key] = os.path.join(base_dir, e[key])
            entries.append(ManifestEntry(**e))
        return cls(d["name"], entries, list(d.get("warnings", [])))

    @classmethod
    def load(cls, path):
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base_dir=str(path.parent))


def _is_image(p):
    return p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS


def _gt_stem(stem):
    for suffix in GT_SUFFIXES:
        if stem.endswith(suffix) and len(stem) > len(suffix):
            return stem[: -len(suffix)]
    return None


def _split_and_source(rel_dir, root_name):
    parts = list(rel_dir.parts)
    split = "test"
    if parts and parts[0] in SPLITS:
        split = parts.pop(0)
    return split, "/".join(parts) or root_name


def _pairs_dibco(root):
    by_dir = {}
    for p in sorted(root.rglob("*")):
        if _is_image(p):
            by_dir.setdefault(p.parent, []).append(p)
    pairs, warnings = [], []
    for d in sorted(by_dir):
        inputs, gts = {}, {}
        for p in by_dir[d]:
            base = _gt_stem(p.stem)
            if base is None:
                inputs[p.stem] = p
            else:
                gts.setdefault(base, p)
        for stem in sorted(inputs):
            if stem in gts:
                pairs.append((inputs[stem], gts[stem]))
            else:
                warnings.append(f"no ground truth for {inputs[stem].relative_to(root).as_posix()}")
        for stem in sorted(set(gts) - set(inputs)):
            warnings.append(f"ground truth without input: {gts[stem].relative_to(root).as_posix()}")
    return pairs, warnings


def _pairs_flat(root):
    in_dir, gt_dir = root / "inputs", root / "gt"
    if not in_dir.is_dir() or not gt_dir.is_dir():
        raise DomainError(f"flat-pairs layout needs {in_dir} and {gt_dir}")
    inputs = {p.stem: p for p in sorted(in_dir.iterdir()) if _is_image(p)}
    gts = {}
    for p in sorted(gt_dir.iterdir()):
        if _is_image(p):
            gts.setdefault(_gt_stem(p.stem) or p.stem, p)
    pairs, warnings = [], []
    for stem in sorted(inputs):
        if stem in gts:
            pairs.append((inputs[stem], gts[stem]))
        else:
            warnings.append(f"no ground truth for inputs/{inputs[stem].name}")
    for stem in sorted(set(gts) - set(inputs)):
        warnings.append(f"ground truth without input: gt/{gts[stem].name}")
    return pairs, warnings


def scan_manifest(root, layout="dibco", name=None, check_dimensions=True):
    """Build a manifest from a directory tree.

    ``layout="dibco"`` pairs ``<name>.<ext>`` with ``<name>_gt.<ext>`` (also
    ``_GT``, ``_estGT``, ``-gt``) inside each directory. A leading ``train/``
    or ``test/`` directory sets the split (default test) and the remaining
    sub-path names the source dataset. ``layout="flat-pairs"`` matches
    ``inputs/`` against ``gt/`` by file stem.

    Unpaired files and pairs whose dimensions differ are reported in
    ``warnings`` and left out.
    """
    root = Path(root)
    if not root.is_dir():
        raise DomainError(f"dataset root {root} does not exist")
    if layout == "dibco":
        pairs, warnings = _pairs_dibco(root)
    elif layout == "flat-pairs":
        pairs, warnings = _pairs_flat(root)
    else:
        raise DomainError(f"unknown layout {layout!r}")

    entries = []
    for inp, gt in pairs:
        rel = inp.relative_to(root)
        if layout == "dibco":
            split, source = _split_and_source(rel.parent, root.name)
            entry_name = rel.with_suffix("").as_posix()
        else:
            split, source = "test", root.name
            entry_name = inp.stem
        if check_dimensions:
            try:
                a, b = read_image(inp), read_image(gt)
            except (DecodeError, UnsupportedFormatError) as exc:
                warnings.append(f"cannot decode {rel.as_posix()}: {exc}")
                continue
            if a.shape[:2] != b.shape[:2]:
                warnings.append(
                    f"dimension mismatch for {rel.as_posix()}: {a.shape[:2]} vs {b.shape[:2]}")
                continue
        entries.append(ManifestEntry(entry_name, str(inp), str(gt), split, source))
    entries.sort(key=lambda e: e.name)
    if not entries:
        raise DomainError(f"no input/ground-truth pairs found under {root}")
    return DatasetManifest(name or root.name, entries, warnings)


def load_manifest(path, layout="dibco"):
    """Load a manifest JSON file, or scan `path` if it is a directory."""
    if os.path.isdir(path):
        return scan_manifest(path, layout)
    return DatasetManifest.load(path)
