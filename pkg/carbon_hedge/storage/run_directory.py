"""
Run output directory and manifest management
"""

import hashlib
import json
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional

from carbon_hedge import __version__
from carbon_hedge.core.config import PipelineConfig

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


class RunDirectory:
    """Output tree of one run; tracks written artifacts and writes the manifest"""

    def __init__(self, root: Path) -> None:
        self.root = Path(root)
        self.artifacts: set[str] = set()
        self.seeds: dict[str, int] = {}
        self.is_open = False

    def open(self) -> None:
        """Create the output directory"""
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            self.is_open = True
            logger.info(f"✅ Output directory ready: {self.root}")
        except OSError as e:
            logger.error(f"❌ Cannot create output directory {self.root}: {e}")
            raise

    def path(self, *parts: str) -> Path:
        """Absolute path of an artifact; parent directories are created"""
        if not self.is_open:
            raise RuntimeError("Run directory not open. Call open() first.")
        target = self.root.joinpath(*parts)
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def record(self, path: Path) -> None:
        """Register a written artifact for the manifest"""
        self.artifacts.add(Path(path).resolve().relative_to(self.root.resolve()).as_posix())

    def record_seed(self, name: str, value: int) -> None:
        self.seeds[name] = int(value)

    def manifest(self, config: PipelineConfig, extra: Optional[dict[str, Any]] = None) -> dict:
        hashes = {name: file_sha256(self.root / name) for name in sorted(self.artifacts)}
        manifest: dict[str, Any] = {
            "version": __version__,
            "config": config.model_dump(mode="json"),
            "config_hash": config.config_hash(),
            "seeds": {"master": config.seed, "derived": dict(sorted(self.seeds.items()))},
            "artifacts": hashes,
        }
        if extra:
            manifest.update(extra)
        return manifest

    def close(self, config: PipelineConfig, extra: Optional[dict[str, Any]] = None) -> Path:
        """Write manifest.json (no timestamps) and close the directory"""
        target = self.path(MANIFEST_NAME)
        with open(target, "w", encoding="utf-8") as handle:
            json.dump(self.manifest(config, extra), handle, indent=2, sort_keys=True)
            handle.write("\n")
        self.is_open = False
        logger.info(f"✅ Manifest written: {target} ({len(self.artifacts)} artifacts)")
        return target


@contextmanager
def open_run_directory(root: Path, config: PipelineConfig) -> Iterator[RunDirectory]:
    """Open a run directory and write its manifest when the block succeeds"""
    run_dir = RunDirectory(root)
    run_dir.open()
    yield run_dir
    run_dir.close(config)


def load_manifest(root: Path) -> dict[str, Any]:
    with open(Path(root) / MANIFEST_NAME, "r", encoding="utf-8") as handle:
        return json.load(handle)
