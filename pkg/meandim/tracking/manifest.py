"""Run manifests: what was run, with which inputs and code, and how long it took"""

import hashlib
import json
import platform
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Dict, List, Optional

from meandim import __version__
from meandim.config import config
from meandim.utils import logger

TRACKED_PACKAGES = ("numpy", "scipy", "pandas", "sympy", "pydantic", "click", "rich", "python-dotenv")


@dataclass
class ExperimentLog:
    name: str
    kind: str
    duration_seconds: float
    passed: bool
    unconverged: int


@dataclass
class RunManifest:
    command: str
    config_path: str
    config_sha256: str
    seed: Optional[int]
    started_at: str
    versions: Dict[str, str]
    budgets: Dict
    wall_time_seconds: float = 0.0
    experiments: List[ExperimentLog] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    exit_code: int = 0


def package_versions() -> Dict[str, str]:
    versions = {"meandim": __version__, "python": platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "not installed"
    return versions


class RunTracker:
    """Collects per-experiment timings and writes manifest.json next to the results"""

    def __init__(self, command: str, config_path: str, raw_config: bytes, seed: Optional[int] = None):
        self._start = time.time()
        self.manifest = RunManifest(
            command=command,
            config_path=str(config_path),
            config_sha256=hashlib.sha256(raw_config).hexdigest(),
            seed=seed,
            started_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            versions=package_versions(),
            budgets=config.budgets(),
        )

    def log_experiment(self, name: str, kind: str, duration: float, passed: bool, unconverged: int = 0):
        self.manifest.experiments.append(ExperimentLog(name, kind, round(duration, 6), passed, unconverged))

    def finish(self, out_dir: str, outputs: List[str], exit_code: int = 0) -> Path:
        self.manifest.wall_time_seconds = round(time.time() - self._start, 6)
        self.manifest.outputs = list(outputs) + ["manifest.json"]
        self.manifest.exit_code = exit_code
        path = Path(out_dir) / "manifest.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(self.manifest), indent=2) + "\n", encoding="utf-8")
        logger.info(f"Manifest written to {path} (config sha256 {self.manifest.config_sha256[:12]})")
        return path
