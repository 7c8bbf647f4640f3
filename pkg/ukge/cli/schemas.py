import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
from uuid import uuid4

from pydantic import BaseModel, Field

from ukge import __version__
from ukge.core.errors import ManifestError


def file_digest(path: Path) -> str:
    """sha256 of a file, or of every file in a directory (sorted by name, name included)."""
    path = Path(path)
    h = hashlib.sha256()
    if path.is_dir():
        for child in sorted(p for p in path.iterdir() if p.is_file() and not p.name.endswith(".manifest.json")
                            and p.name != "manifest.json"):
            h.update(child.name.encode("utf-8") + b"\0")
            h.update(hashlib.sha256(child.read_bytes()).digest())
        return h.hexdigest()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class FileDigest(BaseModel):
    path: str
    sha256: str

    @classmethod
    def of(cls, path: Path) -> "FileDigest":
        return cls(path=str(path), sha256=file_digest(path))


class RunManifest(BaseModel):
    """Provenance record written next to every command output."""
    run_id: str = Field(default_factory=lambda: str(uuid4()))
    command: str
    tool_version: str = __version__
    seed: Optional[int] = None
    config: Dict[str, Any] = Field(default_factory=dict)
    parameters: Dict[str, Any] = Field(default_factory=dict)
    inputs: List[FileDigest] = Field(default_factory=list)
    outputs: List[FileDigest] = Field(default_factory=list)
    started_at: str = Field(default_factory=utc_now)
    finished_at: Optional[str] = None

    @classmethod
    def start(
        cls,
        command: str,
        inputs: Sequence[Path] = (),
        seed: Optional[int] = None,
        config: Optional[Dict[str, Any]] = None,
        parameters: Optional[Dict[str, Any]] = None,
    ) -> "RunManifest":
        return cls(
            command=command,
            seed=seed,
            config=config or {},
            parameters=parameters or {},
            inputs=[FileDigest.of(p) for p in inputs],
        )

    def finish(self, outputs: Sequence[Path], manifest_path: Path) -> Path:
        self.outputs = [FileDigest.of(p) for p in outputs]
        self.finished_at = utc_now()
        manifest_path = Path(manifest_path)
        manifest_path.parent.mkdir(parents=True, exist_ok=True)
        manifest_path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        return manifest_path

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        try:
            return cls.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, ValueError) as e:
            raise ManifestError(f"{path}: unreadable manifest ({e})")

    @staticmethod
    def _verify(entries: Sequence[FileDigest], kind: str) -> None:
        for entry in entries:
            path = Path(entry.path)
            if not path.exists():
                raise ManifestError(f"{kind} '{entry.path}' recorded in the manifest no longer exists")
            actual = file_digest(path)
            if actual != entry.sha256:
                raise ManifestError(
                    f"{kind} '{entry.path}' changed since the run (recorded {entry.sha256[:12]}, now {actual[:12]})"
                )

    def verify_inputs(self) -> None:
        self._verify(self.inputs, "input")

    def verify_outputs(self) -> None:
        self._verify(self.outputs, "output")


def manifest_path_for(output: Path) -> Path:
    """`<dir>/manifest.json` for directory outputs, `<file>.manifest.json` otherwise."""
    output = Path(output)
    if output.is_dir():
        return output / "manifest.json"
    return output.with_name(output.name + ".manifest.json")
