from __future__ import annotations

import io
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from ..lexer import line_count

PROJECT_FILES = (
    "config.yml",
    "domain.yml",
    "endpoints.yml",
    "credentials.yml",
    "data/nlu.yml",
    "data/rules.yml",
    "data/stories.yml",
    "actions/actions.py",
)


class OverwriteRefused(FileExistsError):
    """The target directory already holds a file the project would replace."""


@dataclass
class GeneratedProject:
    files: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for path in self.files:
            if path.startswith("/") or "\\" in path or ".." in path.split("/"):
                raise ValueError(f"project paths must be relative and '/'-separated: {path!r}")

    def line_counts(self) -> dict[str, int]:
        return {path: line_count(text) for path, text in self.files.items()}

    def total_lines(self) -> int:
        return sum(self.line_counts().values())

    def to_zip(self) -> bytes:
        """Deterministic archive: fixed entry order, zeroed timestamps and modes."""
        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
            for path, text in self.files.items():
                info = zipfile.ZipInfo(path, date_time=(1980, 1, 1, 0, 0, 0))
                info.compress_type = zipfile.ZIP_DEFLATED
                info.external_attr = 0o644 << 16
                info.create_system = 3
                archive.writestr(info, text.encode("utf-8"))
        return buffer.getvalue()


def write_project(project: GeneratedProject, target: str | Path, overwrite: bool = False) -> list[Path]:
    """Write every file of *project* below *target*; returns paths in emission order."""
    root = Path(target)
    destinations = [root / rel for rel in project.files]
    if not overwrite:
        clashes = [p for p in destinations if p.exists()]
        if clashes:
            raise OverwriteRefused(f"refusing to overwrite {clashes[0]} (use --force)")
    written = []
    for dest, text in zip(destinations, project.files.values()):
        dest.parent.mkdir(parents=True, exist_ok=True)
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(dest)
    return written
