from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator

MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    """Описание запуска команды: что и куда записано.

    Временных меток нет, повторный запуск с тем же seed даёт тот же манифест.
    """

    command: str
    output_dir: Path
    config_path: Path | None = None
    seed: int | None = None
    force: bool = False
    files: list[str] = field(default_factory=list)

    def prepare(self) -> None:
        self.output_dir = Path(self.output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def target(self, name: str) -> Path:
        path = Path(self.output_dir) / name
        if path.exists() and not self.force:
            raise FileExistsError(f"{path} уже существует; используйте --force для перезаписи.")
        if name not in self.files:
            self.files.append(name)
        return path

    @contextmanager
    def open(self, name: str) -> Iterator[IO[str]]:
        with open(self.target(name), "w", encoding="utf-8", newline="") as sink:
            yield sink

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "config": None if self.config_path is None else str(self.config_path),
            "seed": self.seed,
            "files": sorted(self.files),
        }

    def write(self) -> Path:
        path = self.target(MANIFEST_NAME)
        self.files.remove(MANIFEST_NAME)
        with open(path, "w", encoding="utf-8") as sink:
            json.dump(self.as_dict(), sink, indent=2, sort_keys=True)
            sink.write("\n")
        return path
