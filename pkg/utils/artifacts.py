"""
Artifact bookkeeping for one CLI run: every file written is tracked so a
failed run can remove its partial outputs
"""

import logging
from pathlib import Path
from typing import List, Union

import pandas as pd

logger = logging.getLogger(__name__)


class ArtifactWriter:
    """Writes run outputs under one directory and remembers them"""

    def __init__(self, output_dir: Union[str, Path]):
        self.output_dir = Path(output_dir)
        self.written: List[Path] = []
        self._created_dirs: List[Path] = []

    def path(self, name: str) -> Path:
        """Registers an output file name and returns its full path"""
        if not self.output_dir.exists():
            missing = []
            parent = self.output_dir
            while not parent.exists():
                missing.append(parent)
                parent = parent.parent
            self.output_dir.mkdir(parents=True, exist_ok=True)
            self._created_dirs.extend(missing)
        target = self.output_dir / name
        self.written.append(target)
        return target

    def write_frame(self, frame: pd.DataFrame, name: str, index: bool = False) -> Path:
        target = self.path(name)
        frame.to_csv(target, index=index, lineterminator="\n", encoding="utf-8")
        logger.debug(f"Записан файл: {target}")
        return target

    def rollback(self) -> None:
        """Removes everything written in this run, then directories it created"""
        for target in reversed(self.written):
            if target.exists():
                target.unlink()
                logger.info(f"Удалён частичный результат: {target}")
        for directory in self._created_dirs:
            if directory.exists() and not any(directory.iterdir()):
                directory.rmdir()
        self.written.clear()
        self._created_dirs.clear()
