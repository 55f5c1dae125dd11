"""Read-only view of a run's output directory, as served by the monitor."""

from __future__ import annotations

import csv
import json
import logging
import os
from typing import Any, Optional

from config import ConfigError, load_config
from harness import CONFIG_FILE, MANIFEST_FILE, RESULTS_FILE, SUMMARY_FILE, read_manifest, unit_key

logger = logging.getLogger(__name__)

CENSUS_FILE = "census.csv"
CENSUS_SUMMARY_FILE = "census_summary.json"


class RunReader:
    """Reads the files a run writes; never creates or changes anything."""

    def __init__(self, out_dir: str) -> None:
        self.out_dir = out_dir

    def _path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def _read_json(self, name: str) -> Optional[dict[str, Any]]:
        path = self._path(name)
        if not os.path.exists(path):
            return None
        try:
            with open(path) as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.error("cannot read %s: %s", path, e)
            return None

    def _read_csv(self, name: str) -> Optional[list[dict[str, str]]]:
        path = self._path(name)
        if not os.path.exists(path):
            return None
        try:
            with open(path, newline="") as f:
                return list(csv.DictReader(f))
        except OSError as e:
            logger.error("cannot read %s: %s", path, e)
            return None

    def status(self) -> dict[str, Any]:
        """Unit counts for the run in ``out_dir``."""
        status: dict[str, Any] = {"out_dir": self.out_dir, "exists": os.path.isdir(self.out_dir)}
        if not status["exists"]:
            return status
        journal = read_manifest(self.out_dir)
        status["journal_entries"] = len(journal)
        cfg_path = self._path(CONFIG_FILE)
        if os.path.exists(cfg_path):
            try:
                cfg = load_config(cfg_path)
            except ConfigError as e:
                logger.error("cannot parse %s: %s", cfg_path, e)
                status["config_error"] = str(e)
            else:
                keys = [unit_key(cfg, n, s) for n in cfg.n_list for s in range(cfg.seeds)]
                done = [journal[k] for k in keys if k in journal]
                status.update(
                    model=cfg.model.model,
                    params=cfg.model.params_string(),
                    total_units=len(keys),
                    completed_units=len(done),
                    by_status={s: sum(1 for e in done if e["status"] == s) for s in ("ok", "empty", "all-censored")},
                )
        status["has_results"] = os.path.exists(self._path(RESULTS_FILE))
        status["has_summary"] = os.path.exists(self._path(SUMMARY_FILE))
        status["has_census"] = os.path.exists(self._path(CENSUS_FILE))
        status["finished"] = bool(status["has_summary"]
                                  and status.get("completed_units") == status.get("total_units"))
        return status

    def manifest_size(self) -> int:
        path = self._path(MANIFEST_FILE)
        return os.path.getsize(path) if os.path.exists(path) else 0

    def results(self) -> Optional[list[dict[str, str]]]:
        return self._read_csv(RESULTS_FILE)

    def summary(self) -> Optional[dict[str, Any]]:
        return self._read_json(SUMMARY_FILE)

    def census(self) -> Optional[dict[str, Any]]:
        rows = self._read_csv(CENSUS_FILE)
        if rows is None:
            return None
        return {"summary": self._read_json(CENSUS_SUMMARY_FILE), "rows": rows}
